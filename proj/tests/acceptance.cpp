// Go/no-go acceptance gate. Runs nine release criteria end to end, prints one
// [PASS]/[FAIL] line per criterion with the measured numbers, and exits
// nonzero when anything fails. Thresholds are pinned here; do not loosen them
// to make a run green.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "aword/aword.hpp"
#include "support/histogram_baseline.hpp"
#include "support/oracles.hpp"

using namespace aword;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& message) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", criterion, message.c_str());
    if (!ok) ++g_failures;
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* pattern, ...) {
    char buf[512];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

Mat random_mat(Index rows, Index cols, std::mt19937_64& rng) {
    Mat m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
    return m;
}

// ---------------------------------------------------------------- criterion 1

struct GradCheck {
    std::string name;
    double worst_rel = 0.0;
    Index checked = 0;
    Index expected = 0;
};

GradCheck check_conv_layer() {
    std::mt19937_64 rng(derive_seed(0, "accept-conv"));
    auto layer = Conv1d<double>::init(5, 3, 8, rng);
    Mat x = random_mat(8, 12, rng);
    const Mat c = random_mat(5, 10, rng);  // fixed loss coefficients

    auto grad = Conv1d<double>::zeros_like(layer);
    Mat d_x;
    layer.backward(x, c, grad, &d_x);

    ParamList<double> spans, grads;
    layer.collect_params(spans, "conv");
    grad.collect_params(grads, "conv");
    collect(spans, "x", x);
    Mat d_x_copy = d_x;
    collect(grads, "x", d_x_copy);

    const auto res = oracle::finite_difference_check(
        spans, grads, [&] { return (c.array() * layer.forward(x).array()).sum(); });
    return {"conv", res.worst_rel, static_cast<Index>(res.checked),
            layer.w.size() + layer.b.size() + x.size()};
}

GradCheck check_dense_layer() {
    std::mt19937_64 rng(derive_seed(0, "accept-dense"));
    auto layer = Dense<double>::init(4, 7, rng);
    Vec x = random_mat(7, 1, rng).col(0);
    const Vec c = random_mat(4, 1, rng).col(0);

    auto grad = Dense<double>::zeros_like(layer);
    Vec d_x;
    layer.backward(x, c, grad, &d_x);

    ParamList<double> spans, grads;
    layer.collect_params(spans, "dense");
    grad.collect_params(grads, "dense");
    collect(spans, "x", x);
    Vec d_x_copy = d_x;
    collect(grads, "x", d_x_copy);

    const auto res = oracle::finite_difference_check(
        spans, grads, [&] { return c.dot(layer.forward(x)); });
    return {"dense", res.worst_rel, static_cast<Index>(res.checked),
            layer.w.size() + layer.b.size() + x.size()};
}

GradCheck check_lstm_layer() {
    std::mt19937_64 rng(derive_seed(0, "accept-lstm"));
    auto layer = LstmLayer<double>::init(4, 3, rng);
    Mat x = random_mat(3, 6, rng);
    const Mat c = random_mat(4, 6, rng);  // upstream gradient for every step

    LstmLayer<double>::SeqCache cache;
    layer.forward(x, &cache);
    auto grad = LstmLayer<double>::zeros_like(layer);
    Mat d_x;
    layer.backward(cache, c, grad, &d_x);

    ParamList<double> spans, grads;
    layer.collect_params(spans, "lstm");
    grad.collect_params(grads, "lstm");
    collect(spans, "x", x);
    Mat d_x_copy = d_x;
    collect(grads, "x", d_x_copy);

    const auto res = oracle::finite_difference_check(
        spans, grads, [&] { return (c.array() * layer.forward(x).array()).sum(); });
    return {"lstm", res.worst_rel, static_cast<Index>(res.checked),
            layer.wx.size() + layer.wh.size() + layer.b.size() + x.size()};
}

// Full-length id input (no pad) so every embedding row including the inert
// pad row has a well-defined finite-difference gradient. Dropout is active;
// each loss evaluation reseeds the mask stream so both sides of the central
// difference see the masks the analytic backward cached.
GradCheck check_tcnn_composed() {
    const auto table = EmbeddingTable::random(10, 8, 0);
    TcnnConfig cfg;
    cfg.widths = {3, 4, 5};
    cfg.filters = {4, 3, 3};
    cfg.fc_hidden = 6;
    cfg.dropout_concat = 0.2;
    cfg.dropout_fc = 0.5;
    cfg.l_max = 12;
    auto model = build_tcnn<double>(3, table, cfg, 0);

    const std::vector<int> ids = {1, 2, 3, 4, 5, 6, 7, 8, 9, 1, 2, 3};
    const Index label = 2;
    const std::uint64_t drop_seed = derive_seed(0, "accept-tcnn-drop");

    std::mt19937_64 rng(drop_seed);
    TcnnModel<double>::Cache cache;
    model.forward_ids(ids, true, &rng, &cache);
    auto grads = model.make_grads();
    model.backward(cache, label, grads);

    ParamList<double> spans, gspans;
    model.collect_params(spans);
    grads.collect_params(gspans);
    const auto res = oracle::finite_difference_check(spans, gspans, [&] {
        std::mt19937_64 r(drop_seed);
        return static_cast<double>(cross_entropy(model.forward_ids(ids, true, &r), label));
    });
    return {"tcnn", res.worst_rel, static_cast<Index>(res.checked), model.param_count()};
}

GradCheck check_clstm_composed() {
    const auto table = EmbeddingTable::random(10, 8, 0);
    ClstmConfig cfg;
    cfg.conv_width = 5;
    cfg.conv_filters = 4;
    cfg.hidden = 3;
    cfg.dropout = 0.4;
    cfg.l_max = 12;
    auto model = build_clstm<double>(3, table, cfg, 0);

    const std::vector<int> ids = {9, 8, 7, 6, 5, 4, 3, 2, 1, 9, 8, 7};
    const Index label = 1;
    const std::uint64_t drop_seed = derive_seed(0, "accept-clstm-drop");

    std::mt19937_64 rng(drop_seed);
    ClstmModel<double>::Cache cache;
    model.forward_ids(ids, true, &rng, &cache);
    auto grads = model.make_grads();
    model.backward(cache, label, grads);

    ParamList<double> spans, gspans;
    model.collect_params(spans);
    grads.collect_params(gspans);
    const auto res = oracle::finite_difference_check(spans, gspans, [&] {
        std::mt19937_64 r(drop_seed);
        return static_cast<double>(cross_entropy(model.forward_ids(ids, true, &r), label));
    });
    return {"clstm", res.worst_rel, static_cast<Index>(res.checked), model.param_count()};
}

void criterion_gradients() {
    const auto start = std::chrono::steady_clock::now();
    const GradCheck checks[] = {check_conv_layer(), check_dense_layer(), check_lstm_layer(),
                                check_tcnn_composed(), check_clstm_composed()};
    double worst = 0.0;
    std::string worst_name = "none";
    bool coverage = true;
    for (const auto& c : checks) {
        if (c.worst_rel > worst) {
            worst = c.worst_rel;
            worst_name = c.name;
        }
        if (c.checked != c.expected) coverage = false;
    }
    const double elapsed = seconds_since(start);
    report(1, worst <= 1e-4 && coverage && elapsed <= 60.0,
           fmt("gradients vs central differences on conv/dense/lstm and composed "
               "tcnn/clstm, all parameters: worst rel %.3e (%s), %.1f s",
               worst, worst_name.c_str(), elapsed));
}

// ---------------------------------------------------------------- criterion 2

void criterion_encoding() {
    std::mt19937_64 rng(derive_seed(0, "accept-encoding"));
    double worst_gap = 0.0, worst_sum = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const Index dim = 2 + static_cast<Index>(uniform_below(rng, 7));
        const Index k = 2 + static_cast<Index>(uniform_below(rng, 9));
        Codebook cb;
        cb.centroids = random_mat(k, dim, rng);
        const Vec x = random_mat(dim, 1, rng).col(0);
        const double beta = 0.1 + 2.0 * uniform_real(rng);

        const Assignment ha = hard_assign(x, cb);
        WordRegistry registry;
        const Assignment sa1 = soft_assign(x, cb, {1, beta}, registry);
        worst_gap = std::max(worst_gap, (sa1.weight - ha.weight).cwiseAbs().maxCoeff());

        SoftAssignDetail detail;
        const int kk = 1 + static_cast<int>(uniform_below(rng, static_cast<std::uint64_t>(k)));
        soft_assign(x, cb, {kk, beta}, registry, &detail);
        worst_sum = std::max(worst_sum, std::abs(detail.weights.sum() - 1.0));
    }
    report(2, worst_gap <= 1e-12 && worst_sum <= 1e-12,
           fmt("1000 random codebooks: |sa(k=1) - ha| max %.3e, |sum(w) - 1| max %.3e",
               worst_gap, worst_sum));
}

// ---------------------------------------------------------------- criterion 3

void criterion_kmeans() {
    std::mt19937_64 rng(derive_seed(0, "accept-kmeans"));
    bool monotone = true;
    for (int fit = 0; fit < 50; ++fit) {
        const Index n = 30 + static_cast<Index>(uniform_below(rng, 170));
        const Index dim = 2 + static_cast<Index>(uniform_below(rng, 4));
        const Index k = std::min<Index>(n, 2 + static_cast<Index>(uniform_below(rng, 7)));
        const Mat samples = random_mat(n, dim, rng);
        std::vector<double> history;
        KmeansOptions opts;
        opts.history = &history;
        kmeans_fit(samples, k, static_cast<std::uint64_t>(fit), opts);
        for (std::size_t i = 1; i < history.size(); ++i)
            if (history[i] > history[i - 1] * (1.0 + 1e-12) + 1e-12) monotone = false;
    }

    // Two well-separated Gaussian blobs; the fitted centroids must land on the
    // per-blob sample means.
    std::mt19937_64 blob_rng(derive_seed(0, "accept-blobs"));
    const int per_blob = 200;
    Mat samples(2 * per_blob, 2);
    for (int i = 0; i < per_blob; ++i)
        for (Index d = 0; d < 2; ++d) samples(i, d) = 0.1 * normal(blob_rng);
    for (int i = 0; i < per_blob; ++i)
        for (Index d = 0; d < 2; ++d) samples(per_blob + i, d) = 10.0 + 0.1 * normal(blob_rng);
    const Vec mean_a = samples.topRows(per_blob).colwise().mean().transpose();
    const Vec mean_b = samples.bottomRows(per_blob).colwise().mean().transpose();

    const Codebook cb = kmeans_fit(samples, 2, 0);
    double worst_blob = 0.0;
    for (const Vec& target : {mean_a, mean_b}) {
        double best = std::numeric_limits<double>::infinity();
        for (Index c = 0; c < cb.k(); ++c)
            best = std::min(best, (cb.centroids.row(c).transpose() - target).norm());
        worst_blob = std::max(worst_blob, best);
    }
    report(3, monotone && worst_blob <= 0.1,
           fmt("distortion non-increasing over 50 fits: %s; two-blob centroid error %.3e",
               monotone ? "yes" : "no", worst_blob));
}

// ------------------------------------------------------- criteria 4, 5 and 6

// Shared synthetic run: classes with identical unigram statistics that differ
// only in transition structure. An order-blind histogram baseline must stay
// near chance while the trained sequence model separates them.
struct SynthRun {
    double baseline_acc = 0.0;
    double test_acc = 0.0;
    bool loss_decreasing = true;
    int epochs = 0;
    double elapsed = 0.0;
    PredictionCurve curve;
    double curve_full = 0.0;
    bool curve_matches_accuracy = false;
};

SynthRun run_synthetic_benchmark() {
    const auto start = std::chrono::steady_clock::now();
    SynthConfig sc;  // 8 classes, vocab 50, mean length 32, 200/50 per class
    sc.seed = 0;
    const SynthDataset data = generate_synthetic_dataset(sc);

    oracle::HistogramBaseline baseline;
    baseline.fit(data.train, data.classes, data.vocab);

    const auto table = EmbeddingTable::random(data.vocab + 1, 16, 1);
    TcnnConfig cfg;
    cfg.filters = {64, 64, 64};
    cfg.fc_hidden = 96;
    cfg.dropout_concat = 0.2;
    cfg.dropout_fc = 0.5;
    auto model = build_tcnn<float>(data.classes, table, cfg, 1);

    TrainConfig tc;
    tc.epochs = 30;
    tc.lr = 1e-3;
    tc.seed = 1;
    const auto history = train(model, data.train, {}, tc);

    SynthRun r;
    r.baseline_acc = baseline.accuracy(data.test);
    r.test_acc = accuracy(model, data.test, model.cfg.l_max);
    r.epochs = static_cast<int>(history.size());
    for (std::size_t e = 1; e < 5 && e < history.size(); ++e)
        if (!(history[e].train_loss < history[e - 1].train_loss)) r.loss_decreasing = false;
    r.curve = prediction_curve(model, data.test, model.cfg.l_max);
    r.curve_full = r.curve.accuracy[9];
    r.curve_matches_accuracy = r.curve_full == r.test_acc;
    r.elapsed = seconds_since(start);
    return r;
}

void criterion_order_sensitivity(const SynthRun& r) {
    report(4,
           r.test_acc >= 0.95 && r.epochs <= 100 && r.baseline_acc <= 0.175 &&
               r.loss_decreasing && r.elapsed <= 600.0,
           fmt("synthetic 8-class task: tcnn %.3f (>= 0.95 in %d epochs, first-5 loss "
               "decreasing: %s), histogram baseline %.3f (<= 0.175), %.1f s",
               r.test_acc, r.epochs, r.loss_decreasing ? "yes" : "no", r.baseline_acc, r.elapsed));
}

void criterion_early_prediction(const SynthRun& r) {
    const double half = r.curve.accuracy[4];
    const double ninety = r.curve.accuracy[8];
    report(5, half >= 0.90 * r.curve_full && ninety >= 0.98 * r.curve_full,
           fmt("early prediction: acc@0.5 = %.3f >= 0.90 x %.3f, acc@0.9 = %.3f >= 0.98 x %.3f",
               half, r.curve_full, ninety, r.curve_full));
}

void criterion_curve_identity(const SynthRun& r) {
    // Also on a freshly built, untrained model of the other family; the
    // identity must hold for every evaluated model, trained or not.
    std::mt19937_64 rng(derive_seed(0, "accept-curve"));
    std::vector<LabeledSequence> tiny;
    for (int i = 0; i < 30; ++i) {
        LabeledSequence s;
        s.video_id = "curve-" + std::to_string(i);
        s.label = static_cast<int>(uniform_below(rng, 3));
        const std::size_t len = 6 + uniform_below(rng, 10);
        for (std::size_t t = 0; t < len; ++t)
            s.words.ids.push_back(1 + static_cast<int>(uniform_below(rng, 9)));
        tiny.push_back(std::move(s));
    }
    ClstmConfig cfg;
    cfg.conv_width = 3;
    cfg.conv_filters = 5;
    cfg.hidden = 4;
    cfg.dropout = 0.0;
    const auto untrained = build_clstm<float>(3, EmbeddingTable::random(10, 6, 2), cfg, 2);
    const double acc = accuracy(untrained, tiny, 16);
    const auto curve = prediction_curve(untrained, tiny, 16);

    report(6, r.curve_matches_accuracy && curve.accuracy[9] == acc,
           fmt("prediction_curve(1.0) == accuracy exactly: trained tcnn %.17g, untrained clstm %.17g",
               r.curve_full, curve.accuracy[9]));
}

// ---------------------------------------------------------------- criterion 7

void criterion_flow_ratio() {
    bool ok = true;

    Vec f1(4);
    f1 << 0, 0, 10, 10;
    const FlowStats s1 = FlowStats::from_averages(f1);
    ok = ok && s1.mu_all == 5.0 && s1.mu_under == 0.0;
    ok = ok && estimate_ratio(s1, RatioMode::half_mu_under) == 0.5;

    Vec f2 = Vec::Constant(6, 3.0);
    const FlowStats s2 = FlowStats::from_averages(f2);
    ok = ok && s2.mu_under == 3.0;
    ok = ok && estimate_ratio(s2, RatioMode::mu_under) == 0.0;
    ok = ok && estimate_ratio(s2, RatioMode::half_mu_under) == 1.0;

    Vec f3(20);
    for (Index i = 0; i < 10; ++i) f3[i] = 2.0;
    for (Index i = 10; i < 20; ++i) f3[i] = 20.0;
    const FlowStats s3 = FlowStats::from_averages(f3);
    ok = ok && s3.mu_all == 11.0 && s3.mu_under == 2.0;
    ok = ok && estimate_ratio(s3, RatioMode::mu_under) == 0.5;

    report(7, ok,
           "flow ratio hand examples exact; corpus-scale reference ratios "
           "(0.529/0.505 and ~0.75/~0.625) need the original videos and are "
           "documented, not reproduced");
}

// ---------------------------------------------------------------- criterion 8

int run_cli(const std::string& args) {
    const std::string cmd = std::string(AWORD_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
}

bool run_pipeline(const fs::path& dir, int threads) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string d = dir.string();
    const std::string t = std::to_string(threads);
    const std::vector<std::string> steps = {
        "synth --out " + d + "/synth --classes 3 --vocab 10 --mean-len 12"
            " --train-per-class 8 --test-per-class 4 --feature-dim 6 --seed 7",
        "codebook --data " + d + "/synth/train.jsonl --k 10 --seed 7 --threads " + t +
            " --out " + d + "/cb.bin",
        "encode --train " + d + "/synth/train.jsonl --test " + d + "/synth/test.jsonl" +
            " --codebook " + d + "/cb.bin --mode ha --out-dir " + d + "/enc",
        "train --train " + d + "/enc/train.words.jsonl --table " + d + "/enc/table.bin" +
            " --model tcnn --classes 3 --epochs 3 --batch 8 --lr 1e-3 --widths 2,3" +
            " --filters 6 --fc-hidden 12 --dropout1 0.1 --dropout2 0.2 --seed 7" +
            " --threads " + t + " --out " + d + "/model.bin --history " + d + "/history.csv",
        "eval --data " + d + "/enc/test.words.jsonl --model " + d + "/model.bin" +
            " --table " + d + "/enc/table.bin --curve --report " + d + "/report.json" +
            " --report-csv " + d + "/report.csv",
    };
    for (const auto& step : steps)
        if (run_cli(step) != 0) return false;
    return true;
}

// The reports embed the input paths, so determinism is judged the only way
// it is promised: the identical invocation repeated in the identical place.
std::vector<std::string> snapshot_pipeline(const fs::path& dir) {
    const char* files[] = {"cb.bin",        "enc/train.words.jsonl", "enc/test.words.jsonl",
                           "enc/table.bin", "model.bin",             "history.csv",
                           "report.json",   "report.csv"};
    std::vector<std::string> out;
    for (const char* f : files) out.push_back(slurp(dir / f));
    return out;
}

void criterion_determinism() {
    const fs::path base = fs::temp_directory_path() / "aword-acceptance";
    const fs::path work = base / "work";
    bool ran = true;
    std::vector<std::string> first, second, third;
    try {
        ran = run_pipeline(work, 1);
        if (ran) first = snapshot_pipeline(work);
        ran = ran && run_pipeline(work, 1);
        if (ran) second = snapshot_pipeline(work);
        ran = ran && run_pipeline(work, 4);
        if (ran) third = snapshot_pipeline(work);
    } catch (const std::exception&) {
        ran = false;
    }
    const bool rerun_identical = ran && first == second;
    const bool threads_identical = ran && first == third;
    fs::remove_all(base);
    report(8, ran && rerun_identical && threads_identical,
           fmt("pipeline (synth->codebook->encode->train->eval, seed 7): ran %s, rerun "
               "byte-identical %s, threads 4 byte-identical %s",
               ran ? "ok" : "FAILED", rerun_identical ? "yes" : "no",
               threads_identical ? "yes" : "no"));
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();

    try {
        criterion_gradients();
        criterion_encoding();
        criterion_kmeans();
        const SynthRun synth = run_synthetic_benchmark();
        criterion_order_sensitivity(synth);
        criterion_early_prediction(synth);
        criterion_curve_identity(synth);
        criterion_flow_ratio();
        criterion_determinism();
    } catch (const std::exception& e) {
        std::printf("[FAIL] unexpected exception: %s\n", e.what());
        ++g_failures;
    }

    // The unit suite is capped separately (300 s in CTest); this binary owns
    // the remainder of the 15 minute budget.
    const double elapsed = seconds_since(start);
    report(9, elapsed <= 600.0, fmt("acceptance suite finished in %.1f s (budget 600 s)", elapsed));

    std::printf("%s\n", g_failures == 0 ? "acceptance: all criteria passed"
                                        : "acceptance: FAILURES PRESENT");
    return g_failures == 0 ? 0 : 1;
}
