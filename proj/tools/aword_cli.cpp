#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aword/aword.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* category_name(aword::ErrorCategory cat) {
    switch (cat) {
        case aword::ErrorCategory::usage: return "usage";
        case aword::ErrorCategory::data: return "data";
        default: return "numeric";
    }
}

int category_exit_code(aword::ErrorCategory cat) {
    switch (cat) {
        case aword::ErrorCategory::usage: return 2;
        case aword::ErrorCategory::data: return 3;
        default: return 4;
    }
}

void emit_error(const std::string& category, const std::string& message) {
    ordered_json j;
    j["error"] = category;
    j["message"] = message;
    std::cerr << j.dump() << '\n';
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

// ---------------------------------------------------------------- synth

struct SynthOpts {
    std::string out;
    int classes = 8, vocab = 50, train_per_class = 200, test_per_class = 50, perms = 2;
    aword::Index mean_len = 32, feature_dim = 16;
    double eps = 0.1, noise = 0.05;
    std::uint64_t seed = 0;
};

void run_synth(const SynthOpts& o) {
    aword::SynthConfig sc;
    sc.classes = o.classes;
    sc.vocab = o.vocab;
    sc.mean_len = o.mean_len;
    sc.train_per_class = o.train_per_class;
    sc.test_per_class = o.test_per_class;
    sc.perms = o.perms;
    sc.eps = o.eps;
    sc.seed = o.seed;
    const auto ds = aword::generate_synthetic_dataset(sc);
    const aword::Mat proto = aword::make_prototypes(o.vocab, o.feature_dim, o.seed);

    auto featurize = [&](const std::vector<aword::LabeledSequence>& seqs, const char* split) {
        std::vector<aword::FeatureSequence> out;
        for (std::size_t i = 0; i < seqs.size(); ++i) {
            std::mt19937_64 rng(aword::derive_seed(o.seed, "synth-noise", split == std::string("train"),
                                                   static_cast<std::uint64_t>(i)));
            aword::FeatureSequence f;
            f.video_id = seqs[i].video_id;
            f.label = seqs[i].label;
            f.stream = aword::Stream::fused;
            f.frames = aword::chain_to_features(seqs[i].words.ids, proto, o.noise, rng);
            out.push_back(std::move(f));
        }
        aword::write_dataset(o.out, split, out);
        return out.size();
    };
    const auto n_train = featurize(ds.train, "train");
    const auto n_test = featurize(ds.test, "test");

    ordered_json j;
    j["train"] = n_train;
    j["test"] = n_test;
    j["classes"] = o.classes;
    j["vocab"] = o.vocab;
    j["dim"] = o.feature_dim;
    std::cout << j.dump() << '\n';
}

// ---------------------------------------------------------------- ingest

struct IngestOpts {
    std::string data, out, name = "ingested";
};

void run_ingest(const IngestOpts& o) {
    const auto seqs = aword::load_dataset(o.data);
    if (seqs.empty()) throw aword::EmptyDataset("no entries in " + o.data);
    aword::Index frames = 0;
    for (const auto& s : seqs) frames += s.length();
    if (!o.out.empty()) aword::write_dataset(o.out, o.name, seqs);
    ordered_json j;
    j["videos"] = seqs.size();
    j["frames"] = frames;
    j["dim"] = seqs.front().dim();
    std::cout << j.dump() << '\n';
}

// ---------------------------------------------------------------- pca

struct PcaOpts {
    std::string fit, out;
    std::vector<std::string> apply;
    aword::Index dim = 0;
    std::string suffix = "pca";
};

void run_pca(const PcaOpts& o) {
    if (o.dim < 1) throw aword::UsageError("--dim must be >= 1");
    const auto fit_seqs = aword::load_dataset(o.fit);
    const aword::Mat samples = aword::stack_frames(fit_seqs);
    const auto model = aword::pca_fit(samples, o.dim);

    auto project_all = [&](const std::vector<aword::FeatureSequence>& seqs, const std::string& name) {
        std::vector<aword::FeatureSequence> out;
        for (const auto& s : seqs) {
            aword::FeatureSequence p = s;
            p.frames.resize(o.dim, s.length());
            for (aword::Index t = 0; t < s.length(); ++t)
                p.frames.col(t) = aword::pca_project(model, s.frames.col(t));
            out.push_back(std::move(p));
        }
        aword::write_dataset(o.out, name, out);
    };
    project_all(fit_seqs, stem_of(o.fit) + "." + o.suffix);
    for (const auto& path : o.apply) project_all(aword::load_dataset(path), stem_of(path) + "." + o.suffix);

    ordered_json j;
    j["in_dim"] = model.in_dim();
    j["out_dim"] = model.out_dim();
    j["explained_variance"] = model.explained_variance.sum();
    std::cout << j.dump() << '\n';
}

// ---------------------------------------------------------------- fuse

struct FuseOpts {
    std::string temporal, spatial, out;
    std::vector<std::string> apply_temporal, apply_spatial;
    double ratio = 0.5;
    aword::Index dim = 64;
    std::string suffix = "fused";
};

void run_fuse(const FuseOpts& o) {
    if (o.apply_temporal.size() != o.apply_spatial.size())
        throw aword::UsageError("--apply-temporal and --apply-spatial must pair up");
    aword::FusionConfig cfg;
    cfg.ratio = o.ratio;
    cfg.fused_dim = o.dim;
    const aword::Index n_t = aword::temporal_share(cfg);
    const aword::Index n_s = o.dim - n_t;

    const auto t_fit = aword::load_dataset(o.temporal);
    const auto s_fit = aword::load_dataset(o.spatial);
    const auto pca_t = aword::pca_fit(aword::stack_frames(t_fit), std::max<aword::Index>(1, n_t));
    const auto pca_s = aword::pca_fit(aword::stack_frames(s_fit), std::max<aword::Index>(1, n_s));

    auto fuse_pair = [&](const std::vector<aword::FeatureSequence>& ts,
                         const std::vector<aword::FeatureSequence>& ss, const std::string& name) {
        std::map<std::string, const aword::FeatureSequence*> by_id;
        for (const auto& s : ss) by_id[s.video_id] = &s;
        std::vector<aword::FeatureSequence> out;
        for (const auto& t : ts) {
            const auto it = by_id.find(t.video_id);
            if (it == by_id.end())
                throw aword::DataError("video " + t.video_id + " missing from the spatial stream");
            const auto& s = *it->second;
            if (s.length() != t.length())
                throw aword::DataError("video " + t.video_id + " frame counts differ across streams");
            aword::FeatureSequence f;
            f.video_id = t.video_id;
            f.label = t.label;
            f.stream = aword::Stream::fused;
            f.frames.resize(o.dim, t.length());
            for (aword::Index i = 0; i < t.length(); ++i)
                f.frames.col(i) = aword::fuse(t.frames.col(i), s.frames.col(i), cfg, pca_t, pca_s);
            out.push_back(std::move(f));
        }
        aword::write_dataset(o.out, name, out);
        return out.size();
    };
    std::size_t videos = fuse_pair(t_fit, s_fit, stem_of(o.temporal) + "." + o.suffix);
    for (std::size_t i = 0; i < o.apply_temporal.size(); ++i)
        videos += fuse_pair(aword::load_dataset(o.apply_temporal[i]),
                            aword::load_dataset(o.apply_spatial[i]),
                            stem_of(o.apply_temporal[i]) + "." + o.suffix);

    ordered_json j;
    j["fused_dim"] = o.dim;
    j["temporal_share"] = n_t;
    j["spatial_share"] = n_s;
    j["videos"] = videos;
    std::cout << j.dump() << '\n';
}

// ---------------------------------------------------------------- ratio

struct RatioOpts {
    std::string flow, mode = "mu_under", report, report_csv;
};

void run_ratio(const RatioOpts& o) {
    aword::RatioMode mode;
    if (o.mode == "mu_under") mode = aword::RatioMode::mu_under;
    else if (o.mode == "half") mode = aword::RatioMode::half_mu_under;
    else throw aword::UsageError("--mode must be mu_under or half");

    const auto values = aword::load_flow_averages(o.flow);
    aword::Vec avgs(static_cast<aword::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) avgs[static_cast<aword::Index>(i)] = values[i];
    const auto stats = aword::FlowStats::from_averages(std::move(avgs));
    const double threshold = mode == aword::RatioMode::mu_under ? stats.mu_under : 0.5 * stats.mu_under;
    const double r = aword::estimate_ratio(stats, mode);

    aword::Report report;
    report.put("ratio", "frames", static_cast<std::int64_t>(values.size()));
    report.put("ratio", "mode", o.mode);
    report.put("ratio", "mu_all", stats.mu_all);
    report.put("ratio", "mu_under", stats.mu_under);
    report.put("ratio", "threshold", threshold);
    report.put("ratio", "ratio", r);
    if (!o.report.empty()) aword::save_report_json(o.report, report);
    if (!o.report_csv.empty()) aword::save_report_csv(o.report_csv, report);

    ordered_json j;
    j["frames"] = values.size();
    j["mu_all"] = stats.mu_all;
    j["mu_under"] = stats.mu_under;
    j["threshold"] = threshold;
    j["ratio"] = r;
    std::cout << j.dump() << '\n';
}

// ---------------------------------------------------------------- codebook

struct CodebookOpts {
    std::string data, out;
    aword::Index k = 0;
    int max_iter = 100, threads = 1;
    double rel_tol = 1e-6;
    std::uint64_t seed = 0;
};

void run_codebook(const CodebookOpts& o) {
    const auto seqs = aword::load_dataset(o.data);
    const aword::Mat samples = aword::stack_frames(seqs);
    aword::Index k = o.k;
    if (k == 0) {
        // Corpus-scaled default, clamped to the sample count.
        k = static_cast<aword::Index>(std::llround(std::sqrt(static_cast<double>(samples.rows()) / 2.0)));
        k = std::clamp<aword::Index>(k, 1, samples.rows());
    }
    aword::KmeansOptions opts;
    opts.max_iter = o.max_iter;
    opts.rel_tol = o.rel_tol;
    opts.threads = o.threads;
    const auto cb = aword::kmeans_fit(samples, k, o.seed, opts);
    aword::save_codebook(o.out, cb);

    ordered_json j;
    j["K"] = cb.k();
    j["dim"] = cb.dim();
    j["frames"] = samples.rows();
    j["distortion"] = cb.distortion;
    std::cout << j.dump() << '\n';
}

// ---------------------------------------------------------------- encode

struct EncodeOpts {
    std::string train, test, codebook, out_dir;
    std::string mode = "ha", table_init = "codeword";
    int k = 5;
    double beta = 0.0;
    aword::Index table_dim = 0;
    std::uint64_t seed = 0;
};

void run_encode(const EncodeOpts& o) {
    if (o.mode != "ha" && o.mode != "sa" && o.mode != "da")
        throw aword::UsageError("--mode must be ha, sa or da");
    if (o.mode != "da" && o.codebook.empty())
        throw aword::UsageError("--codebook is required for modes ha and sa");
    if (o.table_init != "codeword" && o.table_init != "random")
        throw aword::UsageError("--table-init must be codeword or random");

    const auto train_seqs = aword::load_dataset(o.train);
    std::vector<aword::FeatureSequence> test_seqs;
    if (!o.test.empty()) test_seqs = aword::load_dataset(o.test);

    aword::Codebook cb;
    if (!o.codebook.empty()) cb = aword::load_codebook(o.codebook);

    double beta = 0.0;
    aword::SaConfig sa;
    if (o.mode == "sa") {
        beta = o.beta > 0.0 ? o.beta : aword::default_beta(aword::stack_frames(train_seqs), cb);
        sa.k = o.k;
        sa.beta = beta;
    }

    aword::WordRegistry registry;
    auto encode_all = [&](const std::vector<aword::FeatureSequence>& seqs) {
        std::vector<aword::LabeledSequence> out;
        for (const auto& s : seqs) {
            aword::LabeledSequence e;
            e.video_id = s.video_id;
            e.label = s.label;
            for (aword::Index t = 0; t < s.length(); ++t) {
                const aword::Vec x = s.frames.col(t);
                if (o.mode == "ha") e.words.ids.push_back(aword::hard_assign(x, cb).word_id);
                else if (o.mode == "sa") e.words.ids.push_back(aword::soft_assign(x, cb, sa, registry).word_id);
                else e.words.ids.push_back(aword::direct_assign(x, registry).word_id);
            }
            out.push_back(std::move(e));
        }
        return out;
    };
    const auto train_words = encode_all(train_seqs);
    const auto test_words = encode_all(test_seqs);

    aword::EmbeddingTable table;
    if (o.mode == "ha") {
        if (o.table_init == "codeword") table = aword::EmbeddingTable::from_codebook(cb);
        else {
            const aword::Index dim = o.table_dim > 0 ? o.table_dim : cb.dim();
            table = aword::EmbeddingTable::random(cb.k() + 1, dim, o.seed);
        }
    } else {
        table = aword::EmbeddingTable::from_registry(registry);
    }

    fs::create_directories(o.out_dir);
    aword::save_encoded(fs::path(o.out_dir) / "train.words.jsonl", train_words);
    if (!o.test.empty()) aword::save_encoded(fs::path(o.out_dir) / "test.words.jsonl", test_words);
    aword::save_table(fs::path(o.out_dir) / "table.bin", table);

    ordered_json j;
    j["mode"] = o.mode;
    j["train_sequences"] = train_words.size();
    j["test_sequences"] = test_words.size();
    j["vocab"] = table.vocab_size() - 1;
    j["table_dim"] = table.dim();
    if (o.mode == "sa") j["beta"] = beta;
    std::cout << j.dump() << '\n';
}

// ---------------------------------------------------------------- train

struct TrainOpts {
    std::string train, val, table, model = "tcnn", out, history;
    int classes = 0, epochs = 100, batch = 64, threads = 1;
    double lr = 1e-4, rho = 0.9, eps = 1e-8;
    aword::Index l_max = 0;
    std::uint64_t seed = 0;
    std::vector<int> widths{3, 4, 5};
    int filters = 200, fc_hidden = 256;
    double dropout1 = 0.2, dropout2 = 0.8;
    int clstm_width = 5, clstm_filters = 200, hidden = 100;
    double clstm_dropout = 0.6;
    bool freeze_embedding = false, masked_pool = false;
};

template <typename Model>
void train_and_save(Model& model, const TrainOpts& o, const std::vector<aword::LabeledSequence>& tr,
                    const std::vector<aword::LabeledSequence>& va) {
    aword::TrainConfig cfg;
    cfg.batch_size = o.batch;
    cfg.epochs = o.epochs;
    cfg.lr = o.lr;
    cfg.rho = o.rho;
    cfg.eps = o.eps;
    cfg.seed = o.seed;
    cfg.l_max = o.l_max;
    cfg.threads = o.threads;
    const auto history = aword::train(model, tr, va, cfg);
    aword::save_checkpoint(o.out, model);
    if (!o.history.empty()) aword::save_history_csv(o.history, history);

    ordered_json j;
    j["model"] = o.model;
    j["epochs"] = history.size();
    j["l_max"] = model.cfg.l_max;
    j["final_train_loss"] = history.back().train_loss;
    j["final_train_acc"] = history.back().train_acc;
    if (!va.empty()) j["final_val_acc"] = history.back().val_acc;
    std::cout << j.dump() << '\n';
}

void run_train(const TrainOpts& o) {
    if (o.model != "tcnn" && o.model != "clstm")
        throw aword::UsageError("--model must be tcnn or clstm");
    const auto tr = aword::load_encoded(o.train);
    std::vector<aword::LabeledSequence> va;
    if (!o.val.empty()) va = aword::load_encoded(o.val);
    const auto table = aword::load_table(o.table);

    int classes = o.classes;
    if (classes == 0) {
        for (const auto& s : tr) classes = std::max(classes, s.label + 1);
        for (const auto& s : va) classes = std::max(classes, s.label + 1);
        classes = std::max(classes, 2);
    }

    if (o.model == "tcnn") {
        aword::TcnnConfig cfg;
        cfg.widths = o.widths;
        cfg.filters.assign(o.widths.size(), o.filters);
        cfg.dropout_concat = o.dropout1;
        cfg.dropout_fc = o.dropout2;
        cfg.fc_hidden = o.fc_hidden;
        cfg.masked_pool = o.masked_pool;
        cfg.embedding_trainable = !o.freeze_embedding;
        auto model = aword::build_tcnn<float>(classes, table, cfg, o.seed);
        train_and_save(model, o, tr, va);
    } else {
        aword::ClstmConfig cfg;
        cfg.conv_width = o.clstm_width;
        cfg.conv_filters = o.clstm_filters;
        cfg.hidden = o.hidden;
        cfg.dropout = o.clstm_dropout;
        cfg.embedding_trainable = !o.freeze_embedding;
        auto model = aword::build_clstm<float>(classes, table, cfg, o.seed);
        train_and_save(model, o, tr, va);
    }
}

// ---------------------------------------------------------------- eval / predict

struct EvalOpts {
    std::string data, model, table, report, report_csv;
    bool curve = false, timing = false;
};

template <typename Model>
void extend_embedding(Model& model, const aword::EmbeddingTable& table) {
    if (table.dim() != model.dim())
        throw aword::InconsistentDim("table dim " + std::to_string(table.dim()) + " != model dim " +
                                     std::to_string(model.dim()));
    if (table.vocab_size() <= model.vocab()) return;
    aword::MatF grown = aword::MatF::Zero(table.vocab_size(), model.dim());
    grown.topRows(model.vocab()) = model.embedding;
    grown.bottomRows(table.vocab_size() - model.vocab()) =
        table.rows.bottomRows(table.vocab_size() - model.vocab()).template cast<float>();
    model.embedding = std::move(grown);
}

template <typename Model>
void eval_model(Model& model, const EvalOpts& o) {
    const auto start = std::chrono::steady_clock::now();
    if (!o.table.empty()) extend_embedding(model, aword::load_table(o.table));
    const aword::Index l_max = model.cfg.l_max;
    if (l_max < 1) throw aword::DataError("checkpoint carries no l_max; was the model trained?");
    const auto data = aword::load_encoded(o.data);
    const double acc = aword::accuracy(model, data, l_max);

    aword::Report report;
    report.put("run", "command", "eval");
    report.put("run", "model_file", o.model);
    report.put("run", "data_file", o.data);
    report.put("run", "model", aword::checkpoint_model_kind(o.model));
    report.put("run", "classes", model.classes);
    report.put("run", "l_max", static_cast<std::int64_t>(l_max));
    report.put("metrics", "sequences", static_cast<std::int64_t>(data.size()));
    report.put("metrics", "accuracy", acc);
    ordered_json out;
    out["accuracy"] = acc;
    out["sequences"] = data.size();
    if (o.curve) {
        const auto curve = aword::prediction_curve(model, data, l_max);
        json arr = json::array();
        for (int i = 0; i < 10; ++i) {
            char key[8];
            std::snprintf(key, sizeof(key), "%.1f", curve.fractions[i]);
            report.put("curve", key, curve.accuracy[i]);
            arr.push_back(curve.accuracy[i]);
        }
        out["curve"] = arr;
    }
    if (o.timing) {
        const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
        report.put("timing", "wall_seconds", wall.count());
    }
    if (!o.report.empty()) aword::save_report_json(o.report, report);
    if (!o.report_csv.empty()) aword::save_report_csv(o.report_csv, report);
    std::cout << out.dump() << '\n';
}

void run_eval(const EvalOpts& o) {
    const auto kind = aword::checkpoint_model_kind(o.model);
    if (kind == "tcnn") {
        auto model = aword::load_tcnn_checkpoint(o.model);
        eval_model(model, o);
    } else {
        auto model = aword::load_clstm_checkpoint(o.model);
        eval_model(model, o);
    }
}

struct PredictOpts {
    std::string data, model, table, out;
    int tenths = 10;
};

template <typename Model>
void predict_with(Model& model, const PredictOpts& o) {
    if (!o.table.empty()) extend_embedding(model, aword::load_table(o.table));
    const aword::Index l_max = model.cfg.l_max;
    if (l_max < 1) throw aword::DataError("checkpoint carries no l_max; was the model trained?");
    const auto data = aword::load_encoded(o.data);

    auto emit = [&](std::ostream& os) {
        for (const auto& s : data) {
            const auto [label, probs] = aword::predict(model, aword::prefix(s.words, o.tenths), l_max);
            ordered_json j;
            j["video_id"] = s.video_id;
            j["label"] = s.label;
            j["predicted"] = label;
            json arr = json::array();
            for (aword::Index i = 0; i < probs.size(); ++i) arr.push_back(probs[i]);
            j["probs"] = arr;
            os << j.dump() << '\n';
        }
    };
    if (o.out.empty()) emit(std::cout);
    else aword::write_atomic(o.out, emit);
}

void run_predict(const PredictOpts& o) {
    if (o.tenths < 1 || o.tenths > 10) throw aword::UsageError("--tenths must be in [1,10]");
    const auto kind = aword::checkpoint_model_kind(o.model);
    if (kind == "tcnn") {
        auto model = aword::load_tcnn_checkpoint(o.model);
        predict_with(model, o);
    } else {
        auto model = aword::load_clstm_checkpoint(o.model);
        predict_with(model, o);
    }
}

// ---------------------------------------------------------------- report

struct ReportOpts {
    std::string in, out_json, out_csv;
};

aword::Report report_from_json(const fs::path& path) {
    aword::Report report;
    ordered_json j;
    try {
        j = ordered_json::parse(aword::slurp(path));
    } catch (const json::exception& ex) {
        throw aword::DataError(path.string() + ": " + ex.what());
    }
    for (const auto& [section, body] : j.items()) {
        if (!body.is_object()) throw aword::DataError("report section " + section + " is not an object");
        for (const auto& [key, value] : body.items()) {
            if (value.is_number_integer()) report.put(section, key, value.get<std::int64_t>());
            else if (value.is_number_float()) report.put(section, key, value.get<double>());
            else if (value.is_string()) report.put(section, key, value.get<std::string>());
            else throw aword::DataError("report value " + section + "/" + key + " is not scalar");
        }
    }
    return report;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

aword::Report report_from_csv(const fs::path& path) {
    std::ifstream in = aword::open_input(path);
    std::string line;
    if (!std::getline(in, line) || split_csv_line(line) != std::vector<std::string>{"section", "key", "value"})
        throw aword::DataError(path.string() + ": missing section,key,value header");
    aword::Report report;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw aword::DataError(path.string() + ":" + std::to_string(lineno) + ": expected 3 fields");
        const std::string& text = fields[2];
        // Integers stay integers, anything else numeric becomes double.
        try {
            std::size_t used = 0;
            const long long v = std::stoll(text, &used);
            if (used == text.size()) {
                report.put(fields[0], fields[1], static_cast<std::int64_t>(v));
                continue;
            }
        } catch (const std::exception&) {}
        try {
            std::size_t used = 0;
            const double v = std::stod(text, &used);
            if (used == text.size()) {
                report.put(fields[0], fields[1], v);
                continue;
            }
        } catch (const std::exception&) {}
        report.put(fields[0], fields[1], text);
    }
    return report;
}

void run_report(const ReportOpts& o) {
    if (o.out_json.empty() && o.out_csv.empty())
        throw aword::UsageError("need --out-json and/or --out-csv");
    aword::Report report;
    const std::string ext = fs::path(o.in).extension().string();
    if (ext == ".json") report = report_from_json(o.in);
    else if (ext == ".csv") report = report_from_csv(o.in);
    else throw aword::UsageError("--in must end in .json or .csv");
    if (!o.out_json.empty()) aword::save_report_json(o.out_json, report);
    if (!o.out_csv.empty()) aword::save_report_csv(o.out_csv, report);
    ordered_json j;
    j["rows"] = report.rows.size();
    std::cout << j.dump() << '\n';
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"action-word sequence pipeline: features to codebook to words to sequence classifiers"};
    app.set_config("--config", "", "key=value config file; command-line flags win");
    app.require_subcommand(1);

    SynthOpts synth;
    auto* sc = app.add_subcommand("synth", "generate a synthetic order-sensitive dataset as features");
    sc->add_option("--out", synth.out, "output directory")->required();
    sc->add_option("--classes", synth.classes, "number of classes");
    sc->add_option("--vocab", synth.vocab, "chain state count (word vocabulary)");
    sc->add_option("--mean-len", synth.mean_len, "mean sequence length");
    sc->add_option("--train-per-class", synth.train_per_class, "training sequences per class");
    sc->add_option("--test-per-class", synth.test_per_class, "test sequences per class");
    sc->add_option("--perms", synth.perms, "permutations mixed into each transition matrix");
    sc->add_option("--eps", synth.eps, "uniform smoothing mass in transitions");
    sc->add_option("--feature-dim", synth.feature_dim, "emitted feature dimension");
    sc->add_option("--noise", synth.noise, "feature noise sigma around word prototypes");
    sc->add_option("--seed", synth.seed, "random seed");
    sc->callback([&] { run_synth(synth); });

    IngestOpts ingest;
    auto* ic = app.add_subcommand("ingest", "validate a feature manifest, optionally re-emit it");
    ic->add_option("--data", ingest.data, "input manifest")->required();
    ic->add_option("--out", ingest.out, "output directory (omit to validate only)");
    ic->add_option("--name", ingest.name, "output base name");
    ic->callback([&] { run_ingest(ingest); });

    PcaOpts pca;
    auto* pc = app.add_subcommand("pca", "fit PCA on one manifest and project manifests through it");
    pc->add_option("--fit", pca.fit, "manifest providing the fitting sample")->required();
    pc->add_option("--apply", pca.apply, "additional manifests to project");
    pc->add_option("--dim", pca.dim, "output dimension")->required();
    pc->add_option("--out", pca.out, "output directory")->required();
    pc->add_option("--suffix", pca.suffix, "output name suffix");
    pc->callback([&] { run_pca(pca); });

    FuseOpts fuse;
    auto* fc = app.add_subcommand("fuse", "fuse temporal and spatial streams by the data ratio");
    fc->add_option("--temporal", fuse.temporal, "temporal-stream manifest (PCA fit set)")->required();
    fc->add_option("--spatial", fuse.spatial, "spatial-stream manifest (PCA fit set)")->required();
    fc->add_option("--apply-temporal", fuse.apply_temporal, "extra temporal manifests");
    fc->add_option("--apply-spatial", fuse.apply_spatial, "extra spatial manifests, paired by position");
    fc->add_option("--ratio", fuse.ratio, "temporal share r in [0,1]");
    fc->add_option("--dim", fuse.dim, "fused dimension");
    fc->add_option("--out", fuse.out, "output directory")->required();
    fc->add_option("--suffix", fuse.suffix, "output name suffix");
    fc->callback([&] { run_fuse(fuse); });

    RatioOpts ratio;
    auto* rc = app.add_subcommand("ratio", "estimate the data ratio from flow magnitudes");
    rc->add_option("--flow", ratio.flow, "text file, one frame-average magnitude per line")->required();
    rc->add_option("--mode", ratio.mode, "threshold mode: mu_under or half");
    rc->add_option("--report", ratio.report, "write a JSON report here");
    rc->add_option("--report-csv", ratio.report_csv, "write a CSV report here");
    rc->callback([&] { run_ratio(ratio); });

    CodebookOpts codebook;
    auto* cc = app.add_subcommand("codebook", "fit a k-means codebook on manifest features");
    cc->add_option("--data", codebook.data, "input manifest")->required();
    cc->add_option("--k", codebook.k, "codebook size (0 = sqrt(frames/2))");
    cc->add_option("--max-iter", codebook.max_iter, "Lloyd iteration cap");
    cc->add_option("--rel-tol", codebook.rel_tol, "relative distortion improvement cutoff");
    cc->add_option("--seed", codebook.seed, "random seed");
    cc->add_option("--threads", codebook.threads, "worker threads");
    cc->add_option("--out", codebook.out, "output codebook file")->required();
    cc->callback([&] { run_codebook(codebook); });

    EncodeOpts encode;
    auto* ec = app.add_subcommand("encode", "turn feature sequences into word sequences");
    ec->add_option("--train", encode.train, "training manifest")->required();
    ec->add_option("--test", encode.test, "test manifest (encoded against the same table)");
    ec->add_option("--codebook", encode.codebook, "codebook file (modes ha and sa)");
    ec->add_option("--mode", encode.mode, "assignment mode: ha, sa or da");
    ec->add_option("--k", encode.k, "soft-assignment neighbor count");
    ec->add_option("--beta", encode.beta, "soft-assignment kernel scale (0 = data-scaled default)");
    ec->add_option("--table-init", encode.table_init, "ha table init: codeword or random");
    ec->add_option("--table-dim", encode.table_dim, "random table dimension (0 = codebook dim)");
    ec->add_option("--seed", encode.seed, "random seed");
    ec->add_option("--out-dir", encode.out_dir, "output directory")->required();
    ec->callback([&] { run_encode(encode); });

    TrainOpts train;
    auto* tc = app.add_subcommand("train", "train a sequence classifier on encoded words");
    tc->add_option("--train", train.train, "encoded training sequences")->required();
    tc->add_option("--val", train.val, "encoded validation sequences");
    tc->add_option("--table", train.table, "embedding table file")->required();
    tc->add_option("--model", train.model, "tcnn or clstm");
    tc->add_option("--classes", train.classes, "class count (0 = derive from labels)");
    tc->add_option("--epochs", train.epochs, "training epochs");
    tc->add_option("--batch", train.batch, "mini-batch size");
    tc->add_option("--lr", train.lr, "learning rate");
    tc->add_option("--rho", train.rho, "RMSProp decay");
    tc->add_option("--eps", train.eps, "RMSProp epsilon");
    tc->add_option("--l-max", train.l_max, "padded length (0 = longest training sequence)");
    tc->add_option("--seed", train.seed, "random seed");
    tc->add_option("--threads", train.threads, "worker threads");
    tc->add_option("--widths", train.widths, "tcnn filter widths")->delimiter(',');
    tc->add_option("--filters", train.filters, "tcnn filters per width");
    tc->add_option("--fc-hidden", train.fc_hidden, "tcnn hidden layer size");
    tc->add_option("--dropout1", train.dropout1, "tcnn dropout after pooling concat");
    tc->add_option("--dropout2", train.dropout2, "tcnn dropout between FC layers");
    tc->add_option("--clstm-width", train.clstm_width, "clstm conv width");
    tc->add_option("--clstm-filters", train.clstm_filters, "clstm conv filters");
    tc->add_option("--hidden", train.hidden, "clstm LSTM hidden units");
    tc->add_option("--clstm-dropout", train.clstm_dropout, "clstm dropout before the dense head");
    tc->add_flag("--freeze-embedding", train.freeze_embedding, "keep embedding rows fixed");
    tc->add_flag("--masked-pool", train.masked_pool, "exclude all-pad windows from max pooling");
    tc->add_option("--out", train.out, "output checkpoint file")->required();
    tc->add_option("--history", train.history, "write per-epoch CSV here");
    tc->callback([&] { run_train(train); });

    EvalOpts eval;
    auto* vc = app.add_subcommand("eval", "evaluate a checkpoint on encoded sequences");
    vc->add_option("--data", eval.data, "encoded sequences")->required();
    vc->add_option("--model", eval.model, "checkpoint file")->required();
    vc->add_option("--table", eval.table, "embedding table with test-time word rows");
    vc->add_flag("--curve", eval.curve, "also compute the 10-fraction prediction curve");
    vc->add_option("--report", eval.report, "write a JSON report here");
    vc->add_option("--report-csv", eval.report_csv, "write a CSV report here");
    vc->add_flag("--timing", eval.timing, "include wall-clock seconds in the report");
    vc->callback([&] { run_eval(eval); });

    PredictOpts predict;
    auto* dc = app.add_subcommand("predict", "per-sequence predictions, optionally from prefixes");
    dc->add_option("--data", predict.data, "encoded sequences")->required();
    dc->add_option("--model", predict.model, "checkpoint file")->required();
    dc->add_option("--table", predict.table, "embedding table with test-time word rows");
    dc->add_option("--tenths", predict.tenths, "observed fraction in tenths, 1..10");
    dc->add_option("--out", predict.out, "output file (default stdout)");
    dc->callback([&] { run_predict(predict); });

    ReportOpts report;
    auto* oc = app.add_subcommand("report", "convert a report between JSON and CSV");
    oc->add_option("--in", report.in, "input report (.json or .csv)")->required();
    oc->add_option("--out-json", report.out_json, "write JSON here");
    oc->add_option("--out-csv", report.out_csv, "write CSV here");
    oc->callback([&] { run_report(report); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("usage", e.what());
        return 2;
    } catch (const aword::Error& e) {
        emit_error(category_name(e.category), e.what());
        return category_exit_code(e.category);
    } catch (const std::exception& e) {
        emit_error("internal", e.what());
        return 1;
    }
    return 0;
}
