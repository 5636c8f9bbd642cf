#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aword/aword.hpp"

using namespace aword;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fresh scratch directory per test; recreated on entry so re-runs start clean.
struct ScratchDir {
    fs::path path;
    explicit ScratchDir(const std::string& name) {
        path = fs::temp_directory_path() / ("aword-tests-" + name);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    fs::path operator/(const std::string& leaf) const { return path / leaf; }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(AWORD_CLI_PATH) + " " + args + " >/dev/null 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json parse_file(const fs::path& p) { return json::parse(slurp(p)); }

// Values on a coarse grid are exact in float32, which keeps round-trip
// comparisons bitwise instead of approximate.
Mat grid_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Mat m(rows, cols);
    for (Index i = 0; i < m.size(); ++i)
        m.data()[i] = static_cast<double>(static_cast<int>(uniform_below(rng, 512)) - 256) / 16.0;
    return m;
}

} // namespace

TEST_CASE("float32 buffers round-trip matrices row-major") {
    const Mat m = grid_matrix(3, 4, 1);
    const auto buf = to_f32_rowmajor(m);
    REQUIRE(buf.size() == 12);
    REQUIRE(buf[1] == static_cast<float>(m(0, 1)));  // row-major order
    REQUIRE(buf[4] == static_cast<float>(m(1, 0)));
    const Mat back = from_f32_rowmajor<double>(buf, 3, 4);
    REQUIRE((back.array() == m.array()).all());
    REQUIRE_THROWS_AS(from_f32_rowmajor<double>(buf, 5, 4), DataError);
}

TEST_CASE("truncated float32 payloads are detected") {
    ScratchDir dir("blob");
    const fs::path p = dir / "short.bin";
    {
        std::ofstream out(p, std::ios::binary);
        const float v[2] = {1.0f, 2.0f};
        write_f32(out, v, 2);
    }
    std::ifstream in = open_input(p);
    REQUIRE_THROWS_AS(read_matrix_f32(in, 1, 3, "payload"), DataError);
}

TEST_CASE("datasets round-trip through manifest plus blob") {
    ScratchDir dir("manifest");
    std::vector<FeatureSequence> seqs(2);
    seqs[0].video_id = "vid-a";
    seqs[0].label = 1;
    seqs[0].stream = Stream::temporal;
    seqs[0].frames = grid_matrix(3, 5, 2);
    seqs[1].video_id = "vid-b";
    seqs[1].label = 0;
    seqs[1].stream = Stream::fused;
    seqs[1].frames = grid_matrix(3, 2, 3);

    const fs::path manifest = write_dataset(dir.path, "set", seqs);
    REQUIRE(fs::exists(dir / "set.f32"));

    const auto entries = read_manifest(manifest);
    REQUIRE(entries.size() == 2);
    REQUIRE(entries[0].byte_offset == 0);
    REQUIRE(entries[1].byte_offset == 3 * 5 * sizeof(float));
    REQUIRE(entries[0].stream == Stream::temporal);

    const auto loaded = load_dataset(manifest);
    REQUIRE(loaded.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(loaded[i].video_id == seqs[i].video_id);
        REQUIRE(loaded[i].label == seqs[i].label);
        REQUIRE(loaded[i].stream == seqs[i].stream);
        REQUIRE((loaded[i].frames.array() == seqs[i].frames.array()).all());
    }

    SECTION("the second entry loads independently via its byte offset") {
        const auto solo = load_sequence(manifest, entries[1]);
        REQUIRE((solo.frames.array() == seqs[1].frames.array()).all());
    }
    SECTION("bad manifest lines carry their line number") {
        const fs::path broken = dir / "broken.jsonl";
        std::ofstream(broken) << "{\"video_id\": \"x\"}\n";
        REQUIRE_THROWS_WITH(read_manifest(broken), Catch::Matchers::ContainsSubstring(":1:"));
        REQUIRE_THROWS_AS(read_manifest(dir / "missing.jsonl"), IoError);
    }
}

TEST_CASE("codebooks round-trip with their fit metadata") {
    ScratchDir dir("codebook");
    Codebook cb;
    cb.centroids = grid_matrix(4, 3, 4);
    cb.seed = 123456789;
    cb.distortion = 0.125;
    const fs::path p = dir / "cb.bin";
    save_codebook(p, cb);

    const Codebook back = load_codebook(p);
    REQUIRE((back.centroids.array() == cb.centroids.array()).all());
    REQUIRE(back.seed == cb.seed);
    REQUIRE(back.distortion == cb.distortion);

    SECTION("corrupt headers are rejected") {
        const fs::path bad = dir / "bad.bin";
        std::ofstream(bad) << "not json\n";
        REQUIRE_THROWS_AS(load_codebook(bad), DataError);
        std::ofstream(bad) << "{\"K\":0,\"dim\":3,\"seed\":0,\"distortion\":0,\"format_version\":1}\n";
        REQUIRE_THROWS_AS(load_codebook(bad), DataError);
        std::ofstream(bad) << "{\"K\":1,\"dim\":1,\"seed\":0,\"distortion\":0,\"format_version\":99}\n";
        REQUIRE_THROWS_AS(load_codebook(bad), DataError);
    }
}

TEST_CASE("embedding tables round-trip and enforce the zero pad row") {
    ScratchDir dir("table");
    EmbeddingTable table;
    table.init_mode = InitMode::codeword;
    table.rows = grid_matrix(5, 3, 5);
    table.rows.row(0).setZero();
    const fs::path p = dir / "table.bin";
    save_table(p, table);

    const EmbeddingTable back = load_table(p);
    REQUIRE(back.init_mode == InitMode::codeword);
    REQUIRE((back.rows.array() == table.rows.array()).all());

    EmbeddingTable dirty = table;
    dirty.rows(0, 1) = 0.5;
    const fs::path bad = dir / "dirty.bin";
    save_table(bad, dirty);
    REQUIRE_THROWS_AS(load_table(bad), DataError);
}

TEST_CASE("encoded sequences round-trip as json lines") {
    ScratchDir dir("encoded");
    std::vector<LabeledSequence> seqs(2);
    seqs[0].video_id = "a";
    seqs[0].label = 2;
    seqs[0].words.ids = {1, 5, 0, 2};
    seqs[1].video_id = "b";
    seqs[1].label = 0;
    seqs[1].words.ids = {3};
    const fs::path p = dir / "words.jsonl";
    save_encoded(p, seqs);

    const auto back = load_encoded(p);
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].video_id == "a");
    REQUIRE(back[0].label == 2);
    REQUIRE(back[0].words.ids == seqs[0].words.ids);
    REQUIRE(back[1].words.ids == seqs[1].words.ids);

    const fs::path bad = dir / "bad.jsonl";
    std::ofstream(bad) << "{\"video_id\":\"x\",\"label\":0,\"ids\":[]}\n";
    REQUIRE_THROWS_AS(load_encoded(bad), DataError);
    std::ofstream(bad) << "{\"video_id\":\"x\",\"label\":0,\"ids\":[1,-2]}\n";
    REQUIRE_THROWS_AS(load_encoded(bad), DataError);
}

TEST_CASE("flow averages survive the text format exactly") {
    ScratchDir dir("flow");
    const std::vector<double> values = {0.0, 0.5290000000000001, 1e-17, 123456.789012345678, 2.0 / 3.0};
    const fs::path p = dir / "flow.txt";
    save_flow_averages(p, values);
    const auto back = load_flow_averages(p);
    REQUIRE(back.size() == values.size());
    for (std::size_t i = 0; i < values.size(); ++i) REQUIRE(back[i] == values[i]);

    const fs::path bad = dir / "bad.txt";
    std::ofstream(bad) << "1.5\nnot-a-number\n";
    REQUIRE_THROWS_AS(load_flow_averages(bad), DataError);
}

TEST_CASE("checkpoints restore model parameters bit for bit") {
    ScratchDir dir("checkpoint");
    const auto table = EmbeddingTable::random(7, 4, 31);

    SECTION("tcnn") {
        TcnnConfig cfg;
        cfg.widths = {2, 3};
        cfg.filters = {3, 2};
        cfg.fc_hidden = 5;
        cfg.dropout_concat = 0.0;
        cfg.dropout_fc = 0.0;
        cfg.l_max = 6;
        auto model = build_tcnn<float>(3, table, cfg, 17);
        const fs::path p = dir / "tcnn.bin";
        save_checkpoint(p, model);
        REQUIRE(checkpoint_model_kind(p) == "tcnn");

        auto back = load_tcnn_checkpoint<float>(p);
        REQUIRE(back.classes == 3);
        REQUIRE(back.cfg.l_max == 6);
        REQUIRE(back.cfg.widths == cfg.widths);
        REQUIRE((back.embedding.array() == model.embedding.array()).all());
        REQUIRE((back.fc1.w.array() == model.fc1.w.array()).all());
        REQUIRE((back.convs[1].w.array() == model.convs[1].w.array()).all());

        const std::vector<int> ids = {1, 4, 2, 6, 0, 0};
        const auto before = model.forward_ids(ids, false, nullptr);
        const auto after = back.forward_ids(ids, false, nullptr);
        REQUIRE((before.array() == after.array()).all());

        REQUIRE_THROWS_AS(load_clstm_checkpoint<float>(p), DataError);
    }
    SECTION("clstm") {
        ClstmConfig cfg;
        cfg.conv_width = 2;
        cfg.conv_filters = 3;
        cfg.hidden = 4;
        cfg.dropout = 0.0;
        cfg.l_max = 5;
        auto model = build_clstm<float>(2, table, cfg, 19);
        const fs::path p = dir / "clstm.bin";
        save_checkpoint(p, model);
        REQUIRE(checkpoint_model_kind(p) == "clstm");

        auto back = load_clstm_checkpoint<float>(p);
        const std::vector<int> ids = {2, 3, 1, 5, 4};
        REQUIRE((model.forward_ids(ids, false, nullptr).array() ==
                 back.forward_ids(ids, false, nullptr).array()).all());
    }
}

TEST_CASE("reports serialize to ordered json and csv") {
    ScratchDir dir("report");
    Report report;
    report.put("run", "command", "demo");
    report.put("metrics", "accuracy", 0.875);
    report.put("metrics", "sequences", std::int64_t(12));
    report.put("odd", "a,b", std::string("say \"hi\"\nplease"));

    const fs::path jp = dir / "r.json";
    const fs::path cp = dir / "r.csv";
    save_report_json(jp, report);
    save_report_csv(cp, report);

    const json j = parse_file(jp);
    REQUIRE(j["run"]["command"] == "demo");
    REQUIRE(j["metrics"]["accuracy"] == 0.875);
    REQUIRE(j["metrics"]["sequences"] == 12);

    const std::string csv = slurp(cp);
    REQUIRE(csv.rfind("section,key,value\n", 0) == 0);
    REQUIRE(csv.find("metrics,accuracy,0.875") != std::string::npos);
    REQUIRE(csv.find("odd,\"a,b\",\"say \"\"hi\"\"\nplease\"") != std::string::npos);

    SECTION("an empty report still writes the csv header") {
        const fs::path ep = dir / "empty.csv";
        save_report_csv(ep, Report{});
        REQUIRE(slurp(ep) == "section,key,value\n");
    }
}

TEST_CASE("history csv lists one row per epoch") {
    ScratchDir dir("history");
    std::vector<EpochStats> history(2);
    history[0] = {1, 1.5, 0.25, 0.5};
    history[1] = {2, 1.0, 0.75, 0.625};
    const fs::path p = dir / "h.csv";
    save_history_csv(p, history);
    REQUIRE(slurp(p) == "epoch,train_loss,train_acc,val_acc\n1,1.5,0.25,0.5\n2,1,0.75,0.625\n");
}

TEST_CASE("atomic writes leave no debris when the writer fails") {
    ScratchDir dir("atomic");
    const fs::path p = dir / "out.txt";
    write_atomic(p, [](std::ostream& out) { out << "first\n"; });
    REQUIRE(slurp(p) == "first\n");

    REQUIRE_THROWS_AS(write_atomic(p, [](std::ostream&) -> void {
        throw DataError("writer exploded");
    }), DataError);
    REQUIRE(slurp(p) == "first\n");       // old content intact
    REQUIRE(!fs::exists(p.string() + ".tmp"));
}

TEST_CASE("cli rejects bad invocations without touching the filesystem") {
    ScratchDir dir("cli-usage");
    REQUIRE(run_cli("") == 2);
    REQUIRE(run_cli("--help") == 0);
    REQUIRE(run_cli("no-such-command") == 2);
    const fs::path out = dir / "should-not-exist.json";
    REQUIRE(run_cli("ratio --flow nope.txt --definitely-not-a-flag --report " + out.string()) == 2);
    REQUIRE(!fs::exists(out));
    // Missing input is a data error, not a usage error.
    REQUIRE(run_cli("ratio --flow " + (dir / "missing.txt").string()) == 3);
}

TEST_CASE("cli ratio reproduces the hand-computed split") {
    ScratchDir dir("cli-ratio");
    const fs::path flow = dir / "flow.txt";
    save_flow_averages(flow, {0.0, 0.0, 10.0, 10.0});

    const fs::path rj = dir / "r.json";
    const fs::path rc = dir / "r.csv";
    REQUIRE(run_cli("ratio --flow " + flow.string() + " --mode half --report " + rj.string() +
                    " --report-csv " + rc.string()) == 0);

    const json r = parse_file(rj);
    REQUIRE(r["ratio"]["frames"] == 4);
    REQUIRE(r["ratio"]["mu_all"] == 5.0);
    REQUIRE(r["ratio"]["mu_under"] == 0.0);
    REQUIRE(r["ratio"]["ratio"] == 0.5);
    REQUIRE(slurp(rc).rfind("section,key,value\n", 0) == 0);

    SECTION("re-running writes byte-identical reports") {
        const std::string first = slurp(rj);
        REQUIRE(run_cli("ratio --flow " + flow.string() + " --mode half --report " + rj.string()) == 0);
        REQUIRE(slurp(rj) == first);
    }
    SECTION("converting json to csv and back preserves the numerics") {
        const fs::path cc = dir / "conv.csv";
        const fs::path jj = dir / "conv.json";
        REQUIRE(run_cli("report --in " + rj.string() + " --out-csv " + cc.string()) == 0);
        REQUIRE(run_cli("report --in " + cc.string() + " --out-json " + jj.string()) == 0);
        const json a = parse_file(rj);
        const json b = parse_file(jj);
        for (const auto& [section, body] : a.items())
            for (const auto& [key, value] : body.items()) {
                if (value.is_number())
                    REQUIRE(b.at(section).at(key).get<double>() == value.get<double>());
                else
                    REQUIRE(b.at(section).at(key) == value);
            }
    }
}

TEST_CASE("cli pipeline runs end to end on a tiny dataset") {
    ScratchDir dir("cli-pipeline");
    const std::string synth_dir = (dir / "synth").string();
    REQUIRE(run_cli("synth --out " + synth_dir +
                    " --classes 3 --vocab 8 --mean-len 10 --train-per-class 6 --test-per-class 3"
                    " --feature-dim 5 --noise 0.05 --seed 3") == 0);
    const fs::path train_manifest = dir / "synth" / "train.jsonl";
    const fs::path test_manifest = dir / "synth" / "test.jsonl";
    REQUIRE(fs::exists(train_manifest));
    REQUIRE(fs::exists(dir / "synth" / "train.f32"));
    REQUIRE(read_manifest(train_manifest).size() == 18);
    REQUIRE(read_manifest(test_manifest).size() == 9);

    const fs::path cb = dir / "cb.bin";
    REQUIRE(run_cli("codebook --data " + train_manifest.string() + " --k 8 --seed 3 --out " +
                    cb.string()) == 0);
    REQUIRE(load_codebook(cb).k() == 8);

    const std::string enc_dir = (dir / "enc").string();
    REQUIRE(run_cli("encode --train " + train_manifest.string() + " --test " + test_manifest.string() +
                    " --codebook " + cb.string() + " --mode ha --out-dir " + enc_dir) == 0);
    const fs::path train_words = dir / "enc" / "train.words.jsonl";
    const fs::path test_words = dir / "enc" / "test.words.jsonl";
    const fs::path table = dir / "enc" / "table.bin";
    REQUIRE(fs::exists(train_words));
    REQUIRE(fs::exists(test_words));
    REQUIRE(load_table(table).vocab_size() == 9);

    const std::string train_words_before = slurp(train_words);
    const fs::path model = dir / "model.bin";
    const fs::path hist = dir / "hist.csv";
    REQUIRE(run_cli("train --train " + train_words.string() + " --table " + table.string() +
                    " --model tcnn --classes 3 --epochs 2 --batch 8 --lr 1e-3"
                    " --widths 2,3 --filters 4 --fc-hidden 8 --dropout1 0.1 --dropout2 0.2"
                    " --seed 3 --out " + model.string() + " --history " + hist.string()) == 0);
    REQUIRE(checkpoint_model_kind(model) == "tcnn");
    REQUIRE(slurp(train_words) == train_words_before);  // inputs never mutated

    std::istringstream hist_lines(slurp(hist));
    std::string line;
    int lines = 0;
    while (std::getline(hist_lines, line)) ++lines;
    REQUIRE(lines == 3);  // header + one row per epoch

    const fs::path report = dir / "eval.json";
    REQUIRE(run_cli("eval --data " + test_words.string() + " --model " + model.string() +
                    " --table " + table.string() + " --curve --report " + report.string()) == 0);
    const json r = parse_file(report);
    REQUIRE(r["metrics"]["sequences"] == 9);
    const double acc = r["metrics"]["accuracy"].get<double>();
    REQUIRE(acc >= 0.0);
    REQUIRE(acc <= 1.0);
    REQUIRE(r["curve"].size() == 10);
    REQUIRE(r["curve"]["1.0"].get<double>() == acc);

    SECTION("evaluation is idempotent byte for byte") {
        const std::string first = slurp(report);
        REQUIRE(run_cli("eval --data " + test_words.string() + " --model " + model.string() +
                        " --table " + table.string() + " --curve --report " + report.string()) == 0);
        REQUIRE(slurp(report) == first);
    }
    SECTION("per-sequence predictions cover the dataset") {
        const fs::path pred = dir / "pred.jsonl";
        REQUIRE(run_cli("predict --data " + test_words.string() + " --model " + model.string() +
                        " --table " + table.string() + " --tenths 5 --out " + pred.string()) == 0);
        std::istringstream lines_in(slurp(pred));
        int rows = 0;
        while (std::getline(lines_in, line)) {
            const json p = json::parse(line);
            REQUIRE(p["probs"].size() == 3);
            REQUIRE(p["predicted"].is_number_integer());
            ++rows;
        }
        REQUIRE(rows == 9);
    }
    SECTION("a clstm model trains through the same entry point") {
        const fs::path cmodel = dir / "clstm.bin";
        REQUIRE(run_cli("train --train " + train_words.string() + " --table " + table.string() +
                        " --model clstm --classes 3 --epochs 1 --batch 8 --lr 1e-3"
                        " --clstm-width 3 --clstm-filters 4 --hidden 6 --clstm-dropout 0.1"
                        " --seed 3 --out " + cmodel.string()) == 0);
        REQUIRE(checkpoint_model_kind(cmodel) == "clstm");
        REQUIRE(run_cli("eval --data " + test_words.string() + " --model " + cmodel.string() +
                        " --table " + table.string()) == 0);
    }
}

TEST_CASE("cli config files fill in flags, with the command line winning") {
    ScratchDir dir("cli-config");
    const fs::path flow = dir / "flow.txt";
    save_flow_averages(flow, {1.0, 2.0, 3.0, 10.0});
    const fs::path cfg = dir / "cfg.ini";
    {
        std::ofstream out(cfg);
        out << "[ratio]\n";
        out << "flow=" << flow.string() << "\n";
        out << "mode=mu_under\n";
    }
    const fs::path rj = dir / "from-config.json";
    REQUIRE(run_cli("--config " + cfg.string() + " ratio --report " + rj.string()) == 0);
    const json a = parse_file(rj);
    REQUIRE(a["ratio"]["mode"] == "mu_under");

    const fs::path rj2 = dir / "overridden.json";
    REQUIRE(run_cli("--config " + cfg.string() + " ratio --mode half --report " + rj2.string()) == 0);
    REQUIRE(parse_file(rj2)["ratio"]["mode"] == "half");
}
