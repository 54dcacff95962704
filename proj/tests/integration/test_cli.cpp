#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "driftadapt/bench.hpp"
#include "driftadapt/classifier.hpp"
#include "driftadapt/datagen.hpp"

using namespace driftadapt;
namespace fs = std::filesystem;

namespace {

struct Workspace {
    fs::path dir = fs::temp_directory_path() / "driftadapt_cli_test";
    Workspace() {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }
    std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = std::string(DRIFTADAPT_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

}  // namespace

TEST_CASE("train, predict and adapt from files") {
    Workspace ws;
    const auto [train, drifted] = gen_two_gaussian(GaussianDriftSpec::two_gaussian_defaults(8));
    write_csv(ws / "train.csv", train);
    write_csv(ws / "drifted.csv", drifted);
    write_csv(ws / "features.csv", drifted.batch.points());

    REQUIRE(run("train --input " + ws / "train.csv" + " --model " + ws / "model.json") == 0);
    const GnbModel model = load_model(ws / "model.json");
    GnbModel expected = fit(train);
    expected.class_names = {"0", "1"};
    CHECK(model == expected);

    REQUIRE(run("predict --model " + ws / "model.json" + " --input " + ws / "features.csv" + " --out " +
                ws / "pred.csv") == 0);
    const CsvTable pred = read_csv(ws / "pred.csv", 0);
    CHECK(pred.features.cols() == 2);
    CHECK(*pred.labels == predict(model, drifted.batch));

    // A labelled file is accepted too; the label column is ignored.
    REQUIRE(run("predict --model " + ws / "model.json" + " --input " + ws / "drifted.csv" + " --out " +
                ws / "pred2.csv") == 0);
    CHECK(slurp(ws / "pred2.csv") == slurp(ws / "pred.csv"));

    REQUIRE(run("adapt --model " + ws / "model.json" + " --input " + ws / "features.csv" + " --out " +
                ws / "adapted.csv --trace " + ws / "trace.csv --update-model " + ws / "next.json") == 0);
    const AdaptationResult r = adapt_batch(model, drifted.batch);
    const CsvTable adapted = read_csv(ws / "adapted.csv", 0);
    CHECK(*adapted.labels == r.labels);
    CHECK(adapted.features(0, 0) == r.posteriors(0, 0));
    CHECK(slurp(ws / "trace.csv") == trace_csv(r.trace));
    CHECK(load_model(ws / "next.json") == r.updated_model);

    REQUIRE(run("adapt --model " + ws / "model.json" + " --input " + ws / "features.csv" + " --out " +
                ws / "uniform.csv --weights uniform --c 1 --max-iters 3") == 0);
}

TEST_CASE("exit codes") {
    Workspace ws;
    CHECK(run("") == 1);
    CHECK(run("frobnicate") == 1);
    CHECK(run("train --input x.csv") == 1);
    CHECK(run("adapt --model m --input i --out o --weights sideways") == 1);
    CHECK(run("bench synthetic --seed 1 --runs 1 --c -5") == 1);
    CHECK(run("bench stream --csv x.csv --seed 1") == 1);

    spit(ws / "bad.csv", "f0,y\n1.0,0\nnope,1\n");
    CHECK(run("train --input " + ws / "bad.csv" + " --model " + ws / "m.json") == 2);
    CHECK(run("train --input " + ws / "missing.csv" + " --model " + ws / "m.json") == 2);

    spit(ws / "model.json", R"({"version": 7})");
    CHECK(run("predict --model " + ws / "model.json" + " --input " + ws / "bad.csv" + " --out " + ws / "p.csv") == 2);

    // A batch far outside the model's support has zero density everywhere.
    const auto [train, drifted] = gen_two_gaussian(GaussianDriftSpec::two_gaussian_defaults(1));
    GnbModel m = fit(train);
    m.variances = {{1e-6, 1e-6}, {1e-6, 1e-6}};
    save_model(m, ws / "tight.json");
    spit(ws / "far.csv", "1e300,1e300\n-1e300,-1e300\n1e300,-1e300\n-1e300,1e300\n");
    CHECK(run("adapt --model " + ws / "tight.json" + " --input " + ws / "far.csv" + " --out " + ws / "o.csv") == 3);
}

TEST_CASE("gen writes batches that load back") {
    Workspace ws;
    spit(ws / "stream.json", R"({"n_steps": 3, "batch_size": 40, "seed": 2})");
    REQUIRE(run("gen stream --spec " + ws / "stream.json" + " --out " + ws / "stream") == 0);
    CHECK(fs::exists(ws / "stream/batch_000.csv"));
    CHECK(fs::exists(ws / "stream/batch_002.csv"));
    const auto loaded = load_csv_stream(ws / "stream", 40);
    CHECK(loaded.size() == 3);
    StreamSpec spec = StreamSpec::linear_drift_defaults(2);
    spec.n_steps = 3;
    spec.batch_size = 40;
    CHECK(loaded[2].batch.points() == gen_drifting_stream(spec)[2].batch.points());

    spit(ws / "sea.json", R"({"n_init": 100, "n_drift": 50, "seed": 3})");
    REQUIRE(run("gen sea --spec " + ws / "sea.json" + " --out " + ws / "sea") == 0);
    CHECK(read_csv(ws / "sea/batch_001.csv").features.rows() == 50);

    spit(ws / "two.json", R"({"sizes": [200, 100], "seed": 4})");
    REQUIRE(run("gen two-gaussian --spec " + ws / "two.json" + " --out " + ws / "two") == 0);
    CHECK(read_csv(ws / "two/batch_000.csv").features.rows() == 200);

    REQUIRE(run("bench stream --csv " + ws / "stream --batch-size 40 --seed 0 --out " + ws / "s.csv") == 0);
    CHECK(import_stream_csv(slurp(ws / "s.csv")).steps.size() == 2);
    REQUIRE(run("bench stream --spec " + ws / "stream.json" + " --seed 5 --out " + ws / "s2.csv") == 0);
}

TEST_CASE("bench synthetic is reproducible") {
    Workspace ws;
    REQUIRE(run("bench synthetic --seed 3 --runs 2 --out " + ws / "a.csv") == 0);
    REQUIRE(run("bench sea --seed 3 --runs 1 --out " + ws / "b.csv") == 0);
    const MultiRunReport direct = run_synthetic_bench(3, 2);
    const std::string text = slurp(ws / "a.csv");
    CHECK(text.find(format_double(direct.runs[0].adapted.error)) != std::string::npos);
}
