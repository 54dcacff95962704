#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "driftadapt/datagen.hpp"
#include "support/oracles.hpp"

using namespace driftadapt;
namespace fs = std::filesystem;

namespace {

double class_frequency(const LabeledBatch& b, ClassIndex c) {
    std::size_t n = 0;
    for (ClassIndex y : b.labels) n += y == c ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(b.size());
}

std::vector<double> class_mean(const LabeledBatch& b, ClassIndex c, std::size_t* count = nullptr) {
    std::vector<double> mean(b.dim(), 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b.labels[i] != c) continue;
        ++n;
        for (std::size_t j = 0; j < b.dim(); ++j) mean[j] += b.batch.point(i)[j];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    if (count) *count = n;
    return mean;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST_CASE("Rng is reproducible and in range") {
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7);
    }
    const auto perm = shuffled_indices(50, r);
    std::vector<bool> seen(50, false);
    for (std::size_t i : perm) seen[i] = true;
    CHECK(std::count(seen.begin(), seen.end(), true) == 50);
}

TEST_CASE("normal draws have the requested moments") {
    Rng r(77);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = r.normal(2.0, 3.0);
        sum += v;
        sq += v * v;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 2.0) < 3.0 * 3.0 / std::sqrt(n));
    CHECK(std::abs(sq / n - mean * mean - 9.0) < 0.1);
}

TEST_CASE("two-Gaussian generator matches its spec") {
    const auto [train, drifted] = gen_two_gaussian(GaussianDriftSpec::two_gaussian_defaults(12));
    CHECK(train.size() == 10000);
    CHECK(drifted.size() == 1000);
    CHECK(train.dim() == 2);

    const double p1 = class_frequency(train, 1);
    CHECK(p1 >= 0.67);
    CHECK(p1 <= 0.73);
    CHECK(std::abs(p1 - 0.7) < 3.0 * std::sqrt(0.7 * 0.3 / 10000.0));

    std::size_t n0 = 0, n1 = 0;
    const auto m0 = class_mean(train, 0, &n0);
    const auto m1 = class_mean(train, 1, &n1);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::abs(m0[j] - 1.0) < 3.0 / std::sqrt(static_cast<double>(n0)));
        CHECK(std::abs(m1[j] + 1.0) < 3.0 / std::sqrt(static_cast<double>(n1)));
    }
    const auto d1 = class_mean(drifted, 1);
    CHECK(std::abs(d1[0] + 2.0) <= 0.1);
    CHECK(std::abs(d1[1] + 2.0) <= 0.1);
}

TEST_CASE("generators are deterministic in the seed") {
    const auto spec = GaussianDriftSpec::two_gaussian_defaults(3);
    const auto a = gen_gaussian_steps(spec);
    const auto b = gen_gaussian_steps(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t s = 0; s < a.size(); ++s) {
        CHECK(a[s].batch.points() == b[s].batch.points());
        CHECK(a[s].labels == b[s].labels);
    }
    const auto c = gen_gaussian_steps(GaussianDriftSpec::two_gaussian_defaults(4));
    CHECK_FALSE(a[0].batch.points() == c[0].batch.points());

    const auto [s1, s2] = gen_modified_sea(5, 500, 200);
    const auto [t1, t2] = gen_modified_sea(5, 500, 200);
    CHECK(s1.batch.points() == t1.batch.points());
    CHECK(s2.labels == t2.labels);

    const auto x = gen_drifting_stream(StreamSpec::linear_drift_defaults(8));
    const auto y = gen_drifting_stream(StreamSpec::linear_drift_defaults(8));
    CHECK(x.back().batch.points() == y.back().batch.points());
}

TEST_CASE("identical means give a no-drift pair") {
    GaussianDriftSpec spec = GaussianDriftSpec::two_gaussian_defaults(6);
    spec.means[1] = spec.means[0];
    spec.sizes = {20000, 20000};
    const auto [a, b] = gen_two_gaussian(spec);
    const auto ma = class_mean(a, 1);
    const auto mb = class_mean(b, 1);
    CHECK(std::abs(ma[0] - mb[0]) < 0.05);
    CHECK(std::abs(class_frequency(a, 1) - class_frequency(b, 1)) < 0.02);
}

TEST_CASE("GaussianDriftSpec validation") {
    GaussianDriftSpec spec = GaussianDriftSpec::two_gaussian_defaults(1);
    spec.priors = {0.5, 0.6};
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = GaussianDriftSpec::two_gaussian_defaults(1);
    spec.variances[0][0][0] = 0.0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = GaussianDriftSpec::two_gaussian_defaults(1);
    spec.sizes[1] = 0;
    CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("SEA stand-in") {
    CHECK(sea_label(0.0, 0.0, 0.0) == 1);
    CHECK(sea_label(0.0, 0.0, 8.0) == 1);
    CHECK(sea_label(5.0, 4.0, 8.0) == 0);
    CHECK(sea_label(5.0, 4.0, 9.0) == 1);

    SeaSpec spec;
    spec.seed = 13;
    const auto [init, drift] = gen_modified_sea(spec);
    CHECK(init.size() == 10000);
    CHECK(drift.size() == 1000);
    CHECK(init.dim() == 3);
    for (const auto* b : {&init, &drift}) {
        const double theta = b == &init ? spec.theta_init : spec.theta_drift;
        for (std::size_t i = 0; i < b->size(); ++i) {
            const auto x = b->batch.point(i);
            for (double v : x) {
                CHECK(v >= 0.0);
                CHECK(v <= 10.0);
            }
            CHECK(std::abs(x[0] + x[1] - theta) >= spec.band_half_width);
            CHECK(b->labels[i] == sea_label(x[0], x[1], theta));
        }
    }
    CHECK(std::abs(class_frequency(init, 1) - class_frequency(drift, 1)) >= 0.03);

    SeaSpec same = spec;
    same.theta_drift = same.theta_init;
    const auto [a, b] = gen_modified_sea(same);
    for (std::size_t i = 0; i < b.size(); ++i) {
        const auto x = b.batch.point(i);
        CHECK(b.labels[i] == sea_label(x[0], x[1], same.theta_init));
    }
}

TEST_CASE("drifting stream") {
    StreamSpec spec = StreamSpec::linear_drift_defaults(2);
    spec.batch_size = 20000;
    spec.n_steps = 3;
    const auto stream = gen_drifting_stream(spec);
    REQUIRE(stream.size() == 3);
    const auto first = class_mean(stream[0], 1);
    const auto mid = class_mean(stream[1], 1);
    const auto last = class_mean(stream[2], 1);
    CHECK(std::abs(first[0] + 1.0) < 0.05);
    CHECK(std::abs(mid[0] + 2.5) < 0.05);
    CHECK(std::abs(last[1] + 4.0) < 0.05);
    CHECK(spec.means_at(1)[1][0] == -2.5);

    SUBCASE("two steps reproduce the two-Gaussian endpoints") {
        StreamSpec two = StreamSpec::linear_drift_defaults(2);
        two.n_steps = 2;
        two.end_means = {{1.0, 1.0}, {-2.0, -2.0}};
        CHECK(two.means_at(0) == ClassMatrix{{1.0, 1.0}, {-1.0, -1.0}});
        CHECK(two.means_at(1) == ClassMatrix{{1.0, 1.0}, {-2.0, -2.0}});
    }
    SUBCASE("stationary trajectory") {
        StreamSpec flat = StreamSpec::linear_drift_defaults(2);
        flat.end_means = flat.start_means;
        for (std::size_t s = 0; s < flat.n_steps; ++s) CHECK(flat.means_at(s) == flat.start_means);
    }
    SUBCASE("validation") {
        StreamSpec bad = StreamSpec::linear_drift_defaults(2);
        bad.n_steps = 1;
        CHECK_THROWS_AS(bad.validate(), Error);
    }
}

TEST_CASE("spec documents") {
    const StreamSpec s = StreamSpec::linear_drift_defaults(31);
    const StreamSpec back = stream_spec_from_json(stream_spec_to_json(s));
    CHECK(back.n_steps == s.n_steps);
    CHECK(back.end_means == s.end_means);
    CHECK(back.seed == 31);

    const SeaSpec sea = sea_spec_from_json(R"({"n_init": 50, "seed": 4})");
    CHECK(sea.n_init == 50);
    CHECK(sea.n_drift == 1000);
    CHECK(sea.seed == 4);

    const GaussianDriftSpec g = gaussian_spec_from_json(R"({"seed": 9})");
    CHECK(g.sizes == std::vector<std::size_t>{10000, 1000});
    CHECK_THROWS_AS(gaussian_spec_from_json("[1, 2"), Error);
}

TEST_CASE("CSV parsing") {
    SUBCASE("header row is detected") {
        const CsvTable t = parse_csv("f0,f1,y\n1.0,2.0,1\n3.0,4.0,0\n");
        CHECK(t.had_header);
        CHECK(t.features(0, 0) == 1.0);
        CHECK(t.features(0, 1) == 2.0);
        CHECK((*t.labels)[0] == 1);
        CHECK((*t.labels)[1] == 0);
    }
    SUBCASE("no header") {
        const CsvTable t = parse_csv("1.5,2,0\n");
        CHECK_FALSE(t.had_header);
        CHECK(t.features.rows() == 1);
    }
    SUBCASE("string labels map in sorted order") {
        const CsvTable t = parse_csv("1,b\n2,a\n3,b\n4,a\n");
        CHECK(*t.labels == Labels{1, 0, 1, 0});
        CHECK(t.class_names == std::vector<std::string>{"a", "b"});
    }
    SUBCASE("unlabelled") {
        const CsvTable t = parse_csv("1,2,3\n", std::nullopt);
        CHECK(t.features.cols() == 3);
        CHECK_FALSE(t.labels.has_value());
    }
    SUBCASE("malformed rows") {
        try {
            parse_csv("1,2,0\n1,x,0\n");
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ParseError);
            CHECK(std::string(e.what()).find("line 2") != std::string::npos);
        }
        try {
            parse_csv("1,2,0\n1,0\n");
            FAIL("expected DimensionError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DimensionError);
        }
    }
}

TEST_CASE("CSV write and read round-trip exactly") {
    TempDir dir("driftadapt_csv_roundtrip");
    const auto [train, drifted] = gen_two_gaussian(GaussianDriftSpec::two_gaussian_defaults(21));
    const fs::path file = dir.path / "d.csv";
    write_csv(file, drifted);
    const CsvTable t = read_csv(file);
    CHECK(t.had_header);
    CHECK(t.features == drifted.batch.points());
    CHECK(*t.labels == drifted.labels);

    const auto stream = load_csv_stream(file, 1000);
    REQUIRE(stream.size() == 1);
    CHECK(stream[0].batch.points() == drifted.batch.points());
}

TEST_CASE("load_csv_stream batching") {
    TempDir dir("driftadapt_csv_stream");
    std::string ten = "f0,y\n";
    for (int i = 0; i < 10; ++i) ten += std::to_string(i) + "," + std::to_string(i % 2) + "\n";
    write_text(dir.path / "ten.csv", ten);
    const auto a = load_csv_stream(dir.path / "ten.csv", 5);
    REQUIRE(a.size() == 2);
    CHECK(a[0].size() == 5);
    CHECK(a[1].size() == 5);

    write_text(dir.path / "eleven.csv", ten + "10,0\n");
    const auto b = load_csv_stream(dir.path / "eleven.csv", 5);
    REQUIRE(b.size() == 2);
    CHECK(b[0].size() == 5);
    CHECK(b[1].size() == 6);
    CHECK(b[1].batch.point(5)[0] == 10.0);

    // A directory is read file by file in name order.
    TempDir many("driftadapt_csv_dir");
    write_text(many.path / "b.csv", "3,1\n4,0\n");
    write_text(many.path / "a.csv", "1,0\n2,1\n");
    const auto c = load_csv_stream(many.path, 2);
    REQUIRE(c.size() == 2);
    CHECK(c[0].batch.point(0)[0] == 1.0);
    CHECK(c[1].batch.point(0)[0] == 3.0);

    CHECK(batch_ranges(12, 5, 4) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 5}, {5, 12}});
    CHECK(batch_ranges(14, 5, 4) == std::vector<std::pair<std::size_t, std::size_t>>{{0, 5}, {5, 10}, {10, 14}});
}
