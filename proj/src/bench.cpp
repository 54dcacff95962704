#include "driftadapt/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "driftadapt/classifier.hpp"
#include "driftadapt/datagen.hpp"
#include "driftadapt/random.hpp"

namespace driftadapt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

double cross_validation_error(const LabeledBatch& data, std::size_t folds, std::uint64_t seed, double variance_floor) {
    if (folds < 2 || folds > data.size()) throw Error(ErrorKind::InvalidArgument, "fold count out of range");
    Rng rng(seed);
    const auto order = shuffled_indices(data.size(), rng);
    const std::size_t classes = data.class_count();
    double total = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t begin = f * data.size() / folds;
        const std::size_t end = (f + 1) * data.size() / folds;
        std::vector<std::size_t> train_idx;
        train_idx.reserve(data.size() - (end - begin));
        train_idx.insert(train_idx.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(begin));
        train_idx.insert(train_idx.end(), order.begin() + static_cast<std::ptrdiff_t>(end), order.end());
        const std::vector<std::size_t> test_idx(order.begin() + static_cast<std::ptrdiff_t>(begin),
                                                order.begin() + static_cast<std::ptrdiff_t>(end));
        const GnbModel model = fit(data.subset(train_idx), variance_floor, classes);
        const LabeledBatch test = data.subset(test_idx);
        total += error_rate(predict(model, test.batch), test.labels);
    }
    return total / static_cast<double>(folds);
}

ComparisonReport run_comparison(const LabeledBatch& train, const LabeledBatch& drifted, const AdaptationConfig& config,
                                std::uint64_t seed, std::string dataset) {
    if (train.dim() != drifted.dim()) throw Error(ErrorKind::DimensionMismatch, "train and drifted dimensions differ");
    ComparisonReport report;
    report.dataset = std::move(dataset);
    report.seed = seed;
    report.n_train = train.size();
    report.n_drifted = drifted.size();
    report.config = config;

    const GnbModel model = fit(train, config.variance_floor);

    auto start = Clock::now();
    report.supervised.error = cross_validation_error(drifted, kCrossValidationFolds, seed, config.variance_floor);
    report.supervised.seconds = seconds_since(start);

    start = Clock::now();
    const Labels frozen = predict(model, drifted.batch);
    report.unadapted.seconds = seconds_since(start);
    report.unadapted.error = error_rate(frozen, drifted.labels);

    start = Clock::now();
    AdaptationResult adapted = adapt_batch(model, drifted.batch, config);
    report.adapted.seconds = seconds_since(start);
    report.adapted.error = error_rate(adapted.labels, drifted.labels);
    report.trace = std::move(adapted.trace);
    return report;
}

StreamReport run_stream_eval(const std::vector<LabeledBatch>& stream, const AdaptationConfig& config) {
    if (stream.size() < 2) throw Error(ErrorKind::InvalidArgument, "stream needs a training batch and one more");
    const GnbModel model0 = fit(stream.front(), config.variance_floor);

    std::vector<Batch> unlabeled;
    unlabeled.reserve(stream.size() - 1);
    for (std::size_t s = 1; s < stream.size(); ++s) unlabeled.push_back(stream[s].batch);

    StreamReport report;
    const auto start = Clock::now();
    const auto results = sequential_adapt(model0, unlabeled, config);
    report.total_seconds = seconds_since(start);

    for (std::size_t s = 1; s < stream.size(); ++s) {
        const AdaptationResult& r = results[s - 1];
        StreamStep step;
        step.step = s;
        step.adapted_error = error_rate(r.labels, stream[s].labels);
        step.unadapted_error = error_rate(predict(model0, stream[s].batch), stream[s].labels);
        step.iterations = r.trace.iterations.size();
        step.final_kl = r.trace.iterations.empty() ? 0.0 : r.trace.iterations.back().kl;
        report.mean_adapted_error += step.adapted_error;
        report.mean_unadapted_error += step.unadapted_error;
        report.steps.push_back(step);
    }
    report.mean_adapted_error /= static_cast<double>(report.steps.size());
    report.mean_unadapted_error /= static_cast<double>(report.steps.size());
    return report;
}

MethodScore MultiRunReport::mean(MethodScore ComparisonReport::*method) const {
    MethodScore m;
    for (const auto& r : runs) {
        m.error += (r.*method).error;
        m.seconds += (r.*method).seconds;
    }
    if (!runs.empty()) {
        m.error /= static_cast<double>(runs.size());
        m.seconds /= static_cast<double>(runs.size());
    }
    return m;
}

double MultiRunReport::stddev_error(MethodScore ComparisonReport::*method) const {
    if (runs.size() < 2) return 0.0;
    const double mu = mean(method).error;
    double ss = 0.0;
    for (const auto& r : runs) ss += ((r.*method).error - mu) * ((r.*method).error - mu);
    return std::sqrt(ss / static_cast<double>(runs.size() - 1));
}

double MultiRunReport::ordered_fraction() const {
    if (runs.empty()) return 0.0;
    const auto n = std::count_if(runs.begin(), runs.end(), [](const ComparisonReport& r) { return r.ordered(); });
    return static_cast<double>(n) / static_cast<double>(runs.size());
}

MultiRunReport run_synthetic_bench(std::uint64_t seed, std::size_t runs, const AdaptationConfig& config) {
    MultiRunReport report;
    report.dataset = "synthetic";
    for (std::size_t r = 0; r < runs; ++r) {
        const std::uint64_t run_seed = seed + r;
        auto [train, drifted] = gen_two_gaussian(GaussianDriftSpec::two_gaussian_defaults(run_seed));
        report.runs.push_back(run_comparison(train, drifted, config, run_seed, report.dataset));
    }
    return report;
}

MultiRunReport run_sea_bench(std::uint64_t seed, std::size_t runs, const AdaptationConfig& config) {
    MultiRunReport report;
    report.dataset = "sea";
    for (std::size_t r = 0; r < runs; ++r) {
        const std::uint64_t run_seed = seed + r;
        SeaSpec spec;
        spec.seed = run_seed;
        auto [train, drifted] = gen_modified_sea(spec);
        report.runs.push_back(run_comparison(train, drifted, config, run_seed, report.dataset));
    }
    return report;
}

// ---------------------------------------------------------------- export

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << text;
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

nlohmann::ordered_json config_json(const AdaptationConfig& c) {
    nlohmann::ordered_json j;
    j["step_constant"] = c.step_constant;
    j["max_iterations"] = c.max_iterations;
    j["tolerance"] = c.tolerance;
    j["clamp_floor"] = c.clamp_floor;
    j["weight_mode"] = std::string(to_string(c.weight_mode));
    j["variance_floor"] = c.variance_floor;
    return j;
}

nlohmann::ordered_json comparison_json(const ComparisonReport& r) {
    nlohmann::ordered_json j;
    j["dataset"] = r.dataset;
    j["seed"] = r.seed;
    j["n_train"] = r.n_train;
    j["n_drifted"] = r.n_drifted;
    j["config"] = config_json(r.config);
    for (auto [name, score] : {std::pair{"supervised", r.supervised}, std::pair{"adapted", r.adapted},
                               std::pair{"unadapted", r.unadapted}}) {
        j["methods"][name] = {{"error", score.error}, {"seconds", score.seconds}};
    }
    auto& trace = j["trace"];
    trace["termination"] = std::string(to_string(r.trace.termination));
    trace["iterations"] = nlohmann::ordered_json::array();
    for (const auto& it : r.trace.iterations) {
        trace["iterations"].push_back(
            {{"k", it.k}, {"kl", it.kl}, {"step_size", it.step_size}, {"label_changes", it.label_changes}});
    }
    return j;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.emplace_back();
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::size_t parse_count(const std::string& s) {
    const double v = parse_double(s);
    if (v < 0 || v != std::floor(v)) throw Error(ErrorKind::ParseError, "not a count: " + s);
    return static_cast<std::size_t>(v);
}

}  // namespace

std::string comparison_csv(const ComparisonReport& report) {
    std::string out = "method,error,seconds\n";
    for (auto [name, score] : {std::pair{"supervised", report.supervised}, std::pair{"adapted", report.adapted},
                               std::pair{"unadapted", report.unadapted}}) {
        out += std::string(name) + "," + format_double(score.error) + "," + format_double(score.seconds) + "\n";
    }
    return out;
}

std::string stream_csv(const StreamReport& report) {
    std::string out = "step,adapted_error,unadapted_error,iterations,final_kl\n";
    for (const auto& s : report.steps) {
        out += std::to_string(s.step) + "," + format_double(s.adapted_error) + "," + format_double(s.unadapted_error) +
               "," + std::to_string(s.iterations) + "," + format_double(s.final_kl) + "\n";
    }
    out += "total," + format_double(report.mean_adapted_error) + "," + format_double(report.mean_unadapted_error) +
           ",," + format_double(report.total_seconds) + "\n";
    return out;
}

std::string multirun_csv(const MultiRunReport& report) {
    std::string out =
        "run,seed,supervised_error,adapted_error,unadapted_error,ordered,"
        "supervised_seconds,adapted_seconds,unadapted_seconds\n";
    for (std::size_t i = 0; i < report.runs.size(); ++i) {
        const auto& r = report.runs[i];
        out += std::to_string(i) + "," + std::to_string(r.seed) + "," + format_double(r.supervised.error) + "," +
               format_double(r.adapted.error) + "," + format_double(r.unadapted.error) + "," +
               (r.ordered() ? "1" : "0") + "," + format_double(r.supervised.seconds) + "," +
               format_double(r.adapted.seconds) + "," + format_double(r.unadapted.seconds) + "\n";
    }
    using R = ComparisonReport;
    const MethodScore sup = report.mean(&R::supervised);
    const MethodScore ada = report.mean(&R::adapted);
    const MethodScore una = report.mean(&R::unadapted);
    out += "mean,," + format_double(sup.error) + "," + format_double(ada.error) + "," + format_double(una.error) + "," +
           format_double(report.ordered_fraction()) + "," + format_double(sup.seconds) + "," +
           format_double(ada.seconds) + "," + format_double(una.seconds) + "\n";
    out += "std,," + format_double(report.stddev_error(&R::supervised)) + "," +
           format_double(report.stddev_error(&R::adapted)) + "," + format_double(report.stddev_error(&R::unadapted)) +
           ",,,,\n";
    return out;
}

std::string trace_csv(const AdaptationTrace& trace) {
    std::string out = "k,kl,step_size,label_changes\n";
    for (const auto& it : trace.iterations) {
        out += std::to_string(it.k) + "," + format_double(it.kl) + "," + format_double(it.step_size) + "," +
               std::to_string(it.label_changes) + "\n";
    }
    return out;
}

void export_report(const ComparisonReport& report, const std::filesystem::path& path, ReportFormat format) {
    write_text(path, format == ReportFormat::Csv ? comparison_csv(report) : comparison_json(report).dump(2) + "\n");
}

void export_report(const StreamReport& report, const std::filesystem::path& path, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        write_text(path, stream_csv(report));
        return;
    }
    nlohmann::ordered_json j;
    j["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : report.steps) {
        j["steps"].push_back({{"step", s.step},
                              {"adapted_error", s.adapted_error},
                              {"unadapted_error", s.unadapted_error},
                              {"iterations", s.iterations},
                              {"final_kl", s.final_kl}});
    }
    j["mean_adapted_error"] = report.mean_adapted_error;
    j["mean_unadapted_error"] = report.mean_unadapted_error;
    j["total_seconds"] = report.total_seconds;
    write_text(path, j.dump(2) + "\n");
}

void export_report(const MultiRunReport& report, const std::filesystem::path& path, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        write_text(path, multirun_csv(report));
        return;
    }
    nlohmann::ordered_json j;
    j["dataset"] = report.dataset;
    j["runs"] = nlohmann::ordered_json::array();
    for (const auto& r : report.runs) j["runs"].push_back(comparison_json(r));
    write_text(path, j.dump(2) + "\n");
}

ComparisonReport import_comparison_csv(const std::string& text) {
    const auto rows = csv_rows(text);
    if (rows.size() != 4 || rows[0] != std::vector<std::string>{"method", "error", "seconds"}) {
        throw Error(ErrorKind::ParseError, "not a comparison report");
    }
    ComparisonReport report;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].size() != 3) throw Error(ErrorKind::ParseError, "comparison row " + std::to_string(i));
        const MethodScore score{parse_double(rows[i][1]), parse_double(rows[i][2])};
        if (rows[i][0] == "supervised") report.supervised = score;
        else if (rows[i][0] == "adapted") report.adapted = score;
        else if (rows[i][0] == "unadapted") report.unadapted = score;
        else throw Error(ErrorKind::ParseError, "unknown method '" + rows[i][0] + "'");
    }
    return report;
}

StreamReport import_stream_csv(const std::string& text) {
    const auto rows = csv_rows(text);
    if (rows.size() < 2 || rows[0].size() != 5 || rows[0][0] != "step") {
        throw Error(ErrorKind::ParseError, "not a stream report");
    }
    StreamReport report;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& f = rows[i];
        if (f.size() != 5) throw Error(ErrorKind::ParseError, "stream row " + std::to_string(i));
        if (f[0] == "total") {
            report.mean_adapted_error = parse_double(f[1]);
            report.mean_unadapted_error = parse_double(f[2]);
            report.total_seconds = parse_double(f[4]);
            continue;
        }
        report.steps.push_back(
            {parse_count(f[0]), parse_double(f[1]), parse_double(f[2]), parse_count(f[3]), parse_double(f[4])});
    }
    return report;
}

}  // namespace driftadapt
