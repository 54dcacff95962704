// driftadapt: command-line front end for training, prediction, unsupervised
// adaptation, synthetic data generation and benchmarks.
//
// Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "driftadapt/adapt.hpp"
#include "driftadapt/bench.hpp"
#include "driftadapt/classifier.hpp"
#include "driftadapt/datagen.hpp"

namespace fs = std::filesystem;
using namespace driftadapt;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigOptions {
    double c = 50.0;
    double tol = 1e-10;
    std::size_t max_iters = 10;
    std::string weights = "density";

    void attach(CLI::App* app) {
        app->add_option("--c", c, "step-size constant (gamma_k = c / sqrt(k + 1))")->capture_default_str();
        app->add_option("--tol", tol, "KL convergence tolerance")->capture_default_str();
        app->add_option("--max-iters", max_iters, "maximum adaptation iterations")->capture_default_str();
        app->add_option("--weights", weights, "KL point weighting")
            ->check(CLI::IsMember({"density", "uniform"}))
            ->capture_default_str();
    }

    AdaptationConfig build(double variance_floor = kDefaultVarianceFloor) const {
        AdaptationConfig config;
        config.step_constant = c;
        config.tolerance = tol;
        config.max_iterations = max_iters;
        config.weight_mode = parse_weight_mode(weights);
        config.variance_floor = variance_floor;
        try {
            config.validate();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        return config;
    }
};

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    out << text;
}

/// Reads feature rows for a model of dimension `dim`; a trailing extra column
/// is taken to be a label and ignored.
Batch read_features(const fs::path& path, std::size_t dim) {
    CsvTable table = read_csv(path, std::nullopt);
    if (table.features.cols() == dim + 1) table = read_csv(path, kLastColumn);
    if (table.features.cols() != dim) {
        throw Error(ErrorKind::DimensionMismatch, path.string() + " has " + std::to_string(table.features.cols()) +
                                                      " feature columns; model expects " + std::to_string(dim));
    }
    return Batch(std::move(table.features));
}

void write_predictions(const fs::path& path, const GnbModel& model, const Labels& labels, const PosteriorTable& probs) {
    std::string out = "label";
    for (std::size_t c = 0; c < model.n_classes; ++c) out += ",p_" + std::to_string(c);
    out += "\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += model.class_names.empty() ? std::to_string(labels[i]) : model.class_names[labels[i]];
        for (std::size_t c = 0; c < model.n_classes; ++c) out += "," + format_double(probs(i, c));
        out += "\n";
    }
    write_file(path, out);
}

void write_batches(const fs::path& dir, const std::vector<LabeledBatch>& batches) {
    fs::create_directories(dir);
    for (std::size_t s = 0; s < batches.size(); ++s) {
        char name[32];
        std::snprintf(name, sizeof(name), "batch_%03zu.csv", s);
        write_csv(dir / name, batches[s]);
    }
}

void print_multirun(const MultiRunReport& report) {
    using R = ComparisonReport;
    std::printf("%s: %zu runs\n", report.dataset.c_str(), report.runs.size());
    for (auto [name, method] : {std::pair{"supervised", &R::supervised}, std::pair{"adapted", &R::adapted},
                                std::pair{"unadapted", &R::unadapted}}) {
        std::printf("  %-10s error %6.3f%% (sd %.3f%%)  mean %.4fs\n", name, 100.0 * report.mean(method).error,
                    100.0 * report.stddev_error(method), report.mean(method).seconds);
    }
    std::printf("  ordering supervised <= adapted <= unadapted in %.0f%% of runs\n", 100.0 * report.ordered_fraction());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Unsupervised adaptation of Gaussian Naive Bayes models under gradual concept drift"};
    app.require_subcommand(1);

    // train
    auto* train = app.add_subcommand("train", "fit a model on a labelled CSV (label in the last column)");
    std::string train_input, train_model;
    double variance_floor = kDefaultVarianceFloor;
    train->add_option("--input", train_input)->required();
    train->add_option("--model", train_model)->required();
    train->add_option("--variance-floor", variance_floor)->capture_default_str();

    // predict
    auto* predict_cmd = app.add_subcommand("predict", "predict labels with a saved model");
    std::string predict_model, predict_input, predict_out;
    predict_cmd->add_option("--model", predict_model)->required();
    predict_cmd->add_option("--input", predict_input)->required();
    predict_cmd->add_option("--out", predict_out)->required();

    // adapt
    auto* adapt_cmd = app.add_subcommand("adapt", "adapt a saved model to an unlabeled batch");
    std::string adapt_model, adapt_input, adapt_out, adapt_trace, adapt_update;
    ConfigOptions adapt_opts;
    adapt_cmd->add_option("--model", adapt_model)->required();
    adapt_cmd->add_option("--input", adapt_input)->required();
    adapt_cmd->add_option("--out", adapt_out)->required();
    adapt_opts.attach(adapt_cmd);
    adapt_cmd->add_option("--trace", adapt_trace, "write k,kl,step_size,label_changes");
    adapt_cmd->add_option("--update-model", adapt_update, "save the model refit on the adapted labels");

    // bench
    auto* bench = app.add_subcommand("bench", "benchmarks");
    bench->require_subcommand(1);
    std::uint64_t bench_seed = 0;
    std::size_t bench_runs = 20;
    std::string bench_out, stream_spec_path, stream_csv_path;
    std::size_t stream_batch = 0;
    ConfigOptions bench_opts;
    auto* bench_synth = bench->add_subcommand("synthetic", "two-Gaussian drift, supervised vs adapted vs unadapted");
    auto* bench_sea = bench->add_subcommand("sea", "SEA-style threshold drift stand-in");
    auto* bench_stream = bench->add_subcommand("stream", "error over time on a drifting stream");
    for (auto* sub : {bench_synth, bench_sea}) {
        sub->add_option("--seed", bench_seed)->required();
        sub->add_option("--runs", bench_runs)->capture_default_str()->check(CLI::PositiveNumber);
        sub->add_option("--out", bench_out);
        bench_opts.attach(sub);
    }
    auto* spec_opt = bench_stream->add_option("--spec", stream_spec_path, "stream spec document");
    auto* csv_opt = bench_stream->add_option("--csv", stream_csv_path, "CSV file or directory of CSV files");
    auto* batch_opt = bench_stream->add_option("--batch-size", stream_batch)->check(CLI::PositiveNumber);
    spec_opt->excludes(csv_opt);
    csv_opt->needs(batch_opt);
    bench_stream->add_option("--seed", bench_seed)->required();
    bench_stream->add_option("--out", bench_out);
    bench_opts.attach(bench_stream);

    // gen
    auto* gen = app.add_subcommand("gen", "write synthetic batches as CSV");
    gen->require_subcommand(1);
    std::string gen_spec, gen_out;
    auto* gen_two = gen->add_subcommand("two-gaussian", "two-Gaussian drift batches");
    auto* gen_sea = gen->add_subcommand("sea", "SEA-style stand-in batches");
    auto* gen_stream = gen->add_subcommand("stream", "linearly drifting stream");
    for (auto* sub : {gen_two, gen_sea, gen_stream}) {
        sub->add_option("--spec", gen_spec)->required();
        sub->add_option("--out", gen_out)->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*train) {
            const CsvTable table = read_csv(train_input, kLastColumn);
            LabeledBatch data(Batch(table.features), *table.labels);
            GnbModel model = fit(data, variance_floor);
            model.class_names = table.class_names;
            save_model(model, train_model);
            std::printf("trained %zu classes on %zu points (dim %zu)\n", model.n_classes, data.size(), data.dim());
        } else if (*predict_cmd) {
            const GnbModel model = load_model(predict_model);
            const Batch batch = read_features(predict_input, model.dim);
            const PosteriorTable probs = posterior(model, batch);
            write_predictions(predict_out, model, argmax_rows(probs), probs);
        } else if (*adapt_cmd) {
            const AdaptationConfig config = adapt_opts.build();
            const GnbModel model = load_model(adapt_model);
            const Batch batch = read_features(adapt_input, model.dim);
            const AdaptationResult result = adapt_batch(model, batch, config);
            write_predictions(adapt_out, model, result.labels, result.posteriors);
            if (!adapt_trace.empty()) write_file(adapt_trace, trace_csv(result.trace));
            if (!adapt_update.empty()) save_model(result.updated_model, adapt_update);
            const auto& last = result.trace.iterations.back();
            std::printf("%zu iterations (%s), final KL %s\n", result.trace.iterations.size(),
                        std::string(to_string(result.trace.termination)).c_str(), format_double(last.kl).c_str());
        } else if (*bench) {
            const AdaptationConfig config = bench_opts.build();
            if (*bench_synth || *bench_sea) {
                const MultiRunReport report = *bench_synth ? run_synthetic_bench(bench_seed, bench_runs, config)
                                                           : run_sea_bench(bench_seed, bench_runs, config);
                print_multirun(report);
                if (!bench_out.empty()) export_report(report, bench_out, ReportFormat::Csv);
            } else {
                std::vector<LabeledBatch> stream;
                if (!stream_csv_path.empty()) {
                    stream = load_csv_stream(stream_csv_path, stream_batch);
                } else {
                    StreamSpec spec = stream_spec_path.empty() ? StreamSpec::linear_drift_defaults(bench_seed)
                                                               : stream_spec_from_json(read_text_file(stream_spec_path));
                    spec.seed = bench_seed;
                    stream = gen_drifting_stream(spec);
                }
                const StreamReport report = run_stream_eval(stream, config);
                std::printf("%zu steps: mean adapted error %.3f%%, mean unadapted error %.3f%%, %.3fs\n",
                            report.steps.size(), 100.0 * report.mean_adapted_error,
                            100.0 * report.mean_unadapted_error, report.total_seconds);
                if (!bench_out.empty()) export_report(report, bench_out, ReportFormat::Csv);
            }
        } else if (*gen) {
            const std::string text = read_text_file(gen_spec);
            std::vector<LabeledBatch> batches;
            if (*gen_two) {
                batches = gen_gaussian_steps(gaussian_spec_from_json(text));
            } else if (*gen_sea) {
                auto [init, drift] = gen_modified_sea(sea_spec_from_json(text));
                batches = {std::move(init), std::move(drift)};
            } else {
                batches = gen_drifting_stream(stream_spec_from_json(text));
            }
            write_batches(gen_out, batches);
            std::printf("wrote %zu batches to %s\n", batches.size(), gen_out.c_str());
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_numeric() ? kExitNumeric : kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
