#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "driftadapt/adapt.hpp"
#include "driftadapt/core.hpp"

namespace driftadapt {

inline constexpr std::size_t kCrossValidationFolds = 10;

/// Mean held-out error of GNB over `folds` contiguous folds of a seeded
/// shuffle of `data`.
double cross_validation_error(const LabeledBatch& data, std::size_t folds, std::uint64_t seed,
                              double variance_floor = kDefaultVarianceFloor);

struct MethodScore {
    double error = 0.0;
    double seconds = 0.0;
};

/// Supervised (best case), adapted, and unadapted (worst case) errors on one
/// drifted batch.
struct ComparisonReport {
    MethodScore supervised;
    MethodScore adapted;
    MethodScore unadapted;
    std::string dataset;
    std::uint64_t seed = 0;
    std::size_t n_train = 0;
    std::size_t n_drifted = 0;
    AdaptationConfig config;
    AdaptationTrace trace;

    bool ordered() const noexcept {
        return supervised.error <= adapted.error && adapted.error <= unadapted.error;
    }
};

/// Fits on `train`, then scores the three methods on `drifted`. Only the
/// features of `drifted` are handed to the adaptation; its labels are used for
/// scoring and for the cross-validated supervised baseline.
ComparisonReport run_comparison(const LabeledBatch& train, const LabeledBatch& drifted,
                                const AdaptationConfig& config = {}, std::uint64_t seed = 0,
                                std::string dataset = "custom");

struct StreamStep {
    std::size_t step = 0;
    double adapted_error = 0.0;
    double unadapted_error = 0.0;
    std::size_t iterations = 0;
    double final_kl = 0.0;
};

struct StreamReport {
    std::vector<StreamStep> steps;
    double mean_adapted_error = 0.0;
    double mean_unadapted_error = 0.0;
    double total_seconds = 0.0;
};

/// Trains on stream[0]; for every later batch records the frozen model's
/// error and the error of the model carried forward by sequential adaptation.
StreamReport run_stream_eval(const std::vector<LabeledBatch>& stream, const AdaptationConfig& config = {});

struct MultiRunReport {
    std::string dataset;
    std::vector<ComparisonReport> runs;

    MethodScore mean(MethodScore ComparisonReport::*method) const;
    double stddev_error(MethodScore ComparisonReport::*method) const;
    double ordered_fraction() const;
};

/// `runs` repetitions of the two-Gaussian experiment, run r using seed + r.
MultiRunReport run_synthetic_bench(std::uint64_t seed, std::size_t runs, const AdaptationConfig& config = {});
/// Same protocol on the SEA-style stand-in.
MultiRunReport run_sea_bench(std::uint64_t seed, std::size_t runs, const AdaptationConfig& config = {});

// ---------------------------------------------------------------- export

enum class ReportFormat { Csv, KeyValue };

/// CSV: `method,error,seconds` with rows supervised, adapted, unadapted.
/// Key-value: JSON document with every report field.
void export_report(const ComparisonReport& report, const std::filesystem::path& path, ReportFormat format);
/// CSV: `step,adapted_error,unadapted_error,iterations,final_kl` per step,
/// then a `total` row carrying the means and total seconds.
void export_report(const StreamReport& report, const std::filesystem::path& path, ReportFormat format);
/// CSV: one row per run, then `mean` and `std` rows.
void export_report(const MultiRunReport& report, const std::filesystem::path& path, ReportFormat format);

std::string comparison_csv(const ComparisonReport& report);
std::string stream_csv(const StreamReport& report);
std::string multirun_csv(const MultiRunReport& report);

/// Inverse of the CSV exports (values only; metadata is not in the CSV).
ComparisonReport import_comparison_csv(const std::string& text);
StreamReport import_stream_csv(const std::string& text);

/// Writes the adaptation trace as `k,kl,step_size,label_changes`.
std::string trace_csv(const AdaptationTrace& trace);

}  // namespace driftadapt
