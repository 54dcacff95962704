#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "driftadapt/core.hpp"

namespace driftadapt {

using ClassMatrix = std::vector<std::vector<double>>;  // C x d

/// Class-conditional diagonal Gaussians whose parameters change per time step.
struct GaussianDriftSpec {
    std::vector<double> priors;
    std::vector<ClassMatrix> means;      // one C x d matrix per time step
    std::vector<ClassMatrix> variances;  // one C x d matrix per time step (diagonal covariance)
    std::vector<std::size_t> sizes;      // points per time step
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t n_steps() const noexcept { return sizes.size(); }

    /// Two classes, P(y=1) = 0.7, class 0 fixed at (1,1), class 1 moving from
    /// (-1,-1) to (-2,-2), identity covariances, 10000 then 1000 points.
    static GaussianDriftSpec two_gaussian_defaults(std::uint64_t seed);
};

/// One labelled batch per time step.
std::vector<LabeledBatch> gen_gaussian_steps(const GaussianDriftSpec& spec);

/// First two time steps of `spec`: (batch at t, batch at t+1).
std::pair<LabeledBatch, LabeledBatch> gen_two_gaussian(const GaussianDriftSpec& spec);

/// SEA-style stand-in: three uniform features on [0,10], label 1 iff
/// f1 + f2 <= threshold, points with f1 + f2 within `band_half_width` of the
/// threshold rejected. The threshold moves between the two batches.
struct SeaSpec {
    std::size_t n_init = 10000;
    std::size_t n_drift = 1000;
    double theta_init = 8.0;
    double theta_drift = 9.0;
    double band_half_width = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

std::pair<LabeledBatch, LabeledBatch> gen_modified_sea(const SeaSpec& spec);
std::pair<LabeledBatch, LabeledBatch> gen_modified_sea(std::uint64_t seed, std::size_t n_init, std::size_t n_drift);

/// SEA label rule.
ClassIndex sea_label(double f1, double f2, double theta);

/// Class means travel linearly from `start_means` to `end_means` over
/// `n_steps` batches; step s sits at fraction s / (n_steps - 1).
struct StreamSpec {
    std::size_t n_steps = 20;
    ClassMatrix start_means;
    ClassMatrix end_means;
    ClassMatrix variances;
    std::vector<double> priors;
    std::size_t batch_size = 1000;
    std::uint64_t seed = 0;

    void validate() const;
    ClassMatrix means_at(std::size_t step) const;

    /// 20 steps; class 0 fixed at (1,1); class 1 from (-1,-1) to (-4,-4);
    /// identity covariances; P(y=1) = 0.7; 1000 points per step.
    static StreamSpec linear_drift_defaults(std::uint64_t seed);
};

std::vector<LabeledBatch> gen_drifting_stream(const StreamSpec& spec);

// Spec documents (JSON objects whose keys mirror the struct fields; missing
// keys keep the defaults above).
GaussianDriftSpec gaussian_spec_from_json(const std::string& text);
SeaSpec sea_spec_from_json(const std::string& text);
StreamSpec stream_spec_from_json(const std::string& text);
std::string stream_spec_to_json(const StreamSpec& spec);
std::string read_text_file(const std::filesystem::path& path);

// ---------------------------------------------------------------- CSV

/// Sentinel for "the last column holds the label".
inline constexpr std::size_t kLastColumn = std::numeric_limits<std::size_t>::max();

struct CsvTable {
    Matrix features;
    std::optional<Labels> labels;
    /// Index -> original label token. Integer tokens map to themselves.
    std::vector<std::string> class_names;
    bool had_header = false;
};

/// Parses CSV text. The header row is optional and detected by a
/// non-numeric first row. `label_column` of nullopt means every column is a
/// feature. Throws ParseError(line) or DimensionError on ragged rows.
CsvTable parse_csv(const std::string& text, std::optional<std::size_t> label_column = kLastColumn);
CsvTable read_csv(const std::filesystem::path& path, std::optional<std::size_t> label_column = kLastColumn);

/// Writes `f0,...,f{d-1}[,y]` with round-trip precision.
void write_csv(const std::filesystem::path& path, const Matrix& features, const Labels* labels = nullptr);
void write_csv(const std::filesystem::path& path, const LabeledBatch& data);

/// Reads one CSV file, or every *.csv in a directory in name order, and
/// cuts the rows into consecutive batches of `batch_size`. A trailing partial
/// batch is kept if it holds at least 2*C rows, otherwise merged into the
/// previous batch.
std::vector<LabeledBatch> load_csv_stream(const std::filesystem::path& path, std::size_t batch_size,
                                          std::size_t label_column = kLastColumn);

/// Row ranges [begin, end) produced by the batching rule above.
std::vector<std::pair<std::size_t, std::size_t>> batch_ranges(std::size_t rows, std::size_t batch_size,
                                                              std::size_t min_tail);

}  // namespace driftadapt
