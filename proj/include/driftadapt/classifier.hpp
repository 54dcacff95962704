#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "driftadapt/core.hpp"

namespace driftadapt {

inline constexpr double kDefaultVarianceFloor = 1e-6;

/// Gaussian Naive Bayes parameters: class priors and per-class diagonal
/// Gaussians. Supplies both the posterior P(y|x) and the mixture density f(x).
struct GnbModel {
    std::size_t n_classes = 0;
    std::size_t dim = 0;
    std::vector<double> priors;                   // C
    std::vector<std::vector<double>> means;       // C x d
    std::vector<std::vector<double>> variances;   // C x d
    std::vector<std::string> class_names;         // C; defaults to "0", "1", ...

    /// Throws InvalidArgument if any invariant (shapes, prior simplex,
    /// positive finite variances) is violated.
    void validate() const;

    friend bool operator==(const GnbModel&, const GnbModel&) = default;
};

/// Maximum-likelihood fit: class frequencies for priors, per-class mean and
/// population (1/n) variance floored at `variance_floor`.
/// `n_classes` defaults to max(label) + 1. Every class needs >= 2 points,
/// otherwise ClassUnderpopulated.
GnbModel fit(const LabeledBatch& data, double variance_floor = kDefaultVarianceFloor,
             std::optional<std::size_t> n_classes = std::nullopt);

double log_class_conditional_density(const GnbModel& model, FeatureVector x, ClassIndex y);
double class_conditional_density(const GnbModel& model, FeatureVector x, ClassIndex y);

/// log sum_y prior[y] f(x|y), evaluated with log-sum-exp.
double log_feature_density(const GnbModel& model, FeatureVector x);
double feature_density(const GnbModel& model, FeatureVector x);

std::vector<double> log_feature_densities(const GnbModel& model, const Batch& batch);

/// Bayes-rule posterior for every point, computed in log space, clamped to
/// `floor` and row-normalized.
PosteriorTable posterior(const GnbModel& model, const Batch& batch, double floor = kDefaultClampFloor);

Labels predict(const GnbModel& model, const Batch& batch);

/// Fraction of mismatching labels.
double error_rate(const Labels& predicted, const Labels& truth);

// Persistence. The document is JSON with `version` = 1; doubles are written
// in shortest round-trip form so a reload is bit-exact.
std::string model_to_json(const GnbModel& model);
GnbModel model_from_json(const std::string& text);
void save_model(const GnbModel& model, const std::filesystem::path& path);
GnbModel load_model(const std::filesystem::path& path);

}  // namespace driftadapt
