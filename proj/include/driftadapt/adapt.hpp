#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "driftadapt/classifier.hpp"
#include "driftadapt/core.hpp"

namespace driftadapt {

enum class WeightMode { Density, Uniform };

std::string_view to_string(WeightMode mode);
WeightMode parse_weight_mode(std::string_view text);

struct AdaptationConfig {
    double step_constant = 50.0;
    std::size_t max_iterations = 10;
    double tolerance = 1e-10;
    double clamp_floor = kDefaultClampFloor;
    WeightMode weight_mode = WeightMode::Density;
    /// Used when refitting on pseudo-labels.
    double variance_floor = kDefaultVarianceFloor;

    /// Throws InvalidArgument on a non-positive constant, tolerance or
    /// iteration budget.
    void validate() const;
};

enum class Termination { Converged, MaxIterations };

std::string_view to_string(Termination t);

struct IterationRecord {
    std::size_t k = 0;
    double kl = 0.0;
    double step_size = 0.0;
    /// Labels that differ from the previous iteration's labels (from the
    /// unadapted prediction at k = 0, so always 0 there).
    std::size_t label_changes = 0;
    /// Pseudo-labels could not support a refit; the label-based posterior
    /// was replaced by the drift-based one.
    bool refit_fallback = false;
};

struct AdaptationTrace {
    std::vector<IterationRecord> iterations;
    Termination termination = Termination::MaxIterations;
};

struct AdaptationResult {
    PosteriorTable posteriors;
    DriftTable drifts;
    Labels labels;
    AdaptationTrace trace;
    GnbModel updated_model;
    /// Posterior of the incoming model on the batch; every drift-based update
    /// is applied to this table.
    PosteriorTable initial_posteriors;
    WeightVector weights;
};

/// c / sqrt(k + 1).
double step_size(std::size_t k, double c);

/// Gradient of sum_i w_i sum_y p_hat ln(p_hat / p_bar) with respect to the
/// drifts, where p_hat = p_t * exp(-delta / p_t) and p_bar, w are held fixed:
///   G[i][y] = -w_i * (p_hat / p_t) * (1 + ln(p_hat / p_bar)).
/// The descent direction is -G.
Matrix kl_gradient(const Matrix& p_hat, const PosteriorTable& p_bar, const PosteriorTable& p_t,
                   const WeightVector& w);

struct RefitResult {
    PosteriorTable posteriors;
    std::optional<GnbModel> model;  // empty when the pseudo-labels cannot support a fit
};

/// Fits a model on the pseudo-labelled batch and evaluates its posterior on
/// the same points. Falls back (empty model, `fallback` posteriors) when some
/// class has fewer than two points.
RefitResult refit_label_based(const Batch& batch, const Labels& labels, std::size_t n_classes,
                              const PosteriorTable& fallback, const AdaptationConfig& config);

/// Unsupervised adaptation of `model` to an unlabeled batch: alternates
/// pseudo-label refits with gradient steps on the point-wise drifts until the
/// KL between drift-based and label-based posteriors drops below tolerance.
AdaptationResult adapt_batch(const GnbModel& model, const Batch& batch, const AdaptationConfig& config = {});

/// Runs adapt_batch over consecutive batches, carrying each updated model
/// forward. Errors are rethrown with the failing step index.
std::vector<AdaptationResult> sequential_adapt(const GnbModel& model0, const std::vector<Batch>& batches,
                                               const AdaptationConfig& config = {});

}  // namespace driftadapt
