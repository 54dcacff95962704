#include "driftadapt/adapt.hpp"

#include <cmath>

#include "driftadapt/divergence.hpp"

namespace driftadapt {

std::string_view to_string(WeightMode mode) { return mode == WeightMode::Density ? "density" : "uniform"; }

WeightMode parse_weight_mode(std::string_view text) {
    if (text == "density") return WeightMode::Density;
    if (text == "uniform") return WeightMode::Uniform;
    throw Error(ErrorKind::InvalidArgument, "unknown weight mode '" + std::string(text) + "'");
}

std::string_view to_string(Termination t) { return t == Termination::Converged ? "converged" : "max_iterations"; }

void AdaptationConfig::validate() const {
    if (!(step_constant > 0.0)) throw Error(ErrorKind::InvalidArgument, "step constant must be positive");
    if (!(tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "tolerance must be positive");
    if (max_iterations < 1) throw Error(ErrorKind::InvalidArgument, "max_iterations must be >= 1");
    if (!(clamp_floor > 0.0) || clamp_floor >= 1.0) throw Error(ErrorKind::InvalidArgument, "clamp floor out of (0,1)");
    if (!(variance_floor > 0.0)) throw Error(ErrorKind::InvalidArgument, "variance floor must be positive");
}

double step_size(std::size_t k, double c) { return c / std::sqrt(static_cast<double>(k) + 1.0); }

Matrix kl_gradient(const Matrix& p_hat, const PosteriorTable& p_bar, const PosteriorTable& p_t,
                   const WeightVector& w) {
    if (!p_hat.same_shape(p_bar) || !p_hat.same_shape(p_t) || w.size() != p_hat.rows()) {
        throw Error(ErrorKind::ShapeMismatch, "kl_gradient: inconsistent table shapes");
    }
    Matrix grad(p_hat.rows(), p_hat.cols());
    for (std::size_t i = 0; i < p_hat.rows(); ++i) {
        for (std::size_t y = 0; y < p_hat.cols(); ++y) {
            const double ph = p_hat(i, y);
            grad(i, y) = w[i] * (-ph / p_t(i, y)) * (1.0 + std::log(ph / p_bar(i, y)));
        }
    }
    return grad;
}

RefitResult refit_label_based(const Batch& batch, const Labels& labels, std::size_t n_classes,
                              const PosteriorTable& fallback, const AdaptationConfig& config) {
    std::vector<std::size_t> counts(n_classes, 0);
    for (ClassIndex y : labels) {
        if (y >= n_classes) throw Error(ErrorKind::InvalidArgument, "pseudo-label out of range");
        ++counts[y];
    }
    for (std::size_t c : counts) {
        if (c < 2) return {fallback, std::nullopt};
    }
    GnbModel refit = fit(LabeledBatch(batch, labels), config.variance_floor, n_classes);
    PosteriorTable probs = posterior(refit, batch, config.clamp_floor);
    return {std::move(probs), std::move(refit)};
}

AdaptationResult adapt_batch(const GnbModel& model, const Batch& batch, const AdaptationConfig& config) {
    config.validate();
    if (batch.dim() != model.dim) {
        throw Error(ErrorKind::DimensionMismatch,
                    "batch dimension " + std::to_string(batch.dim()) + " vs model " + std::to_string(model.dim));
    }
    if (batch.size() < 2 * model.n_classes) {
        throw Error(ErrorKind::BatchTooSmall, std::to_string(batch.size()) + " points for " +
                                                  std::to_string(model.n_classes) + " classes");
    }

    AdaptationResult result;
    result.initial_posteriors = posterior(model, batch, config.clamp_floor);
    result.weights = config.weight_mode == WeightMode::Density
                         ? point_weights_from_log(log_feature_densities(model, batch))
                         : WeightVector::uniform(batch.size());
    const PosteriorTable& p_t = result.initial_posteriors;
    const WeightVector& w = result.weights;

    PosteriorTable p_hat = p_t;
    DriftTable drift(batch.size(), model.n_classes, 0.0);
    Labels previous = argmax_rows(p_t);
    Labels labels = previous;

    result.trace.termination = Termination::MaxIterations;
    for (std::size_t k = 0; k < config.max_iterations; ++k) {
        labels = argmax_rows(p_hat);
        IterationRecord record;
        record.k = k;
        record.step_size = step_size(k, config.step_constant);
        for (std::size_t i = 0; i < labels.size(); ++i) record.label_changes += labels[i] != previous[i] ? 1 : 0;
        previous = labels;

        RefitResult refit = refit_label_based(batch, labels, model.n_classes, p_hat, config);
        record.refit_fallback = !refit.model.has_value();
        record.kl = conditional_kl(p_hat, refit.posteriors, w);
        result.trace.iterations.push_back(record);

        if (record.kl <= config.tolerance) {
            result.trace.termination = Termination::Converged;
            break;
        }
        const Matrix grad = kl_gradient(p_hat, refit.posteriors, p_t, w);
        for (std::size_t i = 0; i < drift.rows(); ++i) {
            for (std::size_t y = 0; y < drift.cols(); ++y) drift(i, y) -= record.step_size * grad(i, y);
        }
        p_hat = normalize_rows(apply_drift(p_t, drift), config.clamp_floor);
    }

    result.labels = argmax_rows(p_hat);
    result.posteriors = std::move(p_hat);
    result.drifts = std::move(drift);
    // Carry the model forward; if the final labels cannot support a refit the
    // incoming model is kept.
    try {
        result.updated_model = fit(LabeledBatch(batch, result.labels), config.variance_floor, model.n_classes);
        result.updated_model.class_names = model.class_names;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::ClassUnderpopulated) throw;
        result.updated_model = model;
    }
    return result;
}

std::vector<AdaptationResult> sequential_adapt(const GnbModel& model0, const std::vector<Batch>& batches,
                                               const AdaptationConfig& config) {
    std::vector<AdaptationResult> results;
    results.reserve(batches.size());
    GnbModel current = model0;
    for (std::size_t s = 0; s < batches.size(); ++s) {
        try {
            results.push_back(adapt_batch(current, batches[s], config));
        } catch (const Error& e) {
            throw Error(e.kind(), "step " + std::to_string(s) + ": " + e.what());
        }
        current = results.back().updated_model;
    }
    return results;
}

}  // namespace driftadapt
