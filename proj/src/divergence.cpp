#include "driftadapt/divergence.hpp"

#include <algorithm>
#include <cmath>

namespace driftadapt {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (!a.same_shape(b)) {
        throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": " + std::to_string(a.rows()) + "x" +
                                                  std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                                  "x" + std::to_string(b.cols()));
    }
}

void require_weights(const Matrix& table, const WeightVector& w, const char* what) {
    if (w.size() != table.rows()) {
        throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": " + std::to_string(w.size()) +
                                                  " weights for " + std::to_string(table.rows()) + " points");
    }
}

}  // namespace

DriftTable pointwise_drift(const PosteriorTable& p_old, const PosteriorTable& p_new) {
    require_same_shape(p_old, p_new, "pointwise_drift");
    DriftTable drift(p_old.rows(), p_old.cols());
    for (std::size_t i = 0; i < p_old.rows(); ++i) {
        for (std::size_t y = 0; y < p_old.cols(); ++y) {
            const double p = p_old(i, y);
            drift(i, y) = p * std::log(p / p_new(i, y));
        }
    }
    return drift;
}

Matrix apply_drift(const PosteriorTable& p_old, const DriftTable& drift) {
    require_same_shape(p_old, drift, "apply_drift");
    Matrix out(p_old.rows(), p_old.cols());
    for (std::size_t i = 0; i < p_old.rows(); ++i) {
        for (std::size_t y = 0; y < p_old.cols(); ++y) {
            const double p = p_old(i, y);
            out(i, y) = p * std::exp(-drift(i, y) / p);
        }
    }
    return out;
}

double conditional_kl(const PosteriorTable& p_old, const PosteriorTable& p_new, const WeightVector& w) {
    require_same_shape(p_old, p_new, "conditional_kl");
    require_weights(p_old, w, "conditional_kl");
    double total = 0.0;
    for (std::size_t i = 0; i < p_old.rows(); ++i) {
        double row = 0.0;
        for (std::size_t y = 0; y < p_old.cols(); ++y) {
            const double p = p_old(i, y);
            row += p * std::log(p / p_new(i, y));
        }
        total += w[i] * row;
    }
    return std::max(total, 0.0);
}

double reconstruct_kl(const DriftTable& drift, const WeightVector& w) {
    require_weights(drift, w, "reconstruct_kl");
    double total = 0.0;
    for (std::size_t i = 0; i < drift.rows(); ++i) {
        double row = 0.0;
        for (double d : drift.row(i)) row += d;
        total += w[i] * row;
    }
    return total;
}

double marginal_kl(const WeightVector& w_old, const WeightVector& w_new, double floor) {
    if (w_old.size() != w_new.size()) throw Error(ErrorKind::ShapeMismatch, "marginal_kl: weight lengths differ");
    double total = 0.0;
    for (std::size_t i = 0; i < w_old.size(); ++i) {
        const double a = std::max(w_old[i], floor);
        const double b = std::max(w_new[i], floor);
        total += w_old[i] * std::log(a / b);
    }
    return std::max(total, 0.0);
}

double joint_kl(const PosteriorTable& p_old, const PosteriorTable& p_new, const WeightVector& w_old,
                const WeightVector& w_new) {
    return marginal_kl(w_old, w_new) + conditional_kl(p_old, p_new, w_old);
}

}  // namespace driftadapt
