#pragma once

#include "driftadapt/core.hpp"

namespace driftadapt {

/// delta[i][y] = p_old[i][y] * ln(p_old[i][y] / p_new[i][y]). Entries are
/// signed; only their weighted sum is guaranteed nonnegative.
DriftTable pointwise_drift(const PosteriorTable& p_old, const PosteriorTable& p_new);

/// Inverts pointwise_drift: out[i][y] = p_old[i][y] * exp(-delta[i][y] / p_old[i][y]).
/// The result is not normalized and may exceed 1.
Matrix apply_drift(const PosteriorTable& p_old, const DriftTable& drift);

/// Density-weighted conditional KL, sum_i w[i] sum_y p_old ln(p_old / p_new).
/// Negative round-off is clamped to zero.
double conditional_kl(const PosteriorTable& p_old, const PosteriorTable& p_new, const WeightVector& w);

/// sum_i w[i] sum_y delta[i][y]; equals conditional_kl when the drift was
/// produced by pointwise_drift from the same pair.
double reconstruct_kl(const DriftTable& drift, const WeightVector& w);

/// KL between two weightings of the same discrete point set. Weights are
/// clamped to `floor` before taking logs.
double marginal_kl(const WeightVector& w_old, const WeightVector& w_new, double floor = kDefaultClampFloor);

/// Joint KL over the batch points: marginal term plus conditional term.
double joint_kl(const PosteriorTable& p_old, const PosteriorTable& p_new, const WeightVector& w_old,
                const WeightVector& w_new);

}  // namespace driftadapt
