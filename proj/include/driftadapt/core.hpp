#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "driftadapt/error.hpp"

namespace driftadapt {

using ClassIndex = std::size_t;
using Labels = std::vector<ClassIndex>;
using FeatureVector = std::span<const double>;

/// Default lower bound on posterior entries. Logs of posteriors stay above
/// ln(1e-12) ~ -27.6.
inline constexpr double kDefaultClampFloor = 1e-12;

/// Dense row-major matrix of doubles.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& values() const noexcept { return data_; }

    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// N x C class probabilities. Rows lie on the simplex with entries bounded
/// below by the clamp floor. Construction from a raw Matrix trusts the caller;
/// normalize_rows is the checked way to obtain one.
class PosteriorTable : public Matrix {
  public:
    PosteriorTable() = default;
    explicit PosteriorTable(Matrix m) : Matrix(std::move(m)) {}
    using Matrix::Matrix;

    std::size_t n_points() const noexcept { return rows(); }
    std::size_t n_classes() const noexcept { return cols(); }
};

/// N x C signed point-wise drifts.
class DriftTable : public Matrix {
  public:
    DriftTable() = default;
    explicit DriftTable(Matrix m) : Matrix(std::move(m)) {}
    using Matrix::Matrix;
};

/// Per-point importance weights; nonnegative and summing to one.
struct WeightVector {
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
    double operator[](std::size_t i) const { return weights[i]; }

    static WeightVector uniform(std::size_t n);
};

/// Non-empty set of points sharing one dimension.
class Batch {
  public:
    /// Throws InvalidArgument on an empty or non-finite point set.
    explicit Batch(Matrix points);
    explicit Batch(const std::vector<std::vector<double>>& points);

    std::size_t size() const noexcept { return points_.rows(); }
    std::size_t dim() const noexcept { return points_.cols(); }
    FeatureVector point(std::size_t i) const { return points_.row(i); }
    const Matrix& points() const noexcept { return points_; }

    Batch subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const Batch&, const Batch&) = default;

  private:
    Matrix points_;
};

struct LabeledBatch {
    Batch batch;
    Labels labels;

    /// Throws InvalidArgument when label count differs from batch size.
    LabeledBatch(Batch b, Labels l);

    std::size_t size() const noexcept { return batch.size(); }
    std::size_t dim() const noexcept { return batch.dim(); }
    /// max(label) + 1.
    std::size_t class_count() const;
    LabeledBatch subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const LabeledBatch&, const LabeledBatch&) = default;
};

/// Clamps every entry to [floor, 1] and scales each row to sum to one.
/// +inf clamps to 1, so an all-zero (underflowed) row comes out uniform.
/// A NaN or negative entry raises RowDegenerate.
PosteriorTable normalize_rows(const Matrix& table, double floor = kDefaultClampFloor);

/// Lowest class index attaining the row maximum.
ClassIndex argmax_row(const Matrix& table, std::size_t i);
Labels argmax_rows(const Matrix& table);

/// densities[i] / sum(densities). Throws AllZeroDensity if all are zero.
WeightVector point_weights(std::span<const double> densities);

/// Same normalization from log densities, shifted by the max so batches far
/// outside the model support do not underflow to zero.
WeightVector point_weights_from_log(std::span<const double> log_densities);

/// log(sum(exp(v))); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> values);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Strict full-string parse; throws ParseError on trailing garbage.
double parse_double(std::string_view text);

}  // namespace driftadapt
