#include "driftadapt/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <system_error>

namespace driftadapt {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::RowDegenerate: return "RowDegenerate";
        case ErrorKind::AllZeroDensity: return "AllZeroDensity";
        case ErrorKind::ClassUnderpopulated: return "ClassUnderpopulated";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::BatchTooSmall: return "BatchTooSmall";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::DimensionError: return "DimensionError";
        case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw Error(ErrorKind::ShapeMismatch, "matrix data does not match " +
                                                  std::to_string(rows_) + "x" + std::to_string(cols_));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw Error(ErrorKind::ShapeMismatch, "ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

WeightVector WeightVector::uniform(std::size_t n) {
    return WeightVector{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

Batch::Batch(Matrix points) : points_(std::move(points)) {
    if (points_.rows() == 0 || points_.cols() == 0) {
        throw Error(ErrorKind::InvalidArgument, "batch must be non-empty with positive dimension");
    }
    for (double v : points_.values()) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "batch contains a non-finite feature");
    }
}

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& points) {
    const std::size_t dim = points.empty() ? 0 : points.front().size();
    std::vector<double> flat;
    flat.reserve(points.size() * dim);
    for (const auto& p : points) {
        if (p.size() != dim) throw Error(ErrorKind::DimensionMismatch, "points differ in dimension");
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return Matrix(points.size(), dim, std::move(flat));
}

}  // namespace

Batch::Batch(const std::vector<std::vector<double>>& points) : Batch(to_matrix(points)) {}

Batch Batch::subset(std::span<const std::size_t> indices) const {
    std::vector<double> flat;
    flat.reserve(indices.size() * dim());
    for (std::size_t i : indices) {
        auto p = point(i);
        flat.insert(flat.end(), p.begin(), p.end());
    }
    return Batch(Matrix(indices.size(), dim(), std::move(flat)));
}

LabeledBatch::LabeledBatch(Batch b, Labels l) : batch(std::move(b)), labels(std::move(l)) {
    if (labels.size() != batch.size()) {
        throw Error(ErrorKind::InvalidArgument, "label count " + std::to_string(labels.size()) +
                                                    " differs from batch size " + std::to_string(batch.size()));
    }
}

std::size_t LabeledBatch::class_count() const {
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

LabeledBatch LabeledBatch::subset(std::span<const std::size_t> indices) const {
    Labels sub;
    sub.reserve(indices.size());
    for (std::size_t i : indices) sub.push_back(labels[i]);
    return LabeledBatch(batch.subset(indices), std::move(sub));
}

PosteriorTable normalize_rows(const Matrix& table, double floor) {
    PosteriorTable out(table);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        for (double& v : row) {
            if (std::isnan(v) || v < 0.0) {
                throw Error(ErrorKind::RowDegenerate, "row " + std::to_string(i) + " has a NaN or negative entry");
            }
            v = std::clamp(v, floor, 1.0);
        }
        const double sum = std::accumulate(row.begin(), row.end(), 0.0);
        for (double& v : row) v /= sum;
    }
    return out;
}

ClassIndex argmax_row(const Matrix& table, std::size_t i) {
    if (i >= table.rows()) throw Error(ErrorKind::InvalidArgument, "row index out of range");
    auto row = table.row(i);
    // max_element returns the first maximum, which is the tie-break we want.
    return static_cast<ClassIndex>(std::max_element(row.begin(), row.end()) - row.begin());
}

Labels argmax_rows(const Matrix& table) {
    Labels out(table.rows());
    for (std::size_t i = 0; i < table.rows(); ++i) out[i] = argmax_row(table, i);
    return out;
}

WeightVector point_weights(std::span<const double> densities) {
    double sum = 0.0;
    for (double d : densities) {
        if (!std::isfinite(d) || d < 0.0) throw Error(ErrorKind::InvalidArgument, "density must be finite and >= 0");
        sum += d;
    }
    if (!(sum > 0.0)) throw Error(ErrorKind::AllZeroDensity, "every point has zero density under the model");
    WeightVector w{std::vector<double>(densities.begin(), densities.end())};
    for (double& v : w.weights) v /= sum;
    return w;
}

WeightVector point_weights_from_log(std::span<const double> log_densities) {
    if (log_densities.empty()) throw Error(ErrorKind::InvalidArgument, "empty density vector");
    const double top = *std::max_element(log_densities.begin(), log_densities.end());
    if (std::isnan(top) || top == -std::numeric_limits<double>::infinity()) {
        throw Error(ErrorKind::AllZeroDensity, "every point has zero density under the model");
    }
    std::vector<double> shifted(log_densities.size());
    std::transform(log_densities.begin(), log_densities.end(), shifted.begin(),
                   [top](double l) { return std::exp(l - top); });
    return point_weights(shifted);
}

double log_sum_exp(std::span<const double> values) {
    constexpr double neg_inf = -std::numeric_limits<double>::infinity();
    if (values.empty()) return neg_inf;
    const double top = *std::max_element(values.begin(), values.end());
    if (top == neg_inf || !std::isfinite(top)) return top;
    double sum = 0.0;
    for (double v : values) sum += std::exp(v - top);
    return top + std::log(sum);
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw Error(ErrorKind::InvalidArgument, "cannot format double");
    return std::string(buf, end);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorKind::ParseError, "not a number: '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace driftadapt
