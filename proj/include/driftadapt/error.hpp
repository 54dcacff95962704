#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace driftadapt {

enum class ErrorKind {
    RowDegenerate,
    AllZeroDensity,
    ClassUnderpopulated,
    ShapeMismatch,
    DimensionMismatch,
    BatchTooSmall,
    InvalidArgument,
    ParseError,
    DimensionError,
    UnsupportedVersion,
    IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library. `kind()` lets callers (the CLI in
/// particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// True for failures caused by the numbers themselves rather than by
    /// malformed input.
    bool is_numeric() const noexcept {
        return kind_ == ErrorKind::RowDegenerate || kind_ == ErrorKind::AllZeroDensity;
    }

  private:
    ErrorKind kind_;
};

}  // namespace driftadapt
