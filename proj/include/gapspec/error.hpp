#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gapspec {

/// Error categories raised by the library. The numeric values are part of
/// the C ABI (see gapspec.h) and must not be reordered.
enum class Errc : int {
    invalid_argument = 1,
    length_mismatch = 2,
    negative_weight = 3,
    non_binary_weight = 4,
    all_invalid = 5,
    non_positive_dt = 6,
    parse_error = 7,
    insufficient_pair_coverage = 8,
    dt_mismatch = 9,
    singular_window = 10,
    singular_matrix = 11,
    fingerprint_mismatch = 12,
    window_mismatch = 13,
    dimension_mismatch = 14,
    window_too_narrow = 15,
    too_few_samples = 16,
    io_error = 17,
    config_error = 18,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    [[nodiscard]] Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised when one or more requested lags have no valid sample pair.
class PairCoverageError : public Error {
public:
    explicit PairCoverageError(std::vector<int> lags);

    [[nodiscard]] const std::vector<int>& lags() const noexcept { return lags_; }

private:
    std::vector<int> lags_;
};

/// Raised when the mapping matrix is numerically singular.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(double condition_estimate, double threshold);

    [[nodiscard]] double condition_estimate() const noexcept { return condition_; }

private:
    double condition_;
};

[[noreturn]] void fail(Errc code, const std::string& message);

}  // namespace gapspec
