#include "gapspec/error.hpp"

#include <sstream>

namespace gapspec {

std::string_view errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::invalid_argument: return "invalid_argument";
        case Errc::length_mismatch: return "length_mismatch";
        case Errc::negative_weight: return "negative_weight";
        case Errc::non_binary_weight: return "non_binary_weight";
        case Errc::all_invalid: return "all_invalid";
        case Errc::non_positive_dt: return "non_positive_dt";
        case Errc::parse_error: return "parse_error";
        case Errc::insufficient_pair_coverage: return "insufficient_pair_coverage";
        case Errc::dt_mismatch: return "dt_mismatch";
        case Errc::singular_window: return "singular_window";
        case Errc::singular_matrix: return "singular_matrix";
        case Errc::fingerprint_mismatch: return "fingerprint_mismatch";
        case Errc::window_mismatch: return "window_mismatch";
        case Errc::dimension_mismatch: return "dimension_mismatch";
        case Errc::window_too_narrow: return "window_too_narrow";
        case Errc::too_few_samples: return "too_few_samples";
        case Errc::io_error: return "io_error";
        case Errc::config_error: return "config_error";
    }
    return "unknown";
}

Error::Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

namespace {

std::string coverage_message(const std::vector<int>& lags) {
    std::ostringstream os;
    os << "insufficient pair coverage: no valid sample pairs at lag";
    os << (lags.size() == 1 ? " " : "s ");
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (i) os << ',';
        os << lags[i];
    }
    return os.str();
}

std::string singular_message(double condition, double threshold) {
    std::ostringstream os;
    os << "mapping matrix is numerically singular: condition estimate " << condition
       << " exceeds threshold " << threshold;
    return os.str();
}

}  // namespace

PairCoverageError::PairCoverageError(std::vector<int> lags)
    : Error(Errc::insufficient_pair_coverage, coverage_message(lags)), lags_(std::move(lags)) {}

SingularMatrixError::SingularMatrixError(double condition_estimate, double threshold)
    : Error(Errc::singular_matrix, singular_message(condition_estimate, threshold)),
      condition_(condition_estimate) {}

void fail(Errc code, const std::string& message) { throw Error(code, message); }

}  // namespace gapspec
