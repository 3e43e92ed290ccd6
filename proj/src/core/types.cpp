#include "gapspec/types.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <sstream>

#include "gapspec/error.hpp"

namespace gapspec {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv_mix(std::uint64_t hash, std::uint64_t word) noexcept {
    for (int byte = 0; byte < 8; ++byte) {
        hash ^= (word >> (8 * byte)) & 0xffU;
        hash *= kFnvPrime;
    }
    return hash;
}

}  // namespace

Fingerprint fingerprint_weights(std::span<const double> weights) noexcept {
    std::uint64_t hash = fnv_mix(kFnvOffset, weights.size());
    for (double w : weights) {
        // +0.0 and -0.0 hash identically.
        hash = fnv_mix(hash, std::bit_cast<std::uint64_t>(w == 0.0 ? 0.0 : w));
    }
    return hash;
}

Fingerprint combine_fingerprints(Fingerprint x, Fingerprint y) noexcept {
    return fnv_mix(fnv_mix(kFnvOffset ^ 0x5eedULL, x), y);
}

GappySeries::GappySeries(std::vector<double> values, std::vector<double> weights, double dt)
    : values_(std::move(values)), weights_(std::move(weights)), dt_(dt) {
    if (values_.size() != weights_.size()) {
        std::ostringstream os;
        os << "length mismatch: " << values_.size() << " values but " << weights_.size() << " weights";
        fail(Errc::length_mismatch, os.str());
    }
    if (values_.empty()) fail(Errc::length_mismatch, "series must contain at least one sample");
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) fail(Errc::non_positive_dt, "sampling interval must be positive and finite");
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        const double w = weights_[i];
        if (!std::isfinite(w)) fail(Errc::negative_weight, "weight at index " + std::to_string(i) + " is not finite");
        if (w < 0.0) fail(Errc::negative_weight, "weight at index " + std::to_string(i) + " is negative");
        if (w > 0.0) ++valid_count_;
        if (w != 0.0 && w != 1.0) binary_ = false;
        total_weight_ += w;
    }
    fingerprint_ = fingerprint_weights(weights_);
}

GappySeries GappySeries::all_valid(std::vector<double> values, double dt) {
    std::vector<double> weights(values.size(), 1.0);
    return GappySeries(std::move(values), std::move(weights), dt);
}

const GappySeries& validate_series(const GappySeries& series, WeightMode mode) {
    if (series.valid_count() == 0) fail(Errc::all_invalid, "series has no valid samples (all weights are zero)");
    if (mode == WeightMode::binary && !series.is_binary()) {
        fail(Errc::non_binary_weight, "binary mode requires every weight to be exactly 0 or 1");
    }
    return series;
}

LagWindow::LagWindow(int k1, int k2) : k1_(k1), k2_(k2) {
    if (k1 > k2) {
        fail(Errc::invalid_argument,
             "lag window requires k1 <= k2 (got " + std::to_string(k1) + ":" + std::to_string(k2) + ")");
    }
}

LagWindow LagWindow::parse(std::string_view text) {
    const auto colon = text.find(':', 1);
    if (colon == std::string_view::npos) fail(Errc::parse_error, "lag window must look like k1:k2");
    auto parse_int = [&](std::string_view part) {
        int value = 0;
        if (!part.empty() && part.front() == '+') part.remove_prefix(1);
        const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (ec != std::errc{} || ptr != part.data() + part.size() || part.empty()) {
            fail(Errc::parse_error, "bad lag window bound '" + std::string(part) + "'");
        }
        return value;
    };
    return LagWindow(parse_int(text.substr(0, colon)), parse_int(text.substr(colon + 1)));
}

LagWindow LagWindow::centered(int size) {
    if (size < 1) fail(Errc::invalid_argument, "window size must be positive");
    return LagWindow(-(size / 2), (size - 1) / 2);
}

bool LagWindow::is_centered() const noexcept {
    const int k = static_cast<int>(size());
    return k1_ == -(k / 2);
}

std::string LagWindow::to_string() const { return std::to_string(k1_) + ":" + std::to_string(k2_); }

void LagWindow::require_correctable(std::size_t n) const { require_correctable(n, n); }

void LagWindow::require_correctable(std::size_t nx, std::size_t ny) const {
    const long long lo = -(static_cast<long long>(nx) - 1);
    const long long hi = static_cast<long long>(ny) - 1;
    if (!(lo < k1_ && k2_ < hi)) {
        std::ostringstream os;
        os << "window " << to_string() << " makes the mapping matrix singular; correction requires "
           << lo << " < k1 <= k2 < " << hi;
        fail(Errc::singular_window, os.str());
    }
}

std::string_view kind_name(EstimateKind kind) noexcept {
    return kind == EstimateKind::autocovariance ? "auto" : "cross";
}

CovarianceEstimate::CovarianceEstimate(LagWindow window, std::vector<double> values,
                                       std::vector<double> pair_weights, double dt, EstimateKind kind,
                                       bool corrected, Fingerprint weight_fingerprint)
    : window_(window),
      values_(std::move(values)),
      pair_weights_(std::move(pair_weights)),
      dt_(dt),
      kind_(kind),
      corrected_(corrected),
      fingerprint_(weight_fingerprint) {
    if (values_.size() != window_.size() || pair_weights_.size() != window_.size()) {
        fail(Errc::dimension_mismatch, "covariance values and pair weights must match the window size");
    }
    if (!(dt_ > 0.0)) fail(Errc::non_positive_dt, "sampling interval must be positive");
    std::vector<int> empty;
    for (std::size_t i = 0; i < pair_weights_.size(); ++i) {
        if (!(pair_weights_[i] > 0.0)) empty.push_back(window_.lag(i));
    }
    if (!empty.empty()) throw PairCoverageError(std::move(empty));
}

double CovarianceEstimate::at_lag(int lag) const {
    if (!window_.contains(lag)) fail(Errc::invalid_argument, "lag " + std::to_string(lag) + " outside window");
    return values_[window_.index(lag)];
}

}  // namespace gapspec
