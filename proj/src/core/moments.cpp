#include "gapspec/moments.hpp"

#include <algorithm>
#include <vector>

#include "gapspec/covariance.hpp"
#include "gapspec/error.hpp"

namespace gapspec {

namespace {

void require_valid(const GappySeries& series) {
    if (series.valid_count() == 0) fail(Errc::all_invalid, "series has no valid samples (D = 0)");
}

}  // namespace

double weighted_mean(const GappySeries& series) {
    require_valid(series);
    const auto z = series.values();
    const auto w = series.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (w[i] > 0.0) sum += w[i] * z[i];
    }
    return sum / series.total_weight();
}

double weighted_variance(const GappySeries& series) {
    const double mean = weighted_mean(series);
    const auto z = series.values();
    const auto w = series.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (w[i] > 0.0) {
            const double d = z[i] - mean;
            sum += w[i] * d * d;
        }
    }
    return sum / series.total_weight();
}

double mean_estimator_variance(std::span<const double> weights, const LagWindow& window,
                               std::span<const double> gamma, Truncation truncation) {
    if (gamma.size() != window.size()) fail(Errc::dimension_mismatch, "gamma length must equal the window size");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) fail(Errc::negative_weight, "weights must be non-negative");
        total += w;
    }
    if (!(total > 0.0)) fail(Errc::all_invalid, "weights sum to zero (D = 0)");

    const auto pairs = pair_weights_fft(weights, weights);
    double sum = 0.0;
    std::vector<int> uncovered;
    for (int lag = pairs.first_lag; lag <= pairs.last_lag(); ++lag) {
        const double wk = pairs.weight_at(lag);
        if (window.contains(lag)) {
            sum += wk * gamma[window.index(lag)];
        } else if (wk > 0.0) {
            uncovered.push_back(lag);
        }
    }
    if (!uncovered.empty() && truncation == Truncation::reject) {
        fail(Errc::window_too_narrow,
             "covariance window " + window.to_string() + " misses " + std::to_string(uncovered.size()) +
                 " lag(s) with valid pairs (lags " + std::to_string(uncovered.front()) + " .. " +
                 std::to_string(uncovered.back()) + "); pass Truncation::allow to treat them as zero");
    }
    return sum / (total * total);
}

double mean_estimator_variance(std::span<const double> weights, const CovarianceEstimate& gamma,
                               Truncation truncation) {
    return mean_estimator_variance(weights, gamma.window(), gamma.values(), truncation);
}

MomentSummary corrected_variance(const GappySeries& series, const CovarianceEstimate& corrected_cov) {
    require_valid(series);
    if (corrected_cov.kind() != EstimateKind::autocovariance) {
        fail(Errc::invalid_argument, "corrected variance needs an autocovariance estimate");
    }
    if (!corrected_cov.corrected()) {
        fail(Errc::invalid_argument, "corrected variance needs the bias-corrected autocovariance");
    }
    if (corrected_cov.weight_fingerprint() != series.fingerprint()) {
        fail(Errc::fingerprint_mismatch, "autocovariance was estimated from different weights than this series");
    }
    MomentSummary out;
    out.mean = weighted_mean(series);
    out.raw_variance = weighted_variance(series);
    out.mean_estimator_variance = mean_estimator_variance(series.weights(), corrected_cov, Truncation::allow);
    out.corrected_variance = out.raw_variance + out.mean_estimator_variance;
    out.total_weight = series.total_weight();
    return out;
}

}  // namespace gapspec
