#pragma once

#include <span>

#include "gapspec/types.hpp"

namespace gapspec {

/// Whether covariances outside the supplied window may be treated as zero.
enum class Truncation { reject, allow };

/// Weighted mean over valid samples. Samples with zero weight never
/// contribute, whatever value they hold.
[[nodiscard]] double weighted_mean(const GappySeries& series);

/// s^2 = (1/D) sum w_i (z_i - mean)^2, with the weighted mean subtracted.
[[nodiscard]] double weighted_variance(const GappySeries& series);

/// Variance of the weighted mean estimator for a process with covariance
/// `gamma` on `window`: (1/D^2) sum_k W_k gamma_k, where W_k are the pair
/// weights of `weights`. With Truncation::reject, any lag carrying pair
/// weight outside the window raises window_too_narrow.
[[nodiscard]] double mean_estimator_variance(std::span<const double> weights, const LagWindow& window,
                                             std::span<const double> gamma,
                                             Truncation truncation = Truncation::reject);

[[nodiscard]] double mean_estimator_variance(std::span<const double> weights, const CovarianceEstimate& gamma,
                                             Truncation truncation = Truncation::reject);

/// Bias-free variance s^2 + sigma_mean^2, where sigma_mean^2 is evaluated
/// from the corrected autocovariance of the same series (lags outside its
/// window are taken as zero).
[[nodiscard]] MomentSummary corrected_variance(const GappySeries& series, const CovarianceEstimate& corrected_cov);

}  // namespace gapspec
