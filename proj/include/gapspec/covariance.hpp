#pragma once

#include <span>
#include <vector>

#include "gapspec/types.hpp"

namespace gapspec {

enum class Route { automatic, direct, fft };

/// Lag-indexed sums Z_k (weighted products of mean-removed values) and W_k
/// (pair weights), starting at first_lag.
struct PairAccumulators {
    int first_lag = 0;
    std::vector<double> products;
    std::vector<double> weights;

    [[nodiscard]] int last_lag() const noexcept { return first_lag + static_cast<int>(weights.size()) - 1; }
    [[nodiscard]] double product_at(int lag) const { return products[static_cast<std::size_t>(lag - first_lag)]; }
    [[nodiscard]] double weight_at(int lag) const { return weights[static_cast<std::size_t>(lag - first_lag)]; }
};

/// Pair weights W_k = sum_i wx_i wy_{i+k} on a window, by direct summation.
std::vector<double> pair_weights_direct(std::span<const double> wx, std::span<const double> wy,
                                        const LagWindow& window);

/// Pair weights over every lag -(Nx-1) .. Ny-1 via one zero-padded FFT
/// correlation. Results for binary weights are rounded to exact integers.
PairAccumulators pair_weights_fft(std::span<const double> wx, std::span<const double> wy);

PairAccumulators auto_pair_sums_direct(const GappySeries& series, const LagWindow& window);
/// All lags -(N-1) .. N-1.
PairAccumulators auto_pair_sums_fft(const GappySeries& series);

PairAccumulators cross_pair_sums_direct(const GappySeries& x, const GappySeries& y, const LagWindow& window);
/// All lags -(Nx-1) .. Ny-1.
PairAccumulators cross_pair_sums_fft(const GappySeries& x, const GappySeries& y);

/// C_k = Z_k / W_k with the series' own weighted mean removed. Every lag in
/// the window must have W_k > 0, otherwise PairCoverageError lists the empty
/// lags.
CovarianceEstimate autocovariance_direct(const GappySeries& series, const LagWindow& window);
CovarianceEstimate autocovariance_fft(const GappySeries& series, const LagWindow& window);
CovarianceEstimate autocovariance(const GappySeries& series, const LagWindow& window, Route route = Route::automatic);

/// C_xy,k = Z_xy,k / W_xy,k pairing x at i with y at i + k.
CovarianceEstimate crosscovariance_direct(const GappySeries& x, const GappySeries& y, const LagWindow& window);
CovarianceEstimate crosscovariance_fft(const GappySeries& x, const GappySeries& y, const LagWindow& window);
CovarianceEstimate crosscovariance(const GappySeries& x, const GappySeries& y, const LagWindow& window,
                                   Route route = Route::automatic);

/// Fingerprint carried by cross estimates and cross mapping matrices.
Fingerprint cross_fingerprint(std::span<const double> wx, std::span<const double> wy) noexcept;

}  // namespace gapspec
