#include "gapspec/covariance.hpp"

#include <algorithm>
#include <cmath>

#include "gapspec/error.hpp"
#include "gapspec/fft.hpp"
#include "gapspec/moments.hpp"

namespace gapspec {

namespace {

bool all_binary(std::span<const double> w) {
    return std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

/// w_i (z_i - mean) on valid samples, exactly 0 elsewhere.
std::vector<double> masked_deviations(const GappySeries& series) {
    const double mean = weighted_mean(series);
    const auto z = series.values();
    const auto w = series.weights();
    std::vector<double> out(z.size(), 0.0);
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (w[i] > 0.0) out[i] = w[i] * (z[i] - mean);
    }
    return out;
}

/// Products and weights summed directly over i = I1 .. I2 for each lag.
PairAccumulators direct_sums(std::span<const double> ax, std::span<const double> wx, std::span<const double> ay,
                             std::span<const double> wy, const LagWindow& window) {
    const auto nx = static_cast<long long>(wx.size());
    const auto ny = static_cast<long long>(wy.size());
    PairAccumulators acc;
    acc.first_lag = window.k1();
    acc.products.assign(window.size(), 0.0);
    acc.weights.assign(window.size(), 0.0);
    for (std::size_t idx = 0; idx < window.size(); ++idx) {
        const long long k = window.lag(idx);
        const long long i1 = std::max(0LL, -k);
        const long long i2 = std::min(nx, ny - k) - 1;
        double z = 0.0;
        double w = 0.0;
        for (long long i = i1; i <= i2; ++i) {
            z += ax[static_cast<std::size_t>(i)] * ay[static_cast<std::size_t>(i + k)];
            w += wx[static_cast<std::size_t>(i)] * wy[static_cast<std::size_t>(i + k)];
        }
        acc.products[idx] = z;
        acc.weights[idx] = w;
    }
    return acc;
}

std::vector<double> unwrap(std::span<const double> circular, int first_lag, int last_lag) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(last_lag - first_lag + 1));
    for (int lag = first_lag; lag <= last_lag; ++lag) out.push_back(fft::circular_at(circular, lag));
    return out;
}

void clean_pair_weights(std::vector<double>& w, bool binary) {
    if (binary) {
        for (auto& v : w) v = std::round(v);
        return;
    }
    double peak = 0.0;
    for (double v : w) peak = std::max(peak, std::abs(v));
    const double floor = peak * 1e-12;
    for (auto& v : w) {
        if (std::abs(v) <= floor) v = 0.0;
    }
}

PairAccumulators fft_sums(std::span<const double> ax, std::span<const double> wx, std::span<const double> ay,
                          std::span<const double> wy) {
    const std::size_t length = wx.size() + wy.size();
    const int first = -static_cast<int>(wx.size()) + 1;
    const int last = static_cast<int>(wy.size()) - 1;
    PairAccumulators acc;
    acc.first_lag = first;
    acc.products = unwrap(fft::correlate(ax, ay, length), first, last);
    acc.weights = unwrap(fft::correlate(wx, wy, length), first, last);
    clean_pair_weights(acc.weights, all_binary(wx) && all_binary(wy));
    return acc;
}

CovarianceEstimate finish(const PairAccumulators& acc, const LagWindow& window, double dt, EstimateKind kind,
                          Fingerprint fp) {
    std::vector<double> values(window.size());
    std::vector<double> weights(window.size());
    std::vector<int> empty;
    for (std::size_t idx = 0; idx < window.size(); ++idx) {
        const int lag = window.lag(idx);
        const bool inside = lag >= acc.first_lag && lag <= acc.last_lag();
        const double w = inside ? acc.weight_at(lag) : 0.0;
        if (!(w > 0.0)) {
            empty.push_back(lag);
            continue;
        }
        values[idx] = acc.product_at(lag) / w;
        weights[idx] = w;
    }
    if (!empty.empty()) throw PairCoverageError(std::move(empty));
    return CovarianceEstimate(window, std::move(values), std::move(weights), dt, kind, false, fp);
}

void require_pairable(const GappySeries& x, const GappySeries& y) {
    if (x.valid_count() == 0 || y.valid_count() == 0) fail(Errc::all_invalid, "series has no valid samples (D = 0)");
    if (x.dt() != y.dt()) fail(Errc::dt_mismatch, "cross-covariance needs equal sampling intervals");
}

}  // namespace

Fingerprint cross_fingerprint(std::span<const double> wx, std::span<const double> wy) noexcept {
    return combine_fingerprints(fingerprint_weights(wx), fingerprint_weights(wy));
}

std::vector<double> pair_weights_direct(std::span<const double> wx, std::span<const double> wy,
                                        const LagWindow& window) {
    return direct_sums(wx, wx, wy, wy, window).weights;
}

PairAccumulators pair_weights_fft(std::span<const double> wx, std::span<const double> wy) {
    if (wx.empty() || wy.empty()) fail(Errc::invalid_argument, "weight sequences must be non-empty");
    const std::size_t length = wx.size() + wy.size();
    const int first = -static_cast<int>(wx.size()) + 1;
    const int last = static_cast<int>(wy.size()) - 1;
    PairAccumulators acc;
    acc.first_lag = first;
    acc.weights = unwrap(fft::correlate(wx, wy, length), first, last);
    clean_pair_weights(acc.weights, all_binary(wx) && all_binary(wy));
    acc.products.assign(acc.weights.size(), 0.0);
    return acc;
}

PairAccumulators auto_pair_sums_direct(const GappySeries& series, const LagWindow& window) {
    const auto a = masked_deviations(series);
    return direct_sums(a, series.weights(), a, series.weights(), window);
}

PairAccumulators auto_pair_sums_fft(const GappySeries& series) {
    const auto a = masked_deviations(series);
    return fft_sums(a, series.weights(), a, series.weights());
}

PairAccumulators cross_pair_sums_direct(const GappySeries& x, const GappySeries& y, const LagWindow& window) {
    require_pairable(x, y);
    const auto ax = masked_deviations(x);
    const auto ay = masked_deviations(y);
    return direct_sums(ax, x.weights(), ay, y.weights(), window);
}

PairAccumulators cross_pair_sums_fft(const GappySeries& x, const GappySeries& y) {
    require_pairable(x, y);
    const auto ax = masked_deviations(x);
    const auto ay = masked_deviations(y);
    return fft_sums(ax, x.weights(), ay, y.weights());
}

CovarianceEstimate autocovariance_direct(const GappySeries& series, const LagWindow& window) {
    return finish(auto_pair_sums_direct(series, window), window, series.dt(), EstimateKind::autocovariance,
                  series.fingerprint());
}

CovarianceEstimate autocovariance_fft(const GappySeries& series, const LagWindow& window) {
    return finish(auto_pair_sums_fft(series), window, series.dt(), EstimateKind::autocovariance,
                  series.fingerprint());
}

CovarianceEstimate autocovariance(const GappySeries& series, const LagWindow& window, Route route) {
    return route == Route::direct ? autocovariance_direct(series, window) : autocovariance_fft(series, window);
}

CovarianceEstimate crosscovariance_direct(const GappySeries& x, const GappySeries& y, const LagWindow& window) {
    return finish(cross_pair_sums_direct(x, y, window), window, x.dt(), EstimateKind::cross,
                  cross_fingerprint(x.weights(), y.weights()));
}

CovarianceEstimate crosscovariance_fft(const GappySeries& x, const GappySeries& y, const LagWindow& window) {
    return finish(cross_pair_sums_fft(x, y), window, x.dt(), EstimateKind::cross,
                  cross_fingerprint(x.weights(), y.weights()));
}

CovarianceEstimate crosscovariance(const GappySeries& x, const GappySeries& y, const LagWindow& window, Route route) {
    return route == Route::direct ? crosscovariance_direct(x, y, window) : crosscovariance_fft(x, y, window);
}

}  // namespace gapspec
