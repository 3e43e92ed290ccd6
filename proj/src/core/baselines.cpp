#include "gapspec/baselines.hpp"

#include <cmath>
#include <numbers>

#include "gapspec/covariance.hpp"
#include "gapspec/error.hpp"
#include "gapspec/moments.hpp"
#include "gapspec/spectrum.hpp"

namespace gapspec {

LombScargleSpectrum lomb_scargle(const GappySeries& series, std::span<const double> frequencies) {
    if (series.valid_count() < 2) {
        fail(Errc::too_few_samples, "Lomb-Scargle needs at least 2 valid samples, found " +
                                        std::to_string(series.valid_count()));
    }
    const double mean = weighted_mean(series);
    const double dt = series.dt();
    const auto z = series.values();
    const auto w = series.weights();

    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> wv;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (w[i] > 0.0) {
            t.push_back(static_cast<double>(i) * dt);
            y.push_back(z[i] - mean);
            wv.push_back(w[i]);
        }
    }
    const double d = series.total_weight();
    const double scale = dt * static_cast<double>(series.size()) / d;

    LombScargleSpectrum out;
    out.dt = dt;
    out.frequencies.assign(frequencies.begin(), frequencies.end());
    out.values.reserve(frequencies.size());
    for (double f : frequencies) {
        if (!(f > 0.0) || !std::isfinite(f)) fail(Errc::invalid_argument, "Lomb-Scargle frequencies must be positive");
        const double omega = 2.0 * std::numbers::pi * f;
        double s2 = 0.0;
        double c2 = 0.0;
        for (std::size_t n = 0; n < t.size(); ++n) {
            s2 += wv[n] * std::sin(2.0 * omega * t[n]);
            c2 += wv[n] * std::cos(2.0 * omega * t[n]);
        }
        const double tau = std::atan2(s2, c2) / (2.0 * omega);
        double yc = 0.0, ys = 0.0, cc = 0.0, ss = 0.0;
        for (std::size_t n = 0; n < t.size(); ++n) {
            const double c = std::cos(omega * (t[n] - tau));
            const double s = std::sin(omega * (t[n] - tau));
            yc += wv[n] * y[n] * c;
            ys += wv[n] * y[n] * s;
            cc += wv[n] * c * c;
            ss += wv[n] * s * s;
        }
        // When one quadrature vanishes (e.g. at the Nyquist frequency) the
        // other carries the full power.
        const double floor = 1e-12 * d;
        double power = 0.0;
        if (cc > floor && ss > floor) {
            power = 0.5 * (yc * yc / cc + ys * ys / ss);
        } else if (cc > floor) {
            power = yc * yc / cc;
        } else if (ss > floor) {
            power = ys * ys / ss;
        }
        out.values.push_back(scale * power);
    }
    return out;
}

double default_alpha_prime(const GappySeries& series) {
    return series.total_weight() / static_cast<double>(series.size());
}

LombScargleSpectrum lomb_scargle_offset_correct(const LombScargleSpectrum& spec, const GappySeries& series,
                                                double alpha_prime) {
    if (!(alpha_prime > 0.0 && alpha_prime <= 1.0)) {
        fail(Errc::invalid_argument, "alpha' must lie in (0, 1]");
    }
    if (spec.offset_corrected) fail(Errc::invalid_argument, "spectrum is already offset corrected");
    const double d = series.total_weight();
    const double spread = weighted_variance(series) * d;  // sum w_i (z_i - mean)^2
    const double offset = spec.dt / d * (1.0 / alpha_prime - 1.0) * spread;
    LombScargleSpectrum out = spec;
    for (auto& v : out.values) v -= offset;
    out.offset_corrected = true;
    out.alpha_prime = alpha_prime;
    return out;
}

std::vector<double> lomb_scargle_grid(const LagWindow& window, double dt) {
    const auto k = static_cast<long long>(window.size());
    std::vector<double> out;
    for (long long j = 1; j <= k / 2; ++j) out.push_back(static_cast<double>(j) / (static_cast<double>(k) * dt));
    return out;
}

std::vector<double> lomb_scargle_autocovariance(const LombScargleSpectrum& spec_on_grid, const LagWindow& window) {
    const auto k = static_cast<long long>(window.size());
    if (spec_on_grid.values.size() != static_cast<std::size_t>(k / 2)) {
        fail(Errc::dimension_mismatch, "Lomb-Scargle spectrum is not sampled on the window's frequency grid");
    }
    std::vector<std::complex<double>> full;
    full.reserve(window.size());
    for (long long j = -(k / 2); j <= (k - 1) / 2; ++j) {
        const long long a = j < 0 ? -j : j;
        full.emplace_back(a == 0 ? 0.0 : spec_on_grid.values[static_cast<std::size_t>(a - 1)]);
    }
    const auto c = inverse_wiener_khinchin(full, window.k1(), spec_on_grid.dt);
    std::vector<double> out;
    out.reserve(c.size());
    for (const auto& v : c) out.push_back(v.real());
    return out;
}

GappySeries sample_and_hold(const GappySeries& series) {
    const auto z = series.values();
    const auto w = series.weights();
    std::size_t first = 0;
    while (first < z.size() && !(w[first] > 0.0)) ++first;
    if (first == z.size()) fail(Errc::all_invalid, "sample-and-hold needs at least one valid sample");
    std::vector<double> held(z.size());
    double last = z[first];
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (w[i] > 0.0) last = z[i];
        held[i] = last;
    }
    return GappySeries::all_valid(std::move(held), series.dt());
}

BaselineEstimate interpolated_covariance_spectrum(const GappySeries& series, const LagWindow& window) {
    auto cov = autocovariance_fft(sample_and_hold(series), window);
    auto spec = covariance_to_spectrum(cov);
    return BaselineEstimate{std::move(cov), std::move(spec), "sample_and_hold"};
}

}  // namespace gapspec
