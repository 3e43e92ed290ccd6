#include "gapspec/spectrum.hpp"

#include <cmath>
#include <numbers>

#include "gapspec/error.hpp"
#include "gapspec/fft.hpp"

namespace gapspec {

namespace {

using cplx = std::complex<double>;

long long positive_mod(long long a, long long m) {
    const long long r = a % m;
    return r < 0 ? r + m : r;
}

/// exp(-2 pi i j first_lag / K); identity when the window is centred, where
/// the DFT input is rotated instead.
cplx window_phase(long long j, long long first_lag, long long k_count) {
    const long long turns = positive_mod(j * first_lag, k_count);
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(turns) / static_cast<double>(k_count);
    return {std::cos(angle), std::sin(angle)};
}

bool centred(int first_lag, std::size_t k_count) { return first_lag == -static_cast<int>(k_count / 2); }

}  // namespace

std::vector<double> frequency_grid(std::size_t k_count, double dt) {
    if (k_count == 0) fail(Errc::invalid_argument, "empty lag window");
    const long long k = static_cast<long long>(k_count);
    std::vector<double> f;
    f.reserve(k_count);
    for (long long j = -(k / 2); j <= (k - 1) / 2; ++j) f.push_back(static_cast<double>(j) / (static_cast<double>(k) * dt));
    return f;
}

std::vector<cplx> wiener_khinchin(std::span<const double> covariance, int first_lag, double dt) {
    const auto k = static_cast<long long>(covariance.size());
    if (k == 0) fail(Errc::invalid_argument, "empty lag window");
    const bool rotate = centred(first_lag, covariance.size());

    std::vector<cplx> buffer(covariance.size());
    for (long long m = 0; m < k; ++m) {
        const long long slot = rotate ? positive_mod(first_lag + m, k) : m;
        buffer[static_cast<std::size_t>(slot)] = covariance[static_cast<std::size_t>(m)];
    }
    const auto dft = fft::forward(buffer);

    std::vector<cplx> out;
    out.reserve(covariance.size());
    for (long long j = -(k / 2); j <= (k - 1) / 2; ++j) {
        cplx s = dft[static_cast<std::size_t>(positive_mod(j, k))] * dt;
        if (!rotate) s *= window_phase(j, first_lag, k);
        out.push_back(s);
    }
    return out;
}

std::vector<cplx> inverse_wiener_khinchin(std::span<const cplx> spectrum, int first_lag, double dt) {
    const auto k = static_cast<long long>(spectrum.size());
    if (k == 0) fail(Errc::invalid_argument, "empty spectrum");
    const bool rotate = centred(first_lag, spectrum.size());

    std::vector<cplx> buffer(spectrum.size());
    long long idx = 0;
    for (long long j = -(k / 2); j <= (k - 1) / 2; ++j, ++idx) {
        cplx s = spectrum[static_cast<std::size_t>(idx)];
        if (!rotate) s *= std::conj(window_phase(j, first_lag, k));
        buffer[static_cast<std::size_t>(positive_mod(j, k))] = s;
    }
    const auto idft = fft::inverse(buffer);

    std::vector<cplx> out(spectrum.size());
    for (long long m = 0; m < k; ++m) {
        const long long slot = rotate ? positive_mod(first_lag + m, k) : m;
        out[static_cast<std::size_t>(m)] = idft[static_cast<std::size_t>(slot)] / dt;
    }
    return out;
}

SpectrumEstimate covariance_to_spectrum(const CovarianceEstimate& cov) {
    SpectrumEstimate spec;
    spec.frequencies = frequency_grid(cov.size(), cov.dt());
    spec.values = wiener_khinchin(cov.values(), cov.window().k1(), cov.dt());
    spec.kind = cov.kind();
    spec.dt = cov.dt();
    spec.source_window = cov.window();
    spec.source_pair_weights.assign(cov.pair_weights().begin(), cov.pair_weights().end());
    spec.corrected = cov.corrected();
    spec.weight_fingerprint = cov.weight_fingerprint();
    return spec;
}

CovarianceEstimate spectrum_to_covariance(const SpectrumEstimate& spec) {
    if (spec.values.size() != spec.source_window.size() || spec.source_pair_weights.size() != spec.values.size()) {
        fail(Errc::dimension_mismatch, "spectrum does not match its source window");
    }
    const auto complex_cov = inverse_wiener_khinchin(spec.values, spec.source_window.k1(), spec.dt);
    std::vector<double> values;
    values.reserve(complex_cov.size());
    for (const auto& c : complex_cov) values.push_back(c.real());
    return CovarianceEstimate(spec.source_window, std::move(values), spec.source_pair_weights, spec.dt, spec.kind,
                              spec.corrected, spec.weight_fingerprint);
}

}  // namespace gapspec
