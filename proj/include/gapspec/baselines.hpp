#pragma once

#include <span>
#include <string>
#include <vector>

#include "gapspec/types.hpp"

namespace gapspec {

/// Lomb-Scargle power spectral density estimate at positive frequencies.
struct LombScargleSpectrum {
    std::vector<double> frequencies;
    std::vector<double> values;
    bool offset_corrected = false;
    /// Validity probability used by the offset correction (1 if uncorrected).
    double alpha_prime = 1.0;
    double dt = 1.0;
};

/// Classical time-shifted Lomb-Scargle periodogram over valid samples with the
/// weighted mean removed, scaled to PSD units by dt * N / D. For a gap-free
/// series this equals dt |DFT(z - mean)|^2 / N at the Fourier frequencies.
/// Non-binary weights enter every sum as sample weights.
LombScargleSpectrum lomb_scargle(const GappySeries& series, std::span<const double> frequencies);

/// D / N, the fraction of valid weight. Default for the offset correction.
double default_alpha_prime(const GappySeries& series);

/// Subtracts (dt / D)(1/alpha' - 1) sum w_i (z_i - mean)^2 from every bin.
/// Only meaningful for independently missing samples.
LombScargleSpectrum lomb_scargle_offset_correct(const LombScargleSpectrum& spec, const GappySeries& series,
                                                double alpha_prime);

/// |f_j| = j / (K dt) for j = 1 .. floor(K/2): the magnitudes of the non-zero
/// frequencies on the Wiener-Khinchin grid of `window`.
std::vector<double> lomb_scargle_grid(const LagWindow& window, double dt);

/// Covariance on `window` from a Lomb-Scargle spectrum sampled on
/// lomb_scargle_grid(): the spectrum is mirrored to negative frequencies, the
/// zero-frequency bin is set to 0 (the mean is removed) and the result is
/// inverse transformed.
std::vector<double> lomb_scargle_autocovariance(const LombScargleSpectrum& spec_on_grid, const LagWindow& window);

/// Replaces each invalid sample by the most recent valid one; leading invalid
/// samples take the first valid value. Every output weight is 1.
GappySeries sample_and_hold(const GappySeries& series);

struct BaselineEstimate {
    CovarianceEstimate covariance;
    SpectrumEstimate spectrum;
    std::string method;
};

/// sample_and_hold -> all-valid autocovariance -> spectrum. The deconvolution
/// step for interpolated data is not applied.
BaselineEstimate interpolated_covariance_spectrum(const GappySeries& series, const LagWindow& window);

}  // namespace gapspec
