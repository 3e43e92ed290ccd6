#pragma once

#include <complex>
#include <span>
#include <vector>

#include "gapspec/types.hpp"

namespace gapspec {

/// f_j = j / (K dt) for j = -floor(K/2) .. floor((K-1)/2).
std::vector<double> frequency_grid(std::size_t k_count, double dt);

/// S_j = dt * sum_k C_k exp(-2 pi i f_j k dt) for a contiguous lag window
/// starting at first_lag. No taper is applied.
std::vector<std::complex<double>> wiener_khinchin(std::span<const double> covariance, int first_lag, double dt);

/// C_k = 1/(K dt) * sum_j S_j exp(+2 pi i f_j k dt); complex in general.
std::vector<std::complex<double>> inverse_wiener_khinchin(std::span<const std::complex<double>> spectrum,
                                                          int first_lag, double dt);

SpectrumEstimate covariance_to_spectrum(const CovarianceEstimate& cov);

/// Real part of the inverse transform, restored into a CovarianceEstimate
/// with the source window, pair weights and fingerprint.
CovarianceEstimate spectrum_to_covariance(const SpectrumEstimate& spec);

}  // namespace gapspec
