#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Thin wrapper over FFTW. Plans are cached per (length, kind) and shared by
// all threads; planning is serialised internally, execution is reentrant.
namespace gapspec::fft {

using cplx = std::complex<double>;

/// Unnormalised forward DFT: X[m] = sum_n x[n] exp(-2 pi i m n / L).
std::vector<cplx> forward(std::span<const cplx> input);

/// Normalised inverse DFT: x[n] = (1/L) sum_m X[m] exp(+2 pi i m n / L).
std::vector<cplx> inverse(std::span<const cplx> input);

/// Half spectrum (L/2 + 1 bins) of a real sequence zero-padded to length L.
std::vector<cplx> forward_real(std::span<const double> input, std::size_t length);

/// Inverse of forward_real for a Hermitian spectrum of a length-L real signal,
/// normalised by 1/L.
std::vector<double> inverse_real(std::span<const cplx> half_spectrum, std::size_t length);

/// r[m] = sum_i a[i] b[i + m] for lags m in -(len(a)-1) .. len(b)-1, returned
/// in circular order over length L >= len(a) + len(b) - 1: index m for m >= 0,
/// index L + m for m < 0.
std::vector<double> correlate(std::span<const double> a, std::span<const double> b, std::size_t length);

/// Same as correlate() with the half spectrum of `a` precomputed by
/// forward_real(a, length).
std::vector<double> correlate_with(std::span<const cplx> a_spectrum, std::span<const double> b, std::size_t length);

/// Reads lag m from a circularly ordered correlation record.
inline double circular_at(std::span<const double> record, long long lag) {
    const auto n = static_cast<long long>(record.size());
    return record[static_cast<std::size_t>(lag >= 0 ? lag : n + lag)];
}

}  // namespace gapspec::fft

namespace gapspec::fft {

/// inverse_real(conj(A) * B): correlation from two precomputed half spectra.
std::vector<double> correlate_spectra(std::span<const cplx> a_spectrum, std::span<const cplx> b_spectrum,
                                      std::size_t length);

}  // namespace gapspec::fft
