#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gapspec/baselines.hpp"
#include "gapspec/types.hpp"

namespace gapspec {

/// `lag_index,lag_time,value,pair_weight`; a leading `method` column is added
/// when `method` is non-empty.
std::string covariance_csv(const CovarianceEstimate& cov, std::string_view method = {});

/// `freq,real,imag,magnitude`, optionally preceded by `method`.
std::string spectrum_csv(const SpectrumEstimate& spec, std::string_view method = {});

/// `freq,real,imag,magnitude` with a zero imaginary part.
std::string lomb_scargle_csv(const LombScargleSpectrum& spec, std::string_view method = {});

/// Header `k,<j lags...>`, then one row per k lag.
std::string matrix_csv(const MappingMatrix& matrix);

void write_covariance_csv(const std::filesystem::path& path, const CovarianceEstimate& cov,
                          std::string_view method = {});
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumEstimate& spec,
                        std::string_view method = {});
void write_lomb_scargle_csv(const std::filesystem::path& path, const LombScargleSpectrum& spec,
                            std::string_view method = {});
void write_matrix_csv(const std::filesystem::path& path, const MappingMatrix& matrix);

}  // namespace gapspec
