#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gapspec/types.hpp"

namespace gapspec {

/// Triple-product weight sums. Rows are indexed by k, columns by j, both over
/// the window lags.
///   auto:  G_kj = sum_i w_i w_{i+j} w_{i+k},     H_kj = sum_i w_i w_{i+j} w_{i+j-k}
///   cross: G_kj = sum_i wx_i wy_{i+j} wy_{i+k},  H_kj = sum_i wx_i wy_{i+j} wx_{i+j-k}
/// Each sum runs over the indices for which every factor exists.
struct TripleAccumulators {
    Eigen::MatrixXd g;
    Eigen::MatrixXd h;
};

TripleAccumulators triple_sums_direct(std::span<const double> wx, std::span<const double> wy,
                                      const LagWindow& window);
TripleAccumulators triple_sums_fft(std::span<const double> wx, std::span<const double> wy, const LagWindow& window);

enum class AssemblyRoute { automatic, direct, fft };

struct AssemblyOptions {
    AssemblyRoute route = AssemblyRoute::automatic;
    /// The automatic route switches to per-k FFTs once K * N exceeds this.
    std::size_t fft_crossover = std::size_t{1} << 20;
};

/// a_kj = delta_kj + W_j / D^2 - (G_kj + H_kj) / (D W_k).
MappingMatrix build_auto_matrix(std::span<const double> weights, const LagWindow& window,
                                const AssemblyOptions& options = {});

/// a_kj = delta_kj + W_j / (Dx Dy) - G_kj / (Dy W_k) - H_kj / (Dx W_k).
MappingMatrix build_cross_matrix(std::span<const double> wx, std::span<const double> wy, const LagWindow& window,
                                 const AssemblyOptions& options = {});

struct CorrectionOptions {
    double condition_threshold = 1e12;
};

struct CorrectedCovariance {
    CovarianceEstimate estimate;
    /// 1-norm condition number estimate of the mapping matrix.
    double condition_estimate;
};

/// Solves A * C_hat = C by LU with partial pivoting.
CorrectedCovariance correct_covariance(const CovarianceEstimate& raw, const MappingMatrix& matrix,
                                       const CorrectionOptions& options = {});

/// Expected raw estimate A * gamma for a covariance hypothesis on the window.
std::vector<double> predict_expected_covariance(const MappingMatrix& matrix, std::span<const double> gamma);

}  // namespace gapspec
