#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gapspec/types.hpp"

namespace gapspec {

enum class ProcessFamily { moving_average, autoregressive };

/// Stationary Gaussian process with closed-form auto- and cross-covariance.
/// A zero target_variance gives the constant series `mean`.
///
/// moving_average: x_i = mean + s * sum_m b_m e_{i-m}, with s chosen so that
///   gamma_0 = target_variance; gamma_k vanishes for |k| > q.
/// autoregressive: first-order recursion with coefficient ar_coefficient,
///   gamma_k = target_variance * phi^|k| (infinite support).
///
/// The second series is y_i = mean + cross_mix (x_{i-cross_delay} - mean)
///   + sqrt(1 - cross_mix^2) (independent copy of the process), so that
///   gamma_xy,k = cross_mix * gamma_{k - cross_delay}.
struct ProcessSpec {
    ProcessFamily family = ProcessFamily::moving_average;
    std::vector<double> ma_kernel{1.0};
    double ar_coefficient = 0.0;
    double mean = 0.0;
    double target_variance = 1.0;
    int cross_delay = 0;
    double cross_mix = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
    [[nodiscard]] double autocovariance(int lag) const;
    [[nodiscard]] double crosscovariance(int lag) const;
    /// Largest lag with non-zero autocovariance (-1 for infinite support).
    [[nodiscard]] int correlation_length() const;
};

enum class GapKind { bernoulli, markov, static_mask };

/// bernoulli: each sample valid independently with valid_probability.
/// markov: two-state chain started from its stationary law (valid with
///   probability 1/2), flipping state with switch_probability per step.
///   Runs of either state are geometric with mean 1/switch_probability.
/// static_mask: weights copied verbatim from `mask`.
struct GapModelSpec {
    GapKind kind = GapKind::bernoulli;
    double valid_probability = 1.0;
    double switch_probability = 0.1;
    std::vector<double> mask;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Value written into invalid samples.
inline constexpr double kInvalidSampleValue = -1.0;

/// Closed-form truth attached to a generated pair.
struct TruthRecord {
    ProcessSpec process;

    [[nodiscard]] double mean() const noexcept { return process.mean; }
    [[nodiscard]] double variance() const noexcept { return process.target_variance; }
    [[nodiscard]] std::vector<double> autocovariance(const LagWindow& window) const;
    [[nodiscard]] std::vector<double> crosscovariance(const LagWindow& window) const;
};

struct GeneratedPair {
    GappySeries x;
    GappySeries y;
    TruthRecord truth;
};

/// splitmix64 finaliser applied to seed ^ (index * golden-ratio constant).
/// Stateless per (seed, index), so realizations can be drawn in any order.
std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Generator used for all draws: std::mt19937_64 seeded with
/// realization_seed(seed, index); Gaussian draws via std::normal_distribution.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index);

/// Two gap-free series of n samples. Realization `index` selects an
/// independent stream derived from spec.seed.
GeneratedPair generate_pair(const ProcessSpec& spec, std::size_t n, double dt = 1.0, std::uint64_t index = 0);

/// Draws weights for `series` from the gap model (stream derived from
/// model.seed and `index`), multiplies them into its weights and writes
/// kInvalidSampleValue at every invalid position.
GappySeries apply_gaps(const GappySeries& series, const GapModelSpec& model, std::uint64_t index = 0);

/// Weight draw alone, length n.
std::vector<double> draw_gap_weights(const GapModelSpec& model, std::size_t n, std::uint64_t index = 0);

}  // namespace gapspec
