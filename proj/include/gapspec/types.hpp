#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace gapspec {

/// 64-bit digest of a weight sequence (FNV-1a over the IEEE-754 bit patterns).
using Fingerprint = std::uint64_t;

Fingerprint fingerprint_weights(std::span<const double> weights) noexcept;
Fingerprint combine_fingerprints(Fingerprint x, Fingerprint y) noexcept;

enum class WeightMode { general, binary };

/// Equidistant samples with per-sample validity weights. Sample i sits at
/// time i * dt. Immutable after construction.
///
/// Construction enforces the structural invariants (equal non-zero lengths,
/// finite non-negative weights, positive dt). A series whose weights are all
/// zero can be constructed; moment and covariance operations reject it, as
/// does validate_series().
class GappySeries {
public:
    GappySeries(std::vector<double> values, std::vector<double> weights, double dt = 1.0);

    /// All samples valid (every weight 1).
    static GappySeries all_valid(std::vector<double> values, double dt = 1.0);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] double total_weight() const noexcept { return total_weight_; }
    [[nodiscard]] std::size_t valid_count() const noexcept { return valid_count_; }
    [[nodiscard]] bool is_binary() const noexcept { return binary_; }
    [[nodiscard]] Fingerprint fingerprint() const noexcept { return fingerprint_; }

private:
    std::vector<double> values_;
    std::vector<double> weights_;
    double dt_;
    double total_weight_ = 0.0;
    std::size_t valid_count_ = 0;
    bool binary_ = true;
    Fingerprint fingerprint_ = 0;
};

/// Returns the series unchanged when it is usable for estimation: at least one
/// positive weight, and (in binary mode) every weight exactly 0 or 1.
const GappySeries& validate_series(const GappySeries& series, WeightMode mode = WeightMode::general);

/// Inclusive integer lag range [k1, k2].
class LagWindow {
public:
    LagWindow(int k1, int k2);

    /// Parses "k1:k2", e.g. "-25:24".
    static LagWindow parse(std::string_view text);
    /// The window -floor(K/2) .. floor((K-1)/2).
    static LagWindow centered(int size);

    [[nodiscard]] int k1() const noexcept { return k1_; }
    [[nodiscard]] int k2() const noexcept { return k2_; }
    [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(k2_ - k1_ + 1); }
    [[nodiscard]] bool contains(int lag) const noexcept { return lag >= k1_ && lag <= k2_; }
    [[nodiscard]] int lag(std::size_t index) const noexcept { return k1_ + static_cast<int>(index); }
    [[nodiscard]] std::size_t index(int lag) const noexcept { return static_cast<std::size_t>(lag - k1_); }
    [[nodiscard]] bool is_centered() const noexcept;
    [[nodiscard]] std::string to_string() const;

    /// Throws singular_window unless -(n-1) < k1 and k2 < n-1.
    void require_correctable(std::size_t n) const;
    /// Throws singular_window unless -(nx-1) < k1 and k2 < ny-1.
    void require_correctable(std::size_t nx, std::size_t ny) const;

    friend bool operator==(const LagWindow&, const LagWindow&) = default;

private:
    int k1_;
    int k2_;
};

enum class EstimateKind { autocovariance, cross };

std::string_view kind_name(EstimateKind kind) noexcept;

/// Covariance values over a contiguous lag window, with the pair weights W_k
/// that normalised them.
class CovarianceEstimate {
public:
    CovarianceEstimate(LagWindow window, std::vector<double> values, std::vector<double> pair_weights,
                       double dt, EstimateKind kind, bool corrected, Fingerprint weight_fingerprint);

    [[nodiscard]] const LagWindow& window() const noexcept { return window_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] std::span<const double> pair_weights() const noexcept { return pair_weights_; }
    [[nodiscard]] double at_lag(int lag) const;
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] EstimateKind kind() const noexcept { return kind_; }
    [[nodiscard]] bool corrected() const noexcept { return corrected_; }
    [[nodiscard]] Fingerprint weight_fingerprint() const noexcept { return fingerprint_; }

private:
    LagWindow window_;
    std::vector<double> values_;
    std::vector<double> pair_weights_;
    double dt_;
    EstimateKind kind_;
    bool corrected_;
    Fingerprint fingerprint_;
};

/// K x K operator sending a covariance hypothesis on the window to the
/// expectation of the raw estimate. Rows are indexed by k, columns by j.
struct MappingMatrix {
    Eigen::MatrixXd entries;
    LagWindow window;
    Fingerprint weight_fingerprint;
    EstimateKind kind;

    [[nodiscard]] double at(int k, int j) const {
        return entries(static_cast<Eigen::Index>(window.index(k)), static_cast<Eigen::Index>(window.index(j)));
    }
};

/// Wiener-Khinchin transform of a covariance window. Frequencies ascend from
/// -floor(K/2)/(K dt) to floor((K-1)/2)/(K dt). The source window, pair
/// weights and fingerprint are retained so the inverse transform restores a
/// complete CovarianceEstimate.
struct SpectrumEstimate {
    std::vector<double> frequencies;
    std::vector<std::complex<double>> values;
    EstimateKind kind = EstimateKind::autocovariance;
    double dt = 1.0;
    LagWindow source_window{0, 0};
    std::vector<double> source_pair_weights;
    bool corrected = false;
    Fingerprint weight_fingerprint = 0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

struct MomentSummary {
    double mean = 0.0;
    double raw_variance = 0.0;
    double mean_estimator_variance = 0.0;
    double corrected_variance = 0.0;
    double total_weight = 0.0;
};

}  // namespace gapspec
