#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gapspec/simgen.hpp"
#include "gapspec/types.hpp"

namespace gapspec {

enum class Estimator {
    valid_only_raw,
    valid_only_corrected,
    sample_and_hold,
    lomb_scargle_raw,
    lomb_scargle_corrected,
};

inline constexpr std::size_t kEstimatorCount = 5;

std::string_view estimator_name(Estimator e) noexcept;
/// Throws config_error for an unknown name.
Estimator parse_estimator(std::string_view name);

/// Result curves. Lomb-Scargle estimators fill auto_covariance and
/// lomb_scargle_spectrum; the others fill the remaining four.
enum class Curve { auto_covariance, auto_spectrum, cross_covariance, cross_spectrum, lomb_scargle_spectrum };

inline constexpr std::size_t kCurveCount = 5;

std::string_view curve_name(Curve c) noexcept;

/// Monte-Carlo experiment description, read from JSON (`"schema": 1`).
///
///   {
///     "schema": 1,
///     "experiment": "bias" | "rms",
///     "process": {"family": "moving_average" | "autoregressive",
///                 "ma_kernel": [...], "ar_coefficient": 0.9,
///                 "mean": 8, "target_variance": 4,
///                 "cross_delay": 10, "cross_mix": 0.75, "seed": 1},
///     "gaps": {"kind": "bernoulli" | "markov" | "static_mask",
///              "valid_probability": 0.5, "switch_probability": 0.1,
///              "mask": [...], "seed": 2},
///     "n_samples": 100 | [100, 10000],
///     "n_realizations": 1000,
///     "dt": 1,
///     "window": "-25:24",            (or [k1, k2])
///     "cross_window": "-20:29",      (optional; cross curves skipped if absent)
///     "estimators": ["valid_only_raw", ...],   (optional; default all)
///     "output_dir": "results/fig2",  (optional; nothing written if empty)
///     "base_seed": 42,
///     "threads": 0,                  (0: one per hardware thread)
///     "condition_threshold": 1e12,
///     "alpha_prime": 0.5             (optional; default D/N per realization)
///   }
///
/// n_samples counts every sample, valid or not. A free-text "description" is
/// accepted; any other unknown key is rejected.
struct ExperimentConfig {
    std::string experiment = "bias";
    ProcessSpec process;
    GapModelSpec gaps;
    std::vector<std::size_t> n_samples{100};
    std::size_t n_realizations = 1000;
    double dt = 1.0;
    LagWindow window{-25, 24};
    std::optional<LagWindow> cross_window;
    std::vector<Estimator> estimators{Estimator::valid_only_raw, Estimator::valid_only_corrected,
                                      Estimator::sample_and_hold, Estimator::lomb_scargle_raw,
                                      Estimator::lomb_scargle_corrected};
    std::filesystem::path output_dir;
    std::uint64_t base_seed = 0;
    unsigned threads = 0;
    double condition_threshold = 1e12;
    std::optional<double> alpha_prime;

    /// Throws config_error (or singular_window for an unusable window).
    void validate() const;
    [[nodiscard]] bool uses(Estimator e) const noexcept;
};

ExperimentConfig parse_experiment_config(std::string_view json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
std::string experiment_config_to_json(const ExperimentConfig& config);

/// GAPSPEC_OUTPUT_DIR replaces output_dir, GAPSPEC_THREADS replaces threads.
void apply_environment_overrides(ExperimentConfig& config);

/// Per-bin statistics of one estimator curve over the averaged realizations.
struct CurveSummary {
    Estimator estimator;
    Curve curve;
    /// Lags for covariance curves, frequencies for spectra.
    std::vector<double> grid;
    std::vector<std::complex<double>> truth;
    std::vector<std::complex<double>> mean;
    std::vector<double> se_real;
    std::vector<double> se_imag;
    /// sqrt(mean |estimate - truth|^2).
    std::vector<double> rms;
    std::size_t averaged = 0;
    std::size_t excluded = 0;
};

/// Comparison of a raw estimator against a per-realization prediction of its
/// expectation: A * gamma for valid-only covariances, truth plus the offset
/// constant for Lomb-Scargle spectra.
struct ReferenceSummary {
    Estimator estimator;
    Curve curve;
    std::vector<double> grid;
    std::vector<double> reference_mean;
    /// Paired (estimate - reference) statistics.
    std::vector<double> residual_mean;
    std::vector<double> residual_se;
    std::size_t count = 0;
};

/// Worst relative deviations from the transform identities over every
/// spectrum produced in a run.
///
/// Reality is checked on auto spectra of even covariance functions: raw and
/// sample-and-hold estimates, and corrected estimates on windows k1 = -k2.
/// A corrected estimate on a window with an unpaired lag (e.g. -25..24) is
/// not even in k, so its imaginary part is only reported, together with the
/// largest |C_k - C_-k| relative to max |C|.
struct SpectrumAudit {
    std::size_t spectra_checked = 0;
    std::size_t auto_spectra_checked = 0;
    double max_zero_frequency_error = 0.0;
    double max_round_trip_error = 0.0;
    double max_auto_imaginary = 0.0;
    std::size_t asymmetric_auto_spectra = 0;
    double max_asymmetric_auto_imaginary = 0.0;
    double max_auto_asymmetry = 0.0;
};

struct FailureRecord {
    std::size_t realization = 0;
    Estimator estimator;
    /// "auto" or "cross".
    std::string group;
    std::string code;
    std::string message;
};

struct SampleSizeResult {
    std::size_t n_samples = 0;
    std::uint64_t process_seed = 0;
    std::uint64_t gap_seed = 0;
    std::vector<CurveSummary> curves;
    std::vector<ReferenceSummary> references;
    SpectrumAudit audit;
    std::vector<FailureRecord> failures;

    [[nodiscard]] const CurveSummary* find(Estimator e, Curve c) const noexcept;
    [[nodiscard]] const ReferenceSummary* find_reference(Estimator e, Curve c) const noexcept;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<SampleSizeResult> runs;
    std::string timestamp;
    double wall_seconds = 0.0;
    std::vector<std::filesystem::path> files;

    [[nodiscard]] const SampleSizeResult* run_for(std::size_t n) const noexcept;
};

/// Writes `*_mean.csv`, reference.csv, failures.csv per sample size and a
/// manifest.json when output_dir is set.
ExperimentResult run_bias_experiment(const ExperimentConfig& config);

/// Writes `*_rms.csv`, failures.csv per sample size and a manifest.json when
/// output_dir is set.
ExperimentResult run_rms_experiment(const ExperimentConfig& config);

/// Dispatches on config.experiment.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Stream seeds derived from base_seed, the component seed and the sample size.
std::uint64_t process_stream_seed(const ExperimentConfig& config, std::size_t n) noexcept;
std::uint64_t gap_stream_seed(const ExperimentConfig& config, std::size_t n) noexcept;

}  // namespace gapspec
