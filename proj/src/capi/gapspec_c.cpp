#include "gapspec/gapspec.h"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <utility>

#include "gapspec/baselines.hpp"
#include "gapspec/bias_correction.hpp"
#include "gapspec/covariance.hpp"
#include "gapspec/csv_export.hpp"
#include "gapspec/error.hpp"
#include "gapspec/harness.hpp"
#include "gapspec/moments.hpp"
#include "gapspec/series_io.hpp"
#include "gapspec/spectrum.hpp"

struct gs_series {
    gapspec::GappySeries value;
};
struct gs_covariance {
    gapspec::CovarianceEstimate value;
};
struct gs_matrix {
    gapspec::MappingMatrix value;
};
struct gs_spectrum {
    gapspec::SpectrumEstimate value;
};
struct gs_ls_spectrum {
    gapspec::LombScargleSpectrum value;
};

namespace {

thread_local std::string last_error;

gs_status set_error(gs_status status, const char* message) {
    last_error = message;
    return status;
}

/// Runs `body`, translating exceptions into status codes.
template <typename F>
gs_status guarded(F&& body) {
    try {
        body();
        return GS_OK;
    } catch (const gapspec::Error& e) {
        return set_error(static_cast<gs_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(GS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(GS_ERR_INTERNAL, e.what());
    } catch (...) {
        return set_error(GS_ERR_INTERNAL, "unknown failure");
    }
}

void require(bool condition, const char* what) {
    if (!condition) gapspec::fail(gapspec::Errc::invalid_argument, what);
}

void copy_out(std::span<const double> src, double* out, std::size_t capacity) {
    require(out != nullptr, "output buffer is null");
    if (capacity < src.size()) {
        gapspec::fail(gapspec::Errc::dimension_mismatch, "output buffer holds " + std::to_string(capacity) +
                                                             " elements, " + std::to_string(src.size()) +
                                                             " required");
    }
    std::copy(src.begin(), src.end(), out);
}

gapspec::Route route_of(gs_route r) {
    switch (r) {
        case GS_ROUTE_AUTO:
            return gapspec::Route::automatic;
        case GS_ROUTE_DIRECT:
            return gapspec::Route::direct;
        case GS_ROUTE_FFT:
            return gapspec::Route::fft;
    }
    gapspec::fail(gapspec::Errc::invalid_argument, "unknown route");
}

std::string_view method_of(const char* method) { return method == nullptr ? std::string_view{} : method; }

gs_status run_config(gapspec::ExperimentConfig config, const char* output_dir, const uint64_t* seed,
                     unsigned threads) {
    gapspec::apply_environment_overrides(config);
    if (output_dir != nullptr) config.output_dir = output_dir;
    if (seed != nullptr) config.base_seed = *seed;
    if (threads > 0) config.threads = threads;
    (void)gapspec::run_experiment(config);
    return GS_OK;
}

}  // namespace

extern "C" {

const char* gs_version(void) { return GAPSPEC_VERSION; }

const char* gs_status_name(gs_status status) {
    switch (status) {
        case GS_OK:
            return "OK";
        case GS_ERR_INVALID_ARGUMENT:
            return "INVALID_ARGUMENT";
        case GS_ERR_LENGTH_MISMATCH:
            return "LENGTH_MISMATCH";
        case GS_ERR_NEGATIVE_WEIGHT:
            return "NEGATIVE_WEIGHT";
        case GS_ERR_NON_BINARY_WEIGHT:
            return "NON_BINARY_WEIGHT";
        case GS_ERR_ALL_INVALID:
            return "ALL_INVALID";
        case GS_ERR_NON_POSITIVE_DT:
            return "NON_POSITIVE_DT";
        case GS_ERR_PARSE:
            return "PARSE_ERROR";
        case GS_ERR_INSUFFICIENT_PAIR_COVERAGE:
            return "INSUFFICIENT_PAIR_COVERAGE";
        case GS_ERR_DT_MISMATCH:
            return "DT_MISMATCH";
        case GS_ERR_SINGULAR_WINDOW:
            return "SINGULAR_WINDOW";
        case GS_ERR_SINGULAR_MATRIX:
            return "SINGULAR_MATRIX";
        case GS_ERR_FINGERPRINT_MISMATCH:
            return "FINGERPRINT_MISMATCH";
        case GS_ERR_WINDOW_MISMATCH:
            return "WINDOW_MISMATCH";
        case GS_ERR_DIMENSION_MISMATCH:
            return "DIMENSION_MISMATCH";
        case GS_ERR_WINDOW_TOO_NARROW:
            return "WINDOW_TOO_NARROW";
        case GS_ERR_TOO_FEW_SAMPLES:
            return "TOO_FEW_SAMPLES";
        case GS_ERR_IO:
            return "IO_ERROR";
        case GS_ERR_CONFIG:
            return "CONFIG_ERROR";
        case GS_ERR_INTERNAL:
            return "INTERNAL";
    }
    return "UNKNOWN";
}

const char* gs_last_error_message(void) { return last_error.c_str(); }

// ---- series

gs_status gs_series_create(const double* values, const double* weights, size_t n, double dt, gs_series** out) {
    return guarded([&] {
        require(out != nullptr, "out is null");
        require(values != nullptr || n == 0, "values is null");
        std::vector<double> v(values, values + n);
        std::vector<double> w = weights != nullptr ? std::vector<double>(weights, weights + n) : std::vector<double>(n, 1.0);
        *out = new gs_series{gapspec::GappySeries(std::move(v), std::move(w), dt)};
    });
}

gs_status gs_series_read_csv(const char* path, double dt, gs_series** out) {
    return guarded([&] {
        require(path != nullptr && out != nullptr, "null argument");
        *out = new gs_series{gapspec::read_series_csv(path, dt)};
    });
}

gs_status gs_series_write_csv(const gs_series* series, const char* path) {
    return guarded([&] {
        require(series != nullptr && path != nullptr, "null argument");
        gapspec::write_series_csv(path, series->value);
    });
}

void gs_series_destroy(gs_series* series) { delete series; }

size_t gs_series_length(const gs_series* series) { return series == nullptr ? 0 : series->value.size(); }

double gs_series_dt(const gs_series* series) { return series == nullptr ? 0.0 : series->value.dt(); }

gs_status gs_series_values(const gs_series* series, double* out, size_t capacity) {
    return guarded([&] {
        require(series != nullptr, "series is null");
        copy_out(series->value.values(), out, capacity);
    });
}

gs_status gs_series_weights(const gs_series* series, double* out, size_t capacity) {
    return guarded([&] {
        require(series != nullptr, "series is null");
        copy_out(series->value.weights(), out, capacity);
    });
}

gs_status gs_series_validate(const gs_series* series, int binary) {
    return guarded([&] {
        require(series != nullptr, "series is null");
        gapspec::validate_series(series->value, binary ? gapspec::WeightMode::binary : gapspec::WeightMode::general);
    });
}

gs_status gs_sample_and_hold(const gs_series* series, gs_series** out) {
    return guarded([&] {
        require(series != nullptr && out != nullptr, "null argument");
        *out = new gs_series{gapspec::sample_and_hold(series->value)};
    });
}

gs_status gs_weights_read(const char* path, double** out, size_t* n) {
    return guarded([&] {
        require(path != nullptr && out != nullptr && n != nullptr, "null argument");
        const auto weights = gapspec::deserialize_weights(gapspec::read_text_file(path));
        auto* buffer = static_cast<double*>(std::malloc(std::max<std::size_t>(1, weights.size()) * sizeof(double)));
        if (buffer == nullptr) throw std::bad_alloc();
        std::copy(weights.begin(), weights.end(), buffer);
        *out = buffer;
        *n = weights.size();
    });
}

void gs_free(void* ptr) { std::free(ptr); }

// ---- moments

gs_status gs_weighted_mean(const gs_series* series, double* out) {
    return guarded([&] {
        require(series != nullptr && out != nullptr, "null argument");
        *out = gapspec::weighted_mean(series->value);
    });
}

gs_status gs_weighted_variance(const gs_series* series, double* out) {
    return guarded([&] {
        require(series != nullptr && out != nullptr, "null argument");
        *out = gapspec::weighted_variance(series->value);
    });
}

gs_status gs_corrected_variance(const gs_series* series, const gs_covariance* corrected, gs_moments* out) {
    return guarded([&] {
        require(series != nullptr && corrected != nullptr && out != nullptr, "null argument");
        const auto m = gapspec::corrected_variance(series->value, corrected->value);
        *out = gs_moments{m.mean, m.raw_variance, m.mean_estimator_variance, m.corrected_variance, m.total_weight};
    });
}

// ---- covariance

gs_status gs_autocovariance(const gs_series* series, int k1, int k2, gs_route route, gs_covariance** out) {
    return guarded([&] {
        require(series != nullptr && out != nullptr, "null argument");
        *out = new gs_covariance{gapspec::autocovariance(series->value, gapspec::LagWindow(k1, k2), route_of(route))};
    });
}

gs_status gs_crosscovariance(const gs_series* x, const gs_series* y, int k1, int k2, gs_route route,
                             gs_covariance** out) {
    return guarded([&] {
        require(x != nullptr && y != nullptr && out != nullptr, "null argument");
        *out = new gs_covariance{
            gapspec::crosscovariance(x->value, y->value, gapspec::LagWindow(k1, k2), route_of(route))};
    });
}

void gs_covariance_destroy(gs_covariance* cov) { delete cov; }

size_t gs_covariance_size(const gs_covariance* cov) { return cov == nullptr ? 0 : cov->value.size(); }

int gs_covariance_first_lag(const gs_covariance* cov) { return cov == nullptr ? 0 : cov->value.window().k1(); }

gs_kind gs_covariance_kind(const gs_covariance* cov) {
    return cov != nullptr && cov->value.kind() == gapspec::EstimateKind::cross ? GS_KIND_CROSS : GS_KIND_AUTO;
}

int gs_covariance_is_corrected(const gs_covariance* cov) { return cov != nullptr && cov->value.corrected() ? 1 : 0; }

gs_status gs_covariance_values(const gs_covariance* cov, double* out, size_t capacity) {
    return guarded([&] {
        require(cov != nullptr, "covariance is null");
        copy_out(cov->value.values(), out, capacity);
    });
}

gs_status gs_covariance_pair_weights(const gs_covariance* cov, double* out, size_t capacity) {
    return guarded([&] {
        require(cov != nullptr, "covariance is null");
        copy_out(cov->value.pair_weights(), out, capacity);
    });
}

gs_status gs_covariance_write_csv(const gs_covariance* cov, const char* path, const char* method) {
    return guarded([&] {
        require(cov != nullptr && path != nullptr, "null argument");
        gapspec::write_covariance_csv(path, cov->value, method_of(method));
    });
}

// ---- matrix

gs_status gs_auto_matrix(const double* weights, size_t n, int k1, int k2, gs_matrix** out) {
    return guarded([&] {
        require(weights != nullptr && out != nullptr, "null argument");
        *out = new gs_matrix{
            gapspec::build_auto_matrix(std::span<const double>(weights, n), gapspec::LagWindow(k1, k2))};
    });
}

gs_status gs_cross_matrix(const double* wx, size_t nx, const double* wy, size_t ny, int k1, int k2,
                          gs_matrix** out) {
    return guarded([&] {
        require(wx != nullptr && wy != nullptr && out != nullptr, "null argument");
        *out = new gs_matrix{gapspec::build_cross_matrix(std::span<const double>(wx, nx),
                                                         std::span<const double>(wy, ny), gapspec::LagWindow(k1, k2))};
    });
}

void gs_matrix_destroy(gs_matrix* matrix) { delete matrix; }

size_t gs_matrix_size(const gs_matrix* matrix) { return matrix == nullptr ? 0 : matrix->value.window.size(); }

gs_status gs_matrix_entries(const gs_matrix* matrix, double* out, size_t capacity) {
    return guarded([&] {
        require(matrix != nullptr, "matrix is null");
        const Eigen::MatrixXd row_major = matrix->value.entries.transpose();
        copy_out(std::span<const double>(row_major.data(), static_cast<std::size_t>(row_major.size())), out,
                 capacity);
    });
}

gs_status gs_matrix_write_csv(const gs_matrix* matrix, const char* path) {
    return guarded([&] {
        require(matrix != nullptr && path != nullptr, "null argument");
        gapspec::write_matrix_csv(path, matrix->value);
    });
}

gs_status gs_correct_covariance(const gs_covariance* raw, const gs_matrix* matrix, double threshold,
                                gs_covariance** out, double* condition_out) {
    return guarded([&] {
        require(raw != nullptr && matrix != nullptr && out != nullptr, "null argument");
        gapspec::CorrectionOptions options;
        if (threshold > 0.0) options.condition_threshold = threshold;
        try {
            auto corrected = gapspec::correct_covariance(raw->value, matrix->value, options);
            if (condition_out != nullptr) *condition_out = corrected.condition_estimate;
            *out = new gs_covariance{std::move(corrected.estimate)};
        } catch (const gapspec::SingularMatrixError& e) {
            if (condition_out != nullptr) *condition_out = e.condition_estimate();
            throw;
        }
    });
}

gs_status gs_predict_expected(const gs_matrix* matrix, const double* gamma, double* out, size_t k) {
    return guarded([&] {
        require(matrix != nullptr && gamma != nullptr, "null argument");
        const auto expected = gapspec::predict_expected_covariance(matrix->value, std::span<const double>(gamma, k));
        copy_out(expected, out, k);
    });
}

// ---- spectra

gs_status gs_spectrum_from_covariance(const gs_covariance* cov, gs_spectrum** out) {
    return guarded([&] {
        require(cov != nullptr && out != nullptr, "null argument");
        *out = new gs_spectrum{gapspec::covariance_to_spectrum(cov->value)};
    });
}

gs_status gs_spectrum_to_covariance(const gs_spectrum* spec, gs_covariance** out) {
    return guarded([&] {
        require(spec != nullptr && out != nullptr, "null argument");
        *out = new gs_covariance{gapspec::spectrum_to_covariance(spec->value)};
    });
}

void gs_spectrum_destroy(gs_spectrum* spec) { delete spec; }

size_t gs_spectrum_size(const gs_spectrum* spec) { return spec == nullptr ? 0 : spec->value.size(); }

gs_status gs_spectrum_values(const gs_spectrum* spec, double* freq, double* re, double* im, size_t capacity) {
    return guarded([&] {
        require(spec != nullptr, "spectrum is null");
        const auto& s = spec->value;
        if (capacity < s.size()) gapspec::fail(gapspec::Errc::dimension_mismatch, "output buffers too small");
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (freq != nullptr) freq[i] = s.frequencies[i];
            if (re != nullptr) re[i] = s.values[i].real();
            if (im != nullptr) im[i] = s.values[i].imag();
        }
    });
}

gs_status gs_spectrum_write_csv(const gs_spectrum* spec, const char* path, const char* method) {
    return guarded([&] {
        require(spec != nullptr && path != nullptr, "null argument");
        gapspec::write_spectrum_csv(path, spec->value, method_of(method));
    });
}

// ---- Lomb-Scargle

gs_status gs_lomb_scargle(const gs_series* series, const double* freqs, size_t count, gs_ls_spectrum** out) {
    return guarded([&] {
        require(series != nullptr && out != nullptr && (freqs != nullptr || count == 0), "null argument");
        *out = new gs_ls_spectrum{gapspec::lomb_scargle(series->value, std::span<const double>(freqs, count))};
    });
}

gs_status gs_lomb_scargle_grid(int k1, int k2, double dt, double* out, size_t capacity, size_t* count) {
    return guarded([&] {
        const auto grid = gapspec::lomb_scargle_grid(gapspec::LagWindow(k1, k2), dt);
        copy_out(grid, out, capacity);
        if (count != nullptr) *count = grid.size();
    });
}

gs_status gs_lomb_scargle_offset_correct(const gs_ls_spectrum* spec, const gs_series* series, double alpha_prime,
                                         gs_ls_spectrum** out) {
    return guarded([&] {
        require(spec != nullptr && series != nullptr && out != nullptr, "null argument");
        const double alpha = alpha_prime > 0.0 ? alpha_prime : gapspec::default_alpha_prime(series->value);
        *out = new gs_ls_spectrum{gapspec::lomb_scargle_offset_correct(spec->value, series->value, alpha)};
    });
}

void gs_ls_spectrum_destroy(gs_ls_spectrum* spec) { delete spec; }

size_t gs_ls_spectrum_size(const gs_ls_spectrum* spec) { return spec == nullptr ? 0 : spec->value.values.size(); }

gs_status gs_ls_spectrum_values(const gs_ls_spectrum* spec, double* freq, double* power, size_t capacity) {
    return guarded([&] {
        require(spec != nullptr, "spectrum is null");
        const auto& s = spec->value;
        if (capacity < s.values.size()) gapspec::fail(gapspec::Errc::dimension_mismatch, "output buffers too small");
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            if (freq != nullptr) freq[i] = s.frequencies[i];
            if (power != nullptr) power[i] = s.values[i];
        }
    });
}

gs_status gs_ls_spectrum_write_csv(const gs_ls_spectrum* spec, const char* path, const char* method) {
    return guarded([&] {
        require(spec != nullptr && path != nullptr, "null argument");
        gapspec::write_lomb_scargle_csv(path, spec->value, method_of(method));
    });
}

// ---- experiments

gs_status gs_run_experiment_file(const char* config_path, const char* output_dir, const uint64_t* seed,
                                 unsigned threads) {
    return guarded([&] {
        require(config_path != nullptr, "config path is null");
        run_config(gapspec::load_experiment_config(config_path), output_dir, seed, threads);
    });
}

gs_status gs_run_experiment_json(const char* config_json, const char* output_dir, const uint64_t* seed,
                                 unsigned threads) {
    return guarded([&] {
        require(config_json != nullptr, "config text is null");
        run_config(gapspec::parse_experiment_config(config_json), output_dir, seed, threads);
    });
}

}  // extern "C"
