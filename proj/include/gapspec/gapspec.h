#ifndef GAPSPEC_GAPSPEC_H
#define GAPSPEC_GAPSPEC_H

/*
 * C interface to gapspec: covariance, spectrum and moment estimation for
 * equidistant series with invalid samples.
 *
 * All objects are opaque handles created by gs_*_create / gs_* functions and
 * released with the matching gs_*_destroy (NULL is accepted). Every function
 * that can fail returns a gs_status; on failure the calling thread's message
 * is available from gs_last_error_message() until the next failing call.
 * Output handles are written only on success.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(GAPSPEC_BUILDING_LIBRARY)
#define GS_API __attribute__((visibility("default")))
#else
#define GS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gs_status {
    GS_OK = 0,
    GS_ERR_INVALID_ARGUMENT = 1,
    GS_ERR_LENGTH_MISMATCH = 2,
    GS_ERR_NEGATIVE_WEIGHT = 3,
    GS_ERR_NON_BINARY_WEIGHT = 4,
    GS_ERR_ALL_INVALID = 5,
    GS_ERR_NON_POSITIVE_DT = 6,
    GS_ERR_PARSE = 7,
    GS_ERR_INSUFFICIENT_PAIR_COVERAGE = 8,
    GS_ERR_DT_MISMATCH = 9,
    GS_ERR_SINGULAR_WINDOW = 10,
    GS_ERR_SINGULAR_MATRIX = 11,
    GS_ERR_FINGERPRINT_MISMATCH = 12,
    GS_ERR_WINDOW_MISMATCH = 13,
    GS_ERR_DIMENSION_MISMATCH = 14,
    GS_ERR_WINDOW_TOO_NARROW = 15,
    GS_ERR_TOO_FEW_SAMPLES = 16,
    GS_ERR_IO = 17,
    GS_ERR_CONFIG = 18,
    GS_ERR_INTERNAL = 99
} gs_status;

typedef enum gs_route { GS_ROUTE_AUTO = 0, GS_ROUTE_DIRECT = 1, GS_ROUTE_FFT = 2 } gs_route;

typedef enum gs_kind { GS_KIND_AUTO = 0, GS_KIND_CROSS = 1 } gs_kind;

typedef struct gs_series gs_series;
typedef struct gs_covariance gs_covariance;
typedef struct gs_matrix gs_matrix;
typedef struct gs_spectrum gs_spectrum;
typedef struct gs_ls_spectrum gs_ls_spectrum;

typedef struct gs_moments {
    double mean;
    double raw_variance;
    double mean_estimator_variance;
    double corrected_variance;
    double total_weight;
} gs_moments;

/* ---- library ---- */

GS_API const char* gs_version(void);
/* Upper-case identifier such as "ALL_INVALID"; "OK" for GS_OK. */
GS_API const char* gs_status_name(gs_status status);
/* Message of the calling thread's most recent failure ("" if none). */
GS_API const char* gs_last_error_message(void);

/* ---- series ---- */

/* weights may be NULL (all samples valid). Inputs are copied. */
GS_API gs_status gs_series_create(const double* values, const double* weights, size_t n, double dt, gs_series** out);
/* CSV layout index,value,weight with an optional header line. */
GS_API gs_status gs_series_read_csv(const char* path, double dt, gs_series** out);
GS_API gs_status gs_series_write_csv(const gs_series* series, const char* path);
GS_API void gs_series_destroy(gs_series* series);
GS_API size_t gs_series_length(const gs_series* series);
GS_API double gs_series_dt(const gs_series* series);
/* Copies up to `capacity` elements; returns GS_ERR_DIMENSION_MISMATCH if too small. */
GS_API gs_status gs_series_values(const gs_series* series, double* out, size_t capacity);
GS_API gs_status gs_series_weights(const gs_series* series, double* out, size_t capacity);
/* binary != 0 additionally requires every weight to be 0 or 1. */
GS_API gs_status gs_series_validate(const gs_series* series, int binary);
GS_API gs_status gs_sample_and_hold(const gs_series* series, gs_series** out);
/* Reads weights from a one-column file or the third column of a series CSV.
 * *out is allocated by the library and released with gs_free. */
GS_API gs_status gs_weights_read(const char* path, double** out, size_t* n);
GS_API void gs_free(void* ptr);

/* ---- moments ---- */

GS_API gs_status gs_weighted_mean(const gs_series* series, double* out);
GS_API gs_status gs_weighted_variance(const gs_series* series, double* out);
/* corrected must be a corrected autocovariance of the same series. */
GS_API gs_status gs_corrected_variance(const gs_series* series, const gs_covariance* corrected, gs_moments* out);

/* ---- covariance ---- */

GS_API gs_status gs_autocovariance(const gs_series* series, int k1, int k2, gs_route route, gs_covariance** out);
GS_API gs_status gs_crosscovariance(const gs_series* x, const gs_series* y, int k1, int k2, gs_route route,
                                    gs_covariance** out);
GS_API void gs_covariance_destroy(gs_covariance* cov);
GS_API size_t gs_covariance_size(const gs_covariance* cov);
GS_API int gs_covariance_first_lag(const gs_covariance* cov);
GS_API gs_kind gs_covariance_kind(const gs_covariance* cov);
GS_API int gs_covariance_is_corrected(const gs_covariance* cov);
GS_API gs_status gs_covariance_values(const gs_covariance* cov, double* out, size_t capacity);
GS_API gs_status gs_covariance_pair_weights(const gs_covariance* cov, double* out, size_t capacity);
/* method may be NULL or "" for no method column. */
GS_API gs_status gs_covariance_write_csv(const gs_covariance* cov, const char* path, const char* method);

/* ---- mapping matrix and correction ---- */

GS_API gs_status gs_auto_matrix(const double* weights, size_t n, int k1, int k2, gs_matrix** out);
GS_API gs_status gs_cross_matrix(const double* wx, size_t nx, const double* wy, size_t ny, int k1, int k2,
                                 gs_matrix** out);
GS_API void gs_matrix_destroy(gs_matrix* matrix);
GS_API size_t gs_matrix_size(const gs_matrix* matrix);
/* Row-major K*K entries, rows indexed by k, columns by j. */
GS_API gs_status gs_matrix_entries(const gs_matrix* matrix, double* out, size_t capacity);
GS_API gs_status gs_matrix_write_csv(const gs_matrix* matrix, const char* path);
/* threshold <= 0 selects the default 1e12. condition_out may be NULL. */
GS_API gs_status gs_correct_covariance(const gs_covariance* raw, const gs_matrix* matrix, double threshold,
                                       gs_covariance** out, double* condition_out);
/* out[k] = sum_j A_kj gamma[j]; both arrays hold K elements. */
GS_API gs_status gs_predict_expected(const gs_matrix* matrix, const double* gamma, double* out, size_t k);

/* ---- spectra ---- */

GS_API gs_status gs_spectrum_from_covariance(const gs_covariance* cov, gs_spectrum** out);
GS_API gs_status gs_spectrum_to_covariance(const gs_spectrum* spec, gs_covariance** out);
GS_API void gs_spectrum_destroy(gs_spectrum* spec);
GS_API size_t gs_spectrum_size(const gs_spectrum* spec);
/* Any of the output arrays may be NULL. */
GS_API gs_status gs_spectrum_values(const gs_spectrum* spec, double* freq, double* re, double* im, size_t capacity);
GS_API gs_status gs_spectrum_write_csv(const gs_spectrum* spec, const char* path, const char* method);

/* ---- Lomb-Scargle ---- */

GS_API gs_status gs_lomb_scargle(const gs_series* series, const double* freqs, size_t count, gs_ls_spectrum** out);
/* Frequencies j/(K dt), j = 1..floor(K/2), for the window [k1, k2]; count receives the number written. */
GS_API gs_status gs_lomb_scargle_grid(int k1, int k2, double dt, double* out, size_t capacity, size_t* count);
/* alpha_prime <= 0 selects D/N of the series. */
GS_API gs_status gs_lomb_scargle_offset_correct(const gs_ls_spectrum* spec, const gs_series* series,
                                                double alpha_prime, gs_ls_spectrum** out);
GS_API void gs_ls_spectrum_destroy(gs_ls_spectrum* spec);
GS_API size_t gs_ls_spectrum_size(const gs_ls_spectrum* spec);
GS_API gs_status gs_ls_spectrum_values(const gs_ls_spectrum* spec, double* freq, double* power, size_t capacity);
GS_API gs_status gs_ls_spectrum_write_csv(const gs_ls_spectrum* spec, const char* path, const char* method);

/* ---- experiments ---- */

/* Runs a JSON experiment configuration. output_dir overrides the configured
 * directory when non-NULL; seed overrides base_seed when non-NULL; threads
 * overrides the thread count when > 0. Environment overrides
 * (GAPSPEC_OUTPUT_DIR, GAPSPEC_THREADS) are applied before these. */
GS_API gs_status gs_run_experiment_file(const char* config_path, const char* output_dir, const uint64_t* seed,
                                        unsigned threads);
GS_API gs_status gs_run_experiment_json(const char* config_json, const char* output_dir, const uint64_t* seed,
                                        unsigned threads);

#ifdef __cplusplus
}
#endif

#endif
