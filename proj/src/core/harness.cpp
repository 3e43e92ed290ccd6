#include "gapspec/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <nlohmann/json.hpp>

#include "gapspec/baselines.hpp"
#include "gapspec/bias_correction.hpp"
#include "gapspec/covariance.hpp"
#include "gapspec/error.hpp"
#include "gapspec/moments.hpp"
#include "gapspec/series_io.hpp"
#include "gapspec/spectrum.hpp"

namespace gapspec {

using json = nlohmann::json;
using cplx = std::complex<double>;

namespace {

constexpr std::array<std::string_view, kEstimatorCount> kEstimatorNames{
    "valid_only_raw", "valid_only_corrected", "sample_and_hold", "lomb_scargle_raw", "lomb_scargle_corrected"};

constexpr std::array<std::string_view, kCurveCount> kCurveNames{
    "auto_covariance", "auto_spectrum", "cross_covariance", "cross_spectrum", "lomb_scargle_spectrum"};

constexpr std::array<Estimator, kEstimatorCount> kAllEstimators{
    Estimator::valid_only_raw, Estimator::valid_only_corrected, Estimator::sample_and_hold,
    Estimator::lomb_scargle_raw, Estimator::lomb_scargle_corrected};

constexpr std::array<Curve, kCurveCount> kAllCurves{Curve::auto_covariance, Curve::auto_spectrum,
                                                    Curve::cross_covariance, Curve::cross_spectrum,
                                                    Curve::lomb_scargle_spectrum};

std::size_t idx(Estimator e) { return static_cast<std::size_t>(e); }
std::size_t idx(Curve c) { return static_cast<std::size_t>(c); }

bool is_lomb_scargle(Estimator e) {
    return e == Estimator::lomb_scargle_raw || e == Estimator::lomb_scargle_corrected;
}

bool is_covariance_curve(Curve c) { return c == Curve::auto_covariance || c == Curve::cross_covariance; }

// ---------------------------------------------------------------- config io

[[noreturn]] void config_fail(const std::string& message) { fail(Errc::config_error, message); }

void reject_unknown_keys(const json& object, std::initializer_list<std::string_view> allowed, std::string_view where) {
    for (const auto& [key, value] : object.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            config_fail(std::string(where) + ": unknown key '" + key + "'");
        }
    }
}

double get_number(const json& j, std::string_view field) {
    if (!j.is_number()) config_fail(std::string(field) + ": expected a number");
    return j.get<double>();
}

std::uint64_t get_unsigned(const json& j, std::string_view field) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<long long>() < 0)) {
        config_fail(std::string(field) + ": expected a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

long long get_integer(const json& j, std::string_view field) {
    if (!j.is_number_integer()) config_fail(std::string(field) + ": expected an integer");
    return j.get<long long>();
}

std::vector<double> get_number_array(const json& j, std::string_view field) {
    if (!j.is_array()) config_fail(std::string(field) + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(get_number(v, field));
    return out;
}

std::string get_string(const json& j, std::string_view field) {
    if (!j.is_string()) config_fail(std::string(field) + ": expected a string");
    return j.get<std::string>();
}

LagWindow get_window(const json& j, std::string_view field) {
    try {
        if (j.is_string()) return LagWindow::parse(j.get<std::string>());
        if (j.is_array() && j.size() == 2) {
            return LagWindow(static_cast<int>(get_integer(j[0], field)), static_cast<int>(get_integer(j[1], field)));
        }
    } catch (const Error& e) {
        config_fail(std::string(field) + ": " + e.what());
    }
    config_fail(std::string(field) + ": expected \"k1:k2\" or [k1, k2]");
}

ProcessSpec parse_process(const json& j) {
    if (!j.is_object()) config_fail("process: expected an object");
    reject_unknown_keys(j,
                        {"family", "ma_kernel", "ar_coefficient", "mean", "target_variance", "cross_delay",
                         "cross_mix", "seed"},
                        "process");
    ProcessSpec p;
    if (j.contains("family")) {
        const auto family = get_string(j["family"], "process.family");
        if (family == "moving_average") {
            p.family = ProcessFamily::moving_average;
        } else if (family == "autoregressive") {
            p.family = ProcessFamily::autoregressive;
        } else {
            config_fail("process.family: unknown family '" + family + "'");
        }
    }
    if (j.contains("ma_kernel")) p.ma_kernel = get_number_array(j["ma_kernel"], "process.ma_kernel");
    if (j.contains("ar_coefficient")) p.ar_coefficient = get_number(j["ar_coefficient"], "process.ar_coefficient");
    if (j.contains("mean")) p.mean = get_number(j["mean"], "process.mean");
    if (j.contains("target_variance")) p.target_variance = get_number(j["target_variance"], "process.target_variance");
    if (j.contains("cross_delay")) p.cross_delay = static_cast<int>(get_integer(j["cross_delay"], "process.cross_delay"));
    if (j.contains("cross_mix")) p.cross_mix = get_number(j["cross_mix"], "process.cross_mix");
    if (j.contains("seed")) p.seed = get_unsigned(j["seed"], "process.seed");
    return p;
}

GapModelSpec parse_gaps(const json& j) {
    if (!j.is_object()) config_fail("gaps: expected an object");
    reject_unknown_keys(j, {"kind", "valid_probability", "switch_probability", "mask", "seed"}, "gaps");
    GapModelSpec g;
    if (j.contains("kind")) {
        const auto kind = get_string(j["kind"], "gaps.kind");
        if (kind == "bernoulli") {
            g.kind = GapKind::bernoulli;
        } else if (kind == "markov") {
            g.kind = GapKind::markov;
        } else if (kind == "static_mask") {
            g.kind = GapKind::static_mask;
        } else {
            config_fail("gaps.kind: unknown kind '" + kind + "'");
        }
    }
    if (j.contains("valid_probability")) {
        g.valid_probability = get_number(j["valid_probability"], "gaps.valid_probability");
    }
    if (j.contains("switch_probability")) {
        g.switch_probability = get_number(j["switch_probability"], "gaps.switch_probability");
    }
    if (j.contains("mask")) g.mask = get_number_array(j["mask"], "gaps.mask");
    if (j.contains("seed")) g.seed = get_unsigned(j["seed"], "gaps.seed");
    return g;
}

json window_json(const LagWindow& w) { return w.to_string(); }

// ---------------------------------------------------------------- statistics

class Neumaier {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Realization-major storage for one (estimator, curve) pair. Workers write
/// disjoint rows.
struct Column {
    Estimator estimator;
    Curve curve;
    std::vector<double> grid;
    std::vector<cplx> truth;
    std::size_t length = 0;
    std::vector<unsigned char> ok;
    std::vector<cplx> data;

    void put(std::size_t r, std::span<const cplx> values) {
        std::copy(values.begin(), values.end(), data.begin() + static_cast<std::ptrdiff_t>(r * length));
        ok[r] = 1;
    }
    void put(std::size_t r, std::span<const double> values) {
        for (std::size_t i = 0; i < length; ++i) data[r * length + i] = values[i];
        ok[r] = 1;
    }
};

struct ReferenceColumn {
    Estimator estimator;
    Curve curve;
    std::vector<double> grid;
    std::size_t length = 0;
    std::vector<unsigned char> ok;
    std::vector<double> value;
    std::vector<double> reference;

    void put(std::size_t r, std::span<const double> v, std::span<const double> ref) {
        std::copy(v.begin(), v.end(), value.begin() + static_cast<std::ptrdiff_t>(r * length));
        std::copy(ref.begin(), ref.end(), reference.begin() + static_cast<std::ptrdiff_t>(r * length));
        ok[r] = 1;
    }
};

struct AuditSample {
    std::size_t spectra = 0;
    std::size_t auto_spectra = 0;
    double zero_frequency = 0.0;
    double round_trip = 0.0;
    double auto_imaginary = 0.0;
    std::size_t asymmetric_spectra = 0;
    double asymmetric_imaginary = 0.0;
    double asymmetry = 0.0;
};

CurveSummary summarize(const Column& col, std::size_t realizations) {
    CurveSummary s{col.estimator, col.curve, col.grid, col.truth, {}, {}, {}, {}, 0, 0};
    const std::size_t len = col.length;
    s.mean.assign(len, cplx(kNaN, kNaN));
    s.se_real.assign(len, kNaN);
    s.se_imag.assign(len, kNaN);
    s.rms.assign(len, kNaN);
    for (std::size_t r = 0; r < realizations; ++r) s.averaged += col.ok[r];
    s.excluded = realizations - s.averaged;
    if (s.averaged == 0) return s;
    const auto m = static_cast<double>(s.averaged);
    for (std::size_t b = 0; b < len; ++b) {
        Neumaier re;
        Neumaier im;
        for (std::size_t r = 0; r < realizations; ++r) {
            if (!col.ok[r]) continue;
            re.add(col.data[r * len + b].real());
            im.add(col.data[r * len + b].imag());
        }
        const cplx mean(re.value() / m, im.value() / m);
        Neumaier var_re;
        Neumaier var_im;
        Neumaier sq_err;
        for (std::size_t r = 0; r < realizations; ++r) {
            if (!col.ok[r]) continue;
            const cplx v = col.data[r * len + b];
            var_re.add((v.real() - mean.real()) * (v.real() - mean.real()));
            var_im.add((v.imag() - mean.imag()) * (v.imag() - mean.imag()));
            sq_err.add(std::norm(v - col.truth[b]));
        }
        s.mean[b] = mean;
        if (s.averaged > 1) {
            s.se_real[b] = std::sqrt(var_re.value() / (m - 1.0) / m);
            s.se_imag[b] = std::sqrt(var_im.value() / (m - 1.0) / m);
        }
        s.rms[b] = std::sqrt(sq_err.value() / m);
    }
    return s;
}

ReferenceSummary summarize(const ReferenceColumn& col, std::size_t realizations) {
    ReferenceSummary s{col.estimator, col.curve, col.grid, {}, {}, {}, 0};
    const std::size_t len = col.length;
    s.reference_mean.assign(len, kNaN);
    s.residual_mean.assign(len, kNaN);
    s.residual_se.assign(len, kNaN);
    for (std::size_t r = 0; r < realizations; ++r) s.count += col.ok[r];
    if (s.count == 0) return s;
    const auto m = static_cast<double>(s.count);
    for (std::size_t b = 0; b < len; ++b) {
        Neumaier ref;
        Neumaier res;
        for (std::size_t r = 0; r < realizations; ++r) {
            if (!col.ok[r]) continue;
            ref.add(col.reference[r * len + b]);
            res.add(col.value[r * len + b] - col.reference[r * len + b]);
        }
        const double mean = res.value() / m;
        Neumaier var;
        for (std::size_t r = 0; r < realizations; ++r) {
            if (!col.ok[r]) continue;
            const double d = col.value[r * len + b] - col.reference[r * len + b] - mean;
            var.add(d * d);
        }
        s.reference_mean[b] = ref.value() / m;
        s.residual_mean[b] = mean;
        if (s.count > 1) s.residual_se[b] = std::sqrt(var.value() / (m - 1.0) / m);
    }
    return s;
}

double relative(double error, double scale) {
    if (scale == 0.0) return error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return error / scale;
}

/// `even` marks estimates that are even in k by construction.
void audit_spectrum(const CovarianceEstimate& cov, const SpectrumEstimate& spec, bool even, AuditSample& audit) {
    const auto c = cov.values();
    double abs_sum = 0.0;
    Neumaier sum;
    double c_max = 0.0;
    for (double v : c) {
        sum.add(v);
        abs_sum += std::abs(v);
        c_max = std::max(c_max, std::abs(v));
    }
    const std::size_t zero_bin = spec.size() / 2;
    const double expected = spec.dt * sum.value();
    audit.zero_frequency = std::max(
        audit.zero_frequency, relative(std::abs(spec.values[zero_bin] - cplx(expected, 0.0)), spec.dt * abs_sum));

    const auto back = spectrum_to_covariance(spec);
    double diff = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) diff = std::max(diff, std::abs(back.values()[i] - c[i]));
    audit.round_trip = std::max(audit.round_trip, relative(diff, c_max));
    ++audit.spectra;

    if (spec.kind != EstimateKind::autocovariance || !cov.window().is_centered()) return;
    double s_max = 0.0;
    double im_max = 0.0;
    for (const auto& v : spec.values) {
        s_max = std::max(s_max, std::abs(v));
        im_max = std::max(im_max, std::abs(v.imag()));
    }
    const double imaginary = relative(im_max, s_max);
    const auto& w = cov.window();
    if (even || w.k1() == -w.k2()) {
        audit.auto_imaginary = std::max(audit.auto_imaginary, imaginary);
        ++audit.auto_spectra;
        return;
    }
    double asym = 0.0;
    for (int k = 1; k <= std::min(-w.k1(), w.k2()); ++k) asym = std::max(asym, std::abs(cov.at_lag(k) - cov.at_lag(-k)));
    audit.asymmetric_imaginary = std::max(audit.asymmetric_imaginary, imaginary);
    audit.asymmetry = std::max(audit.asymmetry, relative(asym, c_max));
    ++audit.asymmetric_spectra;
}

template <typename F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(count);
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    return std::max(1U, std::thread::hardware_concurrency());
}

std::vector<cplx> to_complex(std::span<const double> v) { return {v.begin(), v.end()}; }

std::vector<double> lag_grid(const LagWindow& w) {
    std::vector<double> grid;
    for (int k = w.k1(); k <= w.k2(); ++k) grid.push_back(k);
    return grid;
}

// ---------------------------------------------------------------- one sample size

class SampleSizeRun {
public:
    SampleSizeRun(const ExperimentConfig& config, std::size_t n) : config_(config), n_(n) {
        process_ = config.process;
        process_.seed = process_stream_seed(config, n);
        gaps_ = config.gaps;
        gaps_.seed = gap_stream_seed(config, n);
        const TruthRecord truth{process_};
        gamma_ = truth.autocovariance(config.window);
        if (config.cross_window) gamma_xy_ = truth.crosscovariance(*config.cross_window);
        ls_frequencies_ = lomb_scargle_grid(config.window, config.dt);
        for (auto& row : column_index_) row.fill(-1);
        for (auto& row : reference_index_) row.fill(-1);
        build_columns();
        const std::size_t r = config.n_realizations;
        failures_.resize(r);
        audits_.resize(r);
    }

    SampleSizeResult run(unsigned threads) {
        parallel_for(config_.n_realizations, threads, [this](std::size_t r) { realization(r); });
        SampleSizeResult out;
        out.n_samples = n_;
        out.process_seed = process_.seed;
        out.gap_seed = gaps_.seed;
        for (const auto& col : columns_) out.curves.push_back(summarize(col, config_.n_realizations));
        for (const auto& col : references_) out.references.push_back(summarize(col, config_.n_realizations));
        for (const auto& a : audits_) {
            out.audit.spectra_checked += a.spectra;
            out.audit.auto_spectra_checked += a.auto_spectra;
            out.audit.max_zero_frequency_error = std::max(out.audit.max_zero_frequency_error, a.zero_frequency);
            out.audit.max_round_trip_error = std::max(out.audit.max_round_trip_error, a.round_trip);
            out.audit.max_auto_imaginary = std::max(out.audit.max_auto_imaginary, a.auto_imaginary);
            out.audit.asymmetric_auto_spectra += a.asymmetric_spectra;
            out.audit.max_asymmetric_auto_imaginary =
                std::max(out.audit.max_asymmetric_auto_imaginary, a.asymmetric_imaginary);
            out.audit.max_auto_asymmetry = std::max(out.audit.max_auto_asymmetry, a.asymmetry);
        }
        for (auto& list : failures_) {
            for (auto& f : list) out.failures.push_back(std::move(f));
        }
        return out;
    }

private:
    void add_column(Estimator e, Curve c, std::vector<double> grid, std::vector<cplx> truth) {
        column_index_[idx(e)][idx(c)] = static_cast<int>(columns_.size());
        Column col{e, c, std::move(grid), std::move(truth), 0, {}, {}};
        col.length = col.grid.size();
        col.ok.assign(config_.n_realizations, 0);
        col.data.assign(config_.n_realizations * col.length, cplx{});
        columns_.push_back(std::move(col));
    }

    void add_reference(Estimator e, Curve c, std::vector<double> grid) {
        reference_index_[idx(e)][idx(c)] = static_cast<int>(references_.size());
        ReferenceColumn col{e, c, std::move(grid), 0, {}, {}, {}};
        col.length = col.grid.size();
        col.ok.assign(config_.n_realizations, 0);
        col.value.assign(config_.n_realizations * col.length, 0.0);
        col.reference.assign(config_.n_realizations * col.length, 0.0);
        references_.push_back(std::move(col));
    }

    void build_columns() {
        const auto& w = config_.window;
        const auto auto_spec_truth = wiener_khinchin(gamma_, w.k1(), config_.dt);
        std::vector<cplx> ls_truth;
        for (double f : ls_frequencies_) {
            double s = 0.0;
            for (std::size_t i = 0; i < gamma_.size(); ++i) {
                s += gamma_[i] * std::cos(2.0 * std::numbers::pi * f * w.lag(i) * config_.dt);
            }
            ls_truth.emplace_back(config_.dt * s, 0.0);
        }
        for (Estimator e : kAllEstimators) {
            if (!config_.uses(e)) continue;
            add_column(e, Curve::auto_covariance, lag_grid(w), to_complex(gamma_));
            if (is_lomb_scargle(e)) {
                add_column(e, Curve::lomb_scargle_spectrum, ls_frequencies_, ls_truth);
                continue;
            }
            add_column(e, Curve::auto_spectrum, frequency_grid(w.size(), config_.dt), auto_spec_truth);
            if (config_.cross_window) {
                const auto& wc = *config_.cross_window;
                add_column(e, Curve::cross_covariance, lag_grid(wc), to_complex(gamma_xy_));
                add_column(e, Curve::cross_spectrum, frequency_grid(wc.size(), config_.dt),
                           wiener_khinchin(gamma_xy_, wc.k1(), config_.dt));
            }
        }
        if (config_.uses(Estimator::valid_only_raw)) {
            add_reference(Estimator::valid_only_raw, Curve::auto_covariance, lag_grid(w));
            if (config_.cross_window) {
                add_reference(Estimator::valid_only_raw, Curve::cross_covariance, lag_grid(*config_.cross_window));
            }
        }
        if (config_.uses(Estimator::lomb_scargle_raw)) {
            add_reference(Estimator::lomb_scargle_raw, Curve::lomb_scargle_spectrum, ls_frequencies_);
        }
    }

    Column* column(Estimator e, Curve c) {
        const int i = column_index_[idx(e)][idx(c)];
        return i < 0 ? nullptr : &columns_[static_cast<std::size_t>(i)];
    }

    ReferenceColumn* reference(Estimator e, Curve c) {
        const int i = reference_index_[idx(e)][idx(c)];
        return i < 0 ? nullptr : &references_[static_cast<std::size_t>(i)];
    }

    void record_failure(std::size_t r, Estimator e, std::string_view group, const Error& err) {
        if (!config_.uses(e)) return;
        failures_[r].push_back(FailureRecord{r, e, std::string(group), std::string(errc_name(err.code())), err.what()});
    }

    void store(std::size_t r, Estimator e, Curve cov_curve, Curve spec_curve, const CovarianceEstimate& cov) {
        const auto spec = covariance_to_spectrum(cov);
        audit_spectrum(cov, spec, e != Estimator::valid_only_corrected, audits_[r]);
        if (auto* c = column(e, cov_curve)) c->put(r, cov.values());
        if (auto* c = column(e, spec_curve)) c->put(r, std::span<const cplx>(spec.values));
    }

    void valid_only(std::size_t r, const GappySeries& x, const GappySeries* y) {
        const bool cross = y != nullptr;
        const std::string_view group = cross ? "cross" : "auto";
        const Curve cov_curve = cross ? Curve::cross_covariance : Curve::auto_covariance;
        const Curve spec_curve = cross ? Curve::cross_spectrum : Curve::auto_spectrum;
        const auto& window = cross ? *config_.cross_window : config_.window;
        const auto& gamma = cross ? gamma_xy_ : gamma_;

        std::optional<CovarianceEstimate> raw;
        try {
            raw = cross ? crosscovariance(x, *y, window) : autocovariance(x, window);
        } catch (const Error& err) {
            record_failure(r, Estimator::valid_only_raw, group, err);
            record_failure(r, Estimator::valid_only_corrected, group, err);
            return;
        }
        if (config_.uses(Estimator::valid_only_raw)) store(r, Estimator::valid_only_raw, cov_curve, spec_curve, *raw);
        try {
            const auto matrix =
                cross ? build_cross_matrix(x.weights(), y->weights(), window) : build_auto_matrix(x.weights(), window);
            if (auto* ref = reference(Estimator::valid_only_raw, cov_curve)) {
                ref->put(r, raw->values(), predict_expected_covariance(matrix, gamma));
            }
            if (config_.uses(Estimator::valid_only_corrected)) {
                const auto corrected = correct_covariance(*raw, matrix, {config_.condition_threshold});
                store(r, Estimator::valid_only_corrected, cov_curve, spec_curve, corrected.estimate);
            }
        } catch (const Error& err) {
            record_failure(r, Estimator::valid_only_corrected, group, err);
        }
    }

    void held(std::size_t r, const GappySeries& x, const GappySeries& y) {
        try {
            const auto base = interpolated_covariance_spectrum(x, config_.window);
            store(r, Estimator::sample_and_hold, Curve::auto_covariance, Curve::auto_spectrum, base.covariance);
        } catch (const Error& err) {
            record_failure(r, Estimator::sample_and_hold, "auto", err);
        }
        if (!config_.cross_window) return;
        try {
            const auto cov = crosscovariance(sample_and_hold(x), sample_and_hold(y), *config_.cross_window);
            store(r, Estimator::sample_and_hold, Curve::cross_covariance, Curve::cross_spectrum, cov);
        } catch (const Error& err) {
            record_failure(r, Estimator::sample_and_hold, "cross", err);
        }
    }

    void lomb_scargle_estimates(std::size_t r, const GappySeries& x) {
        try {
            const auto raw = lomb_scargle(x, ls_frequencies_);
            if (auto* c = column(Estimator::lomb_scargle_raw, Curve::lomb_scargle_spectrum)) {
                c->put(r, std::span<const double>(raw.values));
                column(Estimator::lomb_scargle_raw, Curve::auto_covariance)
                    ->put(r, std::span<const double>(lomb_scargle_autocovariance(raw, config_.window)));
            }
            const double alpha = config_.alpha_prime ? *config_.alpha_prime : default_alpha_prime(x);
            if (auto* ref = reference(Estimator::lomb_scargle_raw, Curve::lomb_scargle_spectrum)) {
                const double offset = config_.dt * (1.0 / alpha - 1.0) * weighted_variance(x);
                std::vector<double> expected;
                const auto& truth = column(Estimator::lomb_scargle_raw, Curve::lomb_scargle_spectrum)->truth;
                for (const auto& t : truth) expected.push_back(t.real() + offset);
                ref->put(r, raw.values, expected);
            }
            if (config_.uses(Estimator::lomb_scargle_corrected)) {
                const auto corrected = lomb_scargle_offset_correct(raw, x, alpha);
                column(Estimator::lomb_scargle_corrected, Curve::lomb_scargle_spectrum)
                    ->put(r, std::span<const double>(corrected.values));
                column(Estimator::lomb_scargle_corrected, Curve::auto_covariance)
                    ->put(r, std::span<const double>(lomb_scargle_autocovariance(corrected, config_.window)));
            }
        } catch (const Error& err) {
            record_failure(r, Estimator::lomb_scargle_raw, "auto", err);
            record_failure(r, Estimator::lomb_scargle_corrected, "auto", err);
        }
    }

    void realization(std::size_t r) {
        const auto pair = generate_pair(process_, n_, config_.dt, r);
        const auto x = apply_gaps(pair.x, gaps_, 2 * r);
        const auto y = apply_gaps(pair.y, gaps_, 2 * r + 1);

        if (config_.uses(Estimator::valid_only_raw) || config_.uses(Estimator::valid_only_corrected)) {
            valid_only(r, x, nullptr);
            if (config_.cross_window) valid_only(r, x, &y);
        }
        if (config_.uses(Estimator::sample_and_hold)) held(r, x, y);
        if (config_.uses(Estimator::lomb_scargle_raw) || config_.uses(Estimator::lomb_scargle_corrected)) {
            lomb_scargle_estimates(r, x);
        }
    }

    const ExperimentConfig& config_;
    std::size_t n_;
    ProcessSpec process_;
    GapModelSpec gaps_;
    std::vector<double> gamma_;
    std::vector<double> gamma_xy_;
    std::vector<double> ls_frequencies_;
    std::vector<Column> columns_;
    std::vector<ReferenceColumn> references_;
    std::array<std::array<int, kCurveCount>, kEstimatorCount> column_index_{};
    std::array<std::array<int, kCurveCount>, kEstimatorCount> reference_index_{};
    std::vector<std::vector<FailureRecord>> failures_;
    std::vector<AuditSample> audits_;
};

// ---------------------------------------------------------------- output

enum class Report { bias, rms };

std::string csv_field(std::string_view text) {
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

std::string curve_csv(const SampleSizeResult& run, Curve curve, Report report, double dt) {
    const bool cov = is_covariance_curve(curve);
    std::string out;
    if (report == Report::bias) {
        out = cov ? "method,lag_index,lag_time,truth,mean,se,averaged,excluded\n"
                  : "method,freq,truth_real,truth_imag,mean_real,mean_imag,se_real,se_imag,averaged,excluded\n";
    } else {
        out = cov ? "method,lag_index,lag_time,rms,averaged,excluded\n" : "method,freq,rms,averaged,excluded\n";
    }
    for (const auto& s : run.curves) {
        if (s.curve != curve) continue;
        const std::string method(estimator_name(s.estimator));
        const std::string counts = std::to_string(s.averaged) + ',' + std::to_string(s.excluded) + '\n';
        for (std::size_t b = 0; b < s.grid.size(); ++b) {
            out += method + ',';
            if (cov) {
                const int lag = static_cast<int>(s.grid[b]);
                out += std::to_string(lag) + ',' + format_double(lag * dt) + ',';
            } else {
                out += format_double(s.grid[b]) + ',';
            }
            if (report == Report::rms) {
                out += format_double(s.rms[b]) + ',';
            } else if (cov) {
                out += format_double(s.truth[b].real()) + ',' + format_double(s.mean[b].real()) + ',' +
                       format_double(s.se_real[b]) + ',';
            } else {
                out += format_double(s.truth[b].real()) + ',' + format_double(s.truth[b].imag()) + ',' +
                       format_double(s.mean[b].real()) + ',' + format_double(s.mean[b].imag()) + ',' +
                       format_double(s.se_real[b]) + ',' + format_double(s.se_imag[b]) + ',';
            }
            out += counts;
        }
    }
    return out;
}

std::string reference_csv(const SampleSizeResult& run) {
    std::string out = "method,curve,grid,reference_mean,residual_mean,residual_se,count\n";
    for (const auto& s : run.references) {
        const std::string prefix =
            std::string(estimator_name(s.estimator)) + ',' + std::string(curve_name(s.curve)) + ',';
        for (std::size_t b = 0; b < s.grid.size(); ++b) {
            out += prefix + format_double(s.grid[b]) + ',' + format_double(s.reference_mean[b]) + ',' +
                   format_double(s.residual_mean[b]) + ',' + format_double(s.residual_se[b]) + ',' +
                   std::to_string(s.count) + '\n';
        }
    }
    return out;
}

std::string failures_csv(const SampleSizeResult& run) {
    std::string out = "realization,method,group,code,message\n";
    for (const auto& f : run.failures) {
        out += std::to_string(f.realization) + ',' + std::string(estimator_name(f.estimator)) + ',' + f.group + ',' +
               f.code + ',' + csv_field(f.message) + '\n';
    }
    return out;
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json audit_json(const SpectrumAudit& a) {
    return {{"spectra_checked", a.spectra_checked},
            {"auto_spectra_checked", a.auto_spectra_checked},
            {"max_zero_frequency_error", a.max_zero_frequency_error},
            {"max_round_trip_error", a.max_round_trip_error},
            {"max_auto_imaginary", a.max_auto_imaginary},
            {"asymmetric_auto_spectra", a.asymmetric_auto_spectra},
            {"max_asymmetric_auto_imaginary", a.max_asymmetric_auto_imaginary},
            {"max_auto_asymmetry", a.max_auto_asymmetry}};
}

void write_outputs(ExperimentResult& result, Report report, unsigned threads) {
    const auto& config = result.config;
    const auto root = config.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(root, ec);
    if (ec) fail(Errc::io_error, "cannot create output directory '" + root.string() + "': " + ec.message());

    json runs = json::array();
    for (const auto& run : result.runs) {
        const std::string dir_name = "n" + std::to_string(run.n_samples);
        const auto dir = root / dir_name;
        std::filesystem::create_directories(dir, ec);
        if (ec) fail(Errc::io_error, "cannot create output directory '" + dir.string() + "': " + ec.message());

        json files = json::array();
        auto emit = [&](const std::string& name, const std::string& contents) {
            write_text_file(dir / name, contents);
            result.files.push_back(dir / name);
            files.push_back(dir_name + "/" + name);
        };
        for (Curve c : kAllCurves) {
            const bool present =
                std::any_of(run.curves.begin(), run.curves.end(), [c](const auto& s) { return s.curve == c; });
            if (!present) continue;
            const std::string suffix = report == Report::bias ? "_mean.csv" : "_rms.csv";
            emit(std::string(curve_name(c)) + suffix, curve_csv(run, c, report, config.dt));
        }
        if (report == Report::bias && !run.references.empty()) emit("reference.csv", reference_csv(run));
        emit("failures.csv", failures_csv(run));

        json counts = json::object();
        for (const auto& s : run.curves) {
            counts[std::string(estimator_name(s.estimator))][std::string(curve_name(s.curve))] = {
                {"averaged", s.averaged}, {"excluded", s.excluded}};
        }
        runs.push_back({{"n_samples", run.n_samples},
                        {"directory", dir_name},
                        {"process_seed", run.process_seed},
                        {"gap_seed", run.gap_seed},
                        {"counts", counts},
                        {"failures", run.failures.size()},
                        {"audit", audit_json(run.audit)},
                        {"files", files}});
    }
    json manifest = {{"schema", 1},
                     {"generator", std::string("gapspec ") + GAPSPEC_VERSION},
                     {"experiment", report == Report::bias ? "bias" : "rms"},
                     {"config", json::parse(experiment_config_to_json(config))},
                     {"timestamp", result.timestamp},
                     {"wall_time_seconds", result.wall_seconds},
                     {"threads", threads},
                     {"runs", runs}};
    write_text_file(root / "manifest.json", manifest.dump(2) + "\n");
    result.files.push_back(root / "manifest.json");
}

ExperimentResult run(const ExperimentConfig& config, Report report) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    const unsigned threads = resolve_threads(config.threads);
    ExperimentResult result;
    result.config = config;
    result.timestamp = utc_timestamp();
    for (std::size_t n : config.n_samples) {
        SampleSizeRun one(config, n);
        result.runs.push_back(one.run(threads));
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!config.output_dir.empty()) write_outputs(result, report, threads);
    return result;
}

}  // namespace

std::string_view estimator_name(Estimator e) noexcept { return kEstimatorNames[idx(e)]; }

Estimator parse_estimator(std::string_view name) {
    for (Estimator e : kAllEstimators) {
        if (estimator_name(e) == name) return e;
    }
    fail(Errc::config_error, "unknown estimator '" + std::string(name) + "'");
}

std::string_view curve_name(Curve c) noexcept { return kCurveNames[idx(c)]; }

bool ExperimentConfig::uses(Estimator e) const noexcept {
    return std::find(estimators.begin(), estimators.end(), e) != estimators.end();
}

void ExperimentConfig::validate() const {
    if (experiment != "bias" && experiment != "rms") config_fail("experiment must be \"bias\" or \"rms\"");
    if (n_realizations < 1) config_fail("n_realizations must be at least 1");
    if (n_samples.empty()) config_fail("n_samples must list at least one sample count");
    if (!(dt > 0.0) || !std::isfinite(dt)) config_fail("dt must be positive");
    if (estimators.empty()) config_fail("estimators must not be empty");
    if (!(condition_threshold > 1.0)) config_fail("condition_threshold must exceed 1");
    if (alpha_prime && !(*alpha_prime > 0.0 && *alpha_prime <= 1.0)) config_fail("alpha_prime must lie in (0, 1]");
    try {
        process.validate();
        gaps.validate();
    } catch (const Error& e) {
        config_fail(e.what());
    }
    for (std::size_t n : n_samples) {
        window.require_correctable(n);
        if (cross_window) cross_window->require_correctable(n, n);
        if (gaps.kind == GapKind::static_mask && gaps.mask.size() != n) {
            config_fail("gaps.mask has " + std::to_string(gaps.mask.size()) + " weights but n_samples is " +
                        std::to_string(n));
        }
    }
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        config_fail(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) config_fail("configuration must be a JSON object");
    reject_unknown_keys(j,
                        {"schema", "experiment", "process", "gaps", "n_samples", "n_realizations", "dt", "window",
                         "cross_window", "estimators", "output_dir", "base_seed", "threads", "condition_threshold",
                         "alpha_prime", "description"},
                        "config");
    if (!j.contains("schema")) config_fail("missing \"schema\"");
    if (get_integer(j["schema"], "schema") != 1) config_fail("unsupported schema version (expected 1)");

    ExperimentConfig c;
    if (j.contains("experiment")) c.experiment = get_string(j["experiment"], "experiment");
    if (!j.contains("process")) config_fail("missing \"process\"");
    c.process = parse_process(j["process"]);
    if (!j.contains("gaps")) config_fail("missing \"gaps\"");
    c.gaps = parse_gaps(j["gaps"]);
    if (!j.contains("n_samples")) config_fail("missing \"n_samples\"");
    c.n_samples.clear();
    if (j["n_samples"].is_array()) {
        for (const auto& v : j["n_samples"]) c.n_samples.push_back(get_unsigned(v, "n_samples"));
    } else {
        c.n_samples.push_back(get_unsigned(j["n_samples"], "n_samples"));
    }
    if (j.contains("n_realizations")) c.n_realizations = get_unsigned(j["n_realizations"], "n_realizations");
    if (j.contains("dt")) c.dt = get_number(j["dt"], "dt");
    if (!j.contains("window")) config_fail("missing \"window\"");
    c.window = get_window(j["window"], "window");
    if (j.contains("cross_window") && !j["cross_window"].is_null()) {
        c.cross_window = get_window(j["cross_window"], "cross_window");
    }
    if (j.contains("estimators")) {
        if (!j["estimators"].is_array()) config_fail("estimators: expected an array of names");
        c.estimators.clear();
        for (const auto& v : j["estimators"]) {
            const Estimator e = parse_estimator(get_string(v, "estimators"));
            if (!c.uses(e)) c.estimators.push_back(e);
        }
    }
    if (j.contains("output_dir")) c.output_dir = get_string(j["output_dir"], "output_dir");
    if (j.contains("base_seed")) c.base_seed = get_unsigned(j["base_seed"], "base_seed");
    if (j.contains("threads")) c.threads = static_cast<unsigned>(get_unsigned(j["threads"], "threads"));
    if (j.contains("condition_threshold")) {
        c.condition_threshold = get_number(j["condition_threshold"], "condition_threshold");
    }
    if (j.contains("alpha_prime") && !j["alpha_prime"].is_null()) {
        c.alpha_prime = get_number(j["alpha_prime"], "alpha_prime");
    }
    c.validate();
    return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    return parse_experiment_config(read_text_file(path));
}

std::string experiment_config_to_json(const ExperimentConfig& c) {
    json process = {{"family", c.process.family == ProcessFamily::moving_average ? "moving_average" : "autoregressive"},
                    {"ma_kernel", c.process.ma_kernel},
                    {"ar_coefficient", c.process.ar_coefficient},
                    {"mean", c.process.mean},
                    {"target_variance", c.process.target_variance},
                    {"cross_delay", c.process.cross_delay},
                    {"cross_mix", c.process.cross_mix},
                    {"seed", c.process.seed}};
    const char* kinds[] = {"bernoulli", "markov", "static_mask"};
    json gaps = {{"kind", kinds[static_cast<int>(c.gaps.kind)]},
                 {"valid_probability", c.gaps.valid_probability},
                 {"switch_probability", c.gaps.switch_probability},
                 {"seed", c.gaps.seed}};
    if (c.gaps.kind == GapKind::static_mask) gaps["mask"] = c.gaps.mask;
    json estimators = json::array();
    for (Estimator e : c.estimators) estimators.push_back(std::string(estimator_name(e)));
    json j = {{"schema", 1},
              {"experiment", c.experiment},
              {"process", process},
              {"gaps", gaps},
              {"n_samples", c.n_samples},
              {"n_realizations", c.n_realizations},
              {"dt", c.dt},
              {"window", window_json(c.window)},
              {"estimators", estimators},
              {"output_dir", c.output_dir.string()},
              {"base_seed", c.base_seed},
              {"threads", c.threads},
              {"condition_threshold", c.condition_threshold}};
    j["cross_window"] = c.cross_window ? window_json(*c.cross_window) : json(nullptr);
    j["alpha_prime"] = c.alpha_prime ? json(*c.alpha_prime) : json(nullptr);
    return j.dump(2);
}

void apply_environment_overrides(ExperimentConfig& config) {
    if (const char* dir = std::getenv("GAPSPEC_OUTPUT_DIR"); dir != nullptr && *dir != '\0') config.output_dir = dir;
    if (const char* threads = std::getenv("GAPSPEC_THREADS"); threads != nullptr && *threads != '\0') {
        char* end = nullptr;
        const long value = std::strtol(threads, &end, 10);
        if (end == threads || *end != '\0' || value < 0) {
            config_fail(std::string("GAPSPEC_THREADS must be a non-negative integer, got '") + threads + "'");
        }
        config.threads = static_cast<unsigned>(value);
    }
}

const CurveSummary* SampleSizeResult::find(Estimator e, Curve c) const noexcept {
    for (const auto& s : curves) {
        if (s.estimator == e && s.curve == c) return &s;
    }
    return nullptr;
}

const ReferenceSummary* SampleSizeResult::find_reference(Estimator e, Curve c) const noexcept {
    for (const auto& s : references) {
        if (s.estimator == e && s.curve == c) return &s;
    }
    return nullptr;
}

const SampleSizeResult* ExperimentResult::run_for(std::size_t n) const noexcept {
    for (const auto& r : runs) {
        if (r.n_samples == n) return &r;
    }
    return nullptr;
}

ExperimentResult run_bias_experiment(const ExperimentConfig& config) { return run(config, Report::bias); }

ExperimentResult run_rms_experiment(const ExperimentConfig& config) { return run(config, Report::rms); }

ExperimentResult run_experiment(const ExperimentConfig& config) {
    return config.experiment == "rms" ? run_rms_experiment(config) : run_bias_experiment(config);
}

std::uint64_t process_stream_seed(const ExperimentConfig& config, std::size_t n) noexcept {
    return realization_seed(config.base_seed ^ realization_seed(config.process.seed, 1), n);
}

std::uint64_t gap_stream_seed(const ExperimentConfig& config, std::size_t n) noexcept {
    return realization_seed(config.base_seed ^ realization_seed(config.gaps.seed, 2), n);
}

}  // namespace gapspec
