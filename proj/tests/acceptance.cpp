#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "gapspec/baselines.hpp"
#include "gapspec/bias_correction.hpp"
#include "gapspec/covariance.hpp"
#include "gapspec/error.hpp"
#include "gapspec/harness.hpp"
#include "gapspec/moments.hpp"
#include "gapspec/series_io.hpp"
#include "gapspec/spectrum.hpp"
#include "oracles.hpp"

using namespace gapspec;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const Verdict& v, double seconds) {
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str(),
                seconds);
    std::fflush(stdout);
    if (!v.pass) ++failures;
}

template <typename F>
void criterion(int id, const char* title, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = body();
    } catch (const std::exception& e) {
        v = {false, std::string("unexpected exception: ") + e.what()};
    }
    report(id, title, v, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

ExperimentConfig load(const char* name) {
    auto c = load_experiment_config(std::string(GAPSPEC_CONFIG_DIR) + "/" + name);
    c.output_dir.clear();
    c.threads = 0;
    return c;
}

/// Largest |mean - target| / se over a curve; infinite when se is not finite.
double max_z(const std::vector<std::complex<double>>& mean, const std::vector<std::complex<double>>& target,
             const std::vector<double>& se) {
    double worst = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        const double d = std::abs(mean[i].real() - target[i].real());
        worst = std::max(worst, se[i] > 0.0 ? d / se[i] : (d == 0.0 ? 0.0 : INFINITY));
    }
    return worst;
}

double max_z(const CurveSummary& s) { return max_z(s.mean, s.truth, s.se_real); }

double max_z(const ReferenceSummary& r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < r.residual_mean.size(); ++i) {
        const double d = std::abs(r.residual_mean[i]);
        worst = std::max(worst, r.residual_se[i] > 0.0 ? d / r.residual_se[i] : (d == 0.0 ? 0.0 : INFINITY));
    }
    return worst;
}

std::vector<SpectrumAudit> audits;

void collect(const ExperimentResult& r) {
    for (const auto& run : r.runs) audits.push_back(run.audit);
}

double rel_diff(std::span<const double> a, std::span<const double> b) {
    double scale = 0.0;
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(a[i]));
        diff = std::max(diff, std::abs(a[i] - b[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

Verdict bessel() {
    ExperimentConfig c;
    c.process.ma_kernel = {1.0};
    c.process.target_variance = 4.0;
    c.process.seed = 11;
    c.gaps.kind = GapKind::bernoulli;
    c.gaps.valid_probability = 1.0;
    c.gaps.seed = 12;
    c.n_samples = {100};
    c.n_realizations = 100000;
    c.window = LagWindow(0, 0);
    c.estimators = {Estimator::valid_only_raw, Estimator::valid_only_corrected};
    c.base_seed = 2024;
    const auto r = run_bias_experiment(c);
    collect(r);
    const auto& run = r.runs.at(0);
    const auto* raw = run.find(Estimator::valid_only_raw, Curve::auto_covariance);
    const auto* cor = run.find(Estimator::valid_only_corrected, Curve::auto_covariance);
    const double z_raw = std::abs(raw->mean[0].real() - 3.96) / raw->se_real[0];
    const double z_cor = std::abs(cor->mean[0].real() - 4.0) / cor->se_real[0];
    const bool ok = z_raw <= 4.0 && z_cor <= 4.0 && raw->averaged == 100000 && cor->averaged == 100000;
    return {ok, fmt("raw C0 mean %.5f (|z| vs 3.96 = %.2f)", raw->mean[0].real(), z_raw) +
                    fmt(", corrected mean %.5f (|z| vs 4 = %.2f)", cor->mean[0].real(), z_cor)};
}

Verdict direct_fft() {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<int> size(16, 512);
    std::uniform_real_distribution<double> prob(0.4, 0.95);
    double worst = 0.0;
    int instances = 0;
    while (instances < 100) {
        const auto nx = static_cast<std::size_t>(size(rng));
        const auto ny = instances % 2 ? nx : static_cast<std::size_t>(size(rng));
        const auto wx = instances % 5 == 0 ? fixtures::general_weights(rng, nx) : fixtures::binary_weights(rng, nx, prob(rng));
        const auto wy = fixtures::binary_weights(rng, ny, prob(rng));
        const auto x = fixtures::poisoned(fixtures::gaussian(rng, nx, 5.0, 2.0), wx);
        const auto y = fixtures::poisoned(fixtures::gaussian(rng, ny, -3.0, 1.0), wy);
        const int reach = static_cast<int>(std::min(nx, ny) / 4);
        std::uniform_int_distribution<int> edge(-reach, reach);
        int k1 = edge(rng);
        int k2 = edge(rng);
        if (k1 > k2) std::swap(k1, k2);
        const LagWindow window(k1, k2);
        try {
            worst = std::max(worst, rel_diff(autocovariance_direct(x, window).values(),
                                             autocovariance_fft(x, window).values()));
            worst = std::max(worst, rel_diff(crosscovariance_direct(x, y, window).values(),
                                             crosscovariance_fft(x, y, window).values()));
        } catch (const PairCoverageError&) {
            continue;
        }
        ++instances;
    }
    return {worst <= 1e-10, fmt("max relative difference %.3g over %g instances", worst, instances)};
}

Verdict forward_map() {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> len(1, 21);
    std::uniform_real_distribution<double> prob(0.4, 0.9);
    double worst = 0.0;
    int patterns = 0;
    while (patterns < 20) {
        const std::size_t n = 64;
        const auto wx = fixtures::binary_weights(rng, n, prob(rng));
        const auto wy = fixtures::binary_weights(rng, n, prob(rng));
        const int k = len(rng);
        std::uniform_int_distribution<int> start(-k - 1, 2);
        const int first = start(rng);
        const LagWindow w(first, first + k - 1);
        const int half = k / 2;
        const LagWindow sym(-half, half);

        std::vector<double> gamma_auto(sym.size());
        std::normal_distribution<double> nd;
        for (int lag = 0; lag <= half; ++lag) {
            gamma_auto[sym.index(lag)] = gamma_auto[sym.index(-lag)] = nd(rng);
        }
        std::vector<double> gamma_cross(w.size());
        for (auto& v : gamma_cross) v = nd(rng);
        try {
            const auto ma = build_auto_matrix(wx, sym);
            const auto mc = build_cross_matrix(wx, wy, w);
            const auto pa = predict_expected_covariance(ma, gamma_auto);
            const auto pc = predict_expected_covariance(mc, gamma_cross);
            const auto ga = [&](long long lag) -> long double {
                return sym.contains(static_cast<int>(lag)) ? gamma_auto[sym.index(static_cast<int>(lag))] : 0.0L;
            };
            const auto gc = [&](long long lag) -> long double {
                return w.contains(static_cast<int>(lag)) ? gamma_cross[w.index(static_cast<int>(lag))] : 0.0L;
            };
            const auto oa = oracle::expected_auto(wx, ga, sym.k1(), sym.k2());
            const auto oc = oracle::expected_cross(wx, wy, gc, w.k1(), w.k2());
            const double sa = std::max(1.0, fixtures::max_abs(gamma_auto));
            const double sc = std::max(1.0, fixtures::max_abs(gamma_cross));
            for (std::size_t i = 0; i < oa.size(); ++i) {
                worst = std::max(worst, std::abs(pa[i] - static_cast<double>(oa[i])) / sa);
            }
            for (std::size_t i = 0; i < oc.size(); ++i) {
                worst = std::max(worst, std::abs(pc[i] - static_cast<double>(oc[i])) / sc);
            }
        } catch (const PairCoverageError&) {
            continue;
        }
        ++patterns;
    }
    return {worst <= 1e-10, fmt("max |A gamma - oracle| %.3g over %g patterns (auto and cross)", worst, patterns)};
}

Verdict correlated_gaps() {
    const auto c = load("long_gaps.json");
    const auto r = run_bias_experiment(c);
    collect(r);
    const auto& run = r.runs.at(0);
    const auto* ca = run.find(Estimator::valid_only_corrected, Curve::auto_covariance);
    const auto* cc = run.find(Estimator::valid_only_corrected, Curve::cross_covariance);
    const auto* ra = run.find_reference(Estimator::valid_only_raw, Curve::auto_covariance);
    const auto* rc = run.find_reference(Estimator::valid_only_raw, Curve::cross_covariance);
    const auto* raw = run.find(Estimator::valid_only_raw, Curve::auto_covariance);
    const double za = max_z(*ca);
    const double zc = max_z(*cc);
    const double zra = max_z(*ra);
    const double zrc = max_z(*rc);
    const double raw_bias = max_z(*raw);
    const bool ok = za <= 4.0 && zc <= 4.0 && zra <= 4.0 && zrc <= 4.0;
    return {ok, fmt("corrected max|z| auto %.2f cross %.2f", za, zc) +
                    fmt("; raw minus A*gamma max|z| auto %.2f cross %.2f", zra, zrc) +
                    fmt("; raw vs truth max|z| %.1f; %g realizations averaged", raw_bias,
                        static_cast<double>(ca->averaged))};
}

Verdict lomb_scargle_offset() {
    const auto c = load("independent_outliers.json");
    const auto r = run_bias_experiment(c);
    collect(r);
    const auto& run = r.runs.at(0);
    const auto* ref = run.find_reference(Estimator::lomb_scargle_raw, Curve::lomb_scargle_spectrum);
    const auto* raw = run.find(Estimator::lomb_scargle_raw, Curve::lomb_scargle_spectrum);
    const auto* cor = run.find(Estimator::lomb_scargle_corrected, Curve::lomb_scargle_spectrum);
    const double z_offset = max_z(*ref);
    const double z_cor = max_z(*cor);
    const double z_raw = max_z(*raw);
    double mean_offset = 0.0;
    for (std::size_t i = 0; i < raw->mean.size(); ++i) mean_offset += raw->mean[i].real() - raw->truth[i].real();
    mean_offset /= static_cast<double>(raw->mean.size());
    const bool ok = z_offset <= 4.0 && z_cor <= 4.0;
    return {ok, fmt("raw minus (truth + offset) max|z| %.2f; corrected vs truth max|z| %.2f", z_offset, z_cor) +
                    fmt("; raw vs truth max|z| %.1f, mean excess %.3f", z_raw, mean_offset)};
}

Verdict rms_floors() {
    auto c = load("rms_long_gaps.json");
    c.estimators = {Estimator::valid_only_corrected, Estimator::sample_and_hold};
    const auto r = run_rms_experiment(c);
    collect(r);
    const auto* small = r.run_for(100);
    const auto* large = r.run_for(10000);
    const auto* cs = small->find(Estimator::valid_only_corrected, Curve::auto_covariance);
    const auto* cl = large->find(Estimator::valid_only_corrected, Curve::auto_covariance);
    const std::size_t zero = static_cast<std::size_t>(-c.window.k1());
    const double lag0 = cs->rms[zero] / cl->rms[zero];

    const auto top_band = [](const CurveSummary& s) {
        double sum = 0.0;
        int count = 0;
        for (std::size_t i = 0; i < s.grid.size(); ++i) {
            if (std::abs(s.grid[i]) >= 0.4) {
                sum += s.rms[i];
                ++count;
            }
        }
        return sum / count;
    };
    const auto* hs = small->find(Estimator::sample_and_hold, Curve::auto_spectrum);
    const auto* hl = large->find(Estimator::sample_and_hold, Curve::auto_spectrum);
    const double band = top_band(*hs) / top_band(*hl);
    const bool ok = lag0 >= 5.0 && lag0 <= 20.0 && band < 2.0;
    return {ok, fmt("corrected lag-0 RMS ratio %.2f (in [5, 20]); sample-and-hold |f| >= 0.4 RMS ratio %.2f (< 2)",
                    lag0, band)};
}

Verdict spectrum_identities() {
    auto c = load("long_gaps.json");
    c.window = LagWindow(-25, 25);
    c.cross_window.reset();
    c.n_realizations = 200;
    c.estimators = {Estimator::valid_only_corrected};
    const auto r = run_bias_experiment(c);
    collect(r);
    const auto symmetric = r.runs.at(0).audit;

    SpectrumAudit all;
    for (const auto& a : audits) {
        all.spectra_checked += a.spectra_checked;
        all.auto_spectra_checked += a.auto_spectra_checked;
        all.asymmetric_auto_spectra += a.asymmetric_auto_spectra;
        all.max_zero_frequency_error = std::max(all.max_zero_frequency_error, a.max_zero_frequency_error);
        all.max_round_trip_error = std::max(all.max_round_trip_error, a.max_round_trip_error);
        all.max_auto_imaginary = std::max(all.max_auto_imaginary, a.max_auto_imaginary);
        all.max_asymmetric_auto_imaginary =
            std::max(all.max_asymmetric_auto_imaginary, a.max_asymmetric_auto_imaginary);
    }
    const bool ok = all.max_zero_frequency_error <= 1e-12 && all.max_round_trip_error <= 1e-12 &&
                    all.max_auto_imaginary <= 1e-12 && symmetric.auto_spectra_checked > 0 &&
                    symmetric.asymmetric_auto_spectra == 0 && all.spectra_checked > 0;
    return {ok, fmt("%g spectra: zero-frequency %.2g, round trip %.2g", static_cast<double>(all.spectra_checked),
                    all.max_zero_frequency_error, all.max_round_trip_error) +
                    fmt(", auto imaginary %.2g over %g even estimates", all.max_auto_imaginary,
                        static_cast<double>(all.auto_spectra_checked)) +
                    fmt("; corrected on -25:25 imaginary %.2g; %g corrected estimates on unpaired windows "
                        "(imaginary up to %.2g, reported only)",
                        symmetric.max_auto_imaginary, static_cast<double>(all.asymmetric_auto_spectra),
                        all.max_asymmetric_auto_imaginary)};
}

Verdict degenerate_inputs() {
    int checked = 0;
    std::vector<std::string> wrong;
    const auto expect = [&](const char* label, Errc code, const std::function<void()>& f) {
        ++checked;
        try {
            f();
            wrong.push_back(std::string(label) + ": no error");
        } catch (const Error& e) {
            if (e.code() != code) wrong.push_back(std::string(label) + ": got " + std::string(errc_name(e.code())));
        } catch (const std::exception& e) {
            wrong.push_back(std::string(label) + ": foreign exception " + e.what());
        } catch (...) {
            wrong.push_back(std::string(label) + ": unknown exception");
        }
    };

    const GappySeries empty({1, 2, 3, 4}, {0, 0, 0, 0});
    const GappySeries ok({1, 4, 2, 8, 5, 7}, {1, 1, 1, 1, 1, 1});
    const GappySeries alt({1, 4, 2, 8, 5, 7}, {1, 0, 1, 0, 1, 0});
    const GappySeries other({1, 4, 2, 8, 5, 7}, {1, 1, 0, 1, 1, 1});
    const GappySeries coarse({1, 4, 2, 8, 5, 7}, {1, 1, 1, 1, 1, 1}, 2.0);
    const LagWindow w(-1, 1);

    expect("all-invalid validate", Errc::all_invalid, [&] { validate_series(empty); });
    expect("all-invalid mean", Errc::all_invalid, [&] { (void)weighted_mean(empty); });
    expect("all-invalid variance", Errc::all_invalid, [&] { (void)weighted_variance(empty); });
    expect("all-invalid autocovariance", Errc::all_invalid, [&] { autocovariance(empty, LagWindow(0, 0)); });
    expect("all-invalid cross", Errc::all_invalid, [&] { crosscovariance(ok, empty, LagWindow(0, 0)); });
    expect("all-invalid matrix", Errc::all_invalid, [&] { build_auto_matrix(empty.weights(), LagWindow(0, 0)); });
    expect("all-invalid sample-and-hold", Errc::all_invalid, [&] { sample_and_hold(empty); });
    expect("all-invalid Lomb-Scargle", Errc::too_few_samples, [&] { lomb_scargle(empty, std::vector<double>{0.1}); });
    expect("pair coverage direct", Errc::insufficient_pair_coverage, [&] { autocovariance(alt, w, Route::direct); });
    expect("pair coverage fft", Errc::insufficient_pair_coverage, [&] { autocovariance(alt, w, Route::fft); });
    expect("pair coverage matrix", Errc::insufficient_pair_coverage, [&] { build_auto_matrix(alt.weights(), w); });
    expect("pair coverage cross", Errc::insufficient_pair_coverage,
           [&] { crosscovariance(alt, alt, LagWindow(1, 1)); });
    expect("full-range window", Errc::singular_window, [&] { LagWindow(-5, 5).require_correctable(6); });
    expect("full-range cross window", Errc::singular_window, [&] { LagWindow(-5, 0).require_correctable(6, 6); });
    expect("full-range window in config", Errc::singular_window, [&] {
        ExperimentConfig c;
        c.n_samples = {20};
        c.window = LagWindow(-19, 19);
        c.validate();
    });
    expect("fingerprint correction", Errc::fingerprint_mismatch,
           [&] { correct_covariance(autocovariance(ok, w), build_auto_matrix(other.weights(), w)); });
    expect("fingerprint variance", Errc::fingerprint_mismatch, [&] {
        const auto c = correct_covariance(autocovariance(ok, w), build_auto_matrix(ok.weights(), w)).estimate;
        (void)corrected_variance(other, c);
    });
    expect("window mismatch", Errc::window_mismatch,
           [&] { correct_covariance(autocovariance(ok, w), build_auto_matrix(ok.weights(), LagWindow(0, 1))); });
    expect("singular matrix", Errc::singular_matrix,
           [&] { correct_covariance(autocovariance(ok, w), build_auto_matrix(ok.weights(), w), {1.0 + 1e-9}); });
    expect("length mismatch", Errc::length_mismatch, [] { GappySeries({1, 2}, {1}); });
    expect("negative weight", Errc::negative_weight, [] { GappySeries({1, 2}, {1, -1}); });
    expect("non-binary weight", Errc::non_binary_weight,
           [] { validate_series(GappySeries({1, 2}, {1, 0.5}), WeightMode::binary); });
    expect("non-positive dt", Errc::non_positive_dt, [] { GappySeries({1, 2}, {1, 1}, 0.0); });
    expect("dt mismatch", Errc::dt_mismatch, [&] { crosscovariance(ok, coarse, LagWindow(0, 0)); });
    expect("parse error", Errc::parse_error, [] { deserialize_series("0,1,1\n1,x,1\n"); });
    expect("window parse", Errc::parse_error, [] { LagWindow::parse("-3"); });
    expect("reversed window", Errc::invalid_argument, [] { LagWindow(2, 1); });
    expect("gamma size", Errc::dimension_mismatch,
           [&] { (void)mean_estimator_variance(ok.weights(), w, std::vector<double>{1.0}); });
    expect("window too narrow", Errc::window_too_narrow,
           [&] { (void)mean_estimator_variance(ok.weights(), LagWindow(0, 0), std::vector<double>{1.0}); });
    expect("prediction size", Errc::dimension_mismatch,
           [&] { predict_expected_covariance(build_auto_matrix(ok.weights(), w), std::vector<double>{1.0}); });
    expect("io error", Errc::io_error, [] { read_series_csv("/nonexistent/gapspec/input.csv"); });
    expect("config error", Errc::config_error, [] { parse_experiment_config("{\"schema\": 1}"); });
    expect("bad alpha", Errc::invalid_argument, [&] {
        lomb_scargle_offset_correct(lomb_scargle(ok, std::vector<double>{0.1}), ok, 0.0);
    });

    std::string detail = std::to_string(checked - static_cast<int>(wrong.size())) + "/" + std::to_string(checked) +
                         " degenerate inputs raised their named errors";
    for (const auto& m : wrong) detail += "; " + m;
    return {wrong.empty(), detail};
}

}  // namespace

int main() {
    criterion(1, "mean-removal bias, white noise", bessel);
    criterion(2, "direct and FFT routes agree", direct_fft);
    criterion(3, "mapping matrix matches brute-force expectation", forward_map);
    criterion(4, "bias-free correction under correlated gaps", correlated_gaps);
    criterion(5, "Lomb-Scargle offset", lomb_scargle_offset);
    criterion(6, "RMS consistency and bias floor", rms_floors);
    criterion(7, "spectrum identities", spectrum_identities);
    criterion(8, "degenerate inputs", degenerate_inputs);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
