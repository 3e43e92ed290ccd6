#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "gapspec/bias_correction.hpp"
#include "gapspec/covariance.hpp"
#include "gapspec/error.hpp"
#include "oracles.hpp"

using namespace gapspec;

namespace {

template <typename F>
Errc code_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return Errc::invalid_argument;
}

long double damped(long long k) {
    const long long a = k < 0 ? -k : k;
    return 3.0L * std::pow(0.7L, static_cast<long double>(a)) * std::cos(0.4L * static_cast<long double>(a));
}

long double shifted(long long k) { return 0.8L * damped(k - 2); }

std::vector<double> sample(const LagWindow& window, long double (*g)(long long)) {
    std::vector<double> out;
    for (int k = window.k1(); k <= window.k2(); ++k) out.push_back(static_cast<double>(g(k)));
    return out;
}

/// Extends a truncated hypothesis by zero outside the window so the oracle
/// and the matrix see the same covariance.
struct Truncated {
    const LagWindow* window;
    long double (*g)(long long);
    long double operator()(long long k) const { return window->contains(static_cast<int>(k)) ? g(k) : 0.0L; }
};

}  // namespace

TEST(TripleSums, BothRoutesMatchDefinition) {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 12; ++t) {
        const std::size_t nx = 20 + 6 * t;
        const std::size_t ny = nx + (t % 3) * 4;
        const auto wx = t % 2 ? fixtures::general_weights(rng, nx) : fixtures::binary_weights(rng, nx, 0.7);
        const auto wy = fixtures::binary_weights(rng, ny, 0.6);
        const LagWindow window(-5, 6);
        const auto direct = triple_sums_direct(wx, wy, window);
        const auto fft = triple_sums_fft(wx, wy, window);
        for (int k = window.k1(); k <= window.k2(); ++k) {
            for (int j = window.k1(); j <= window.k2(); ++j) {
                const auto r = static_cast<Eigen::Index>(window.index(k));
                const auto c = static_cast<Eigen::Index>(window.index(j));
                const double g = static_cast<double>(oracle::triple_g(wx, wy, k, j));
                const double h = static_cast<double>(oracle::triple_h(wx, wy, k, j));
                EXPECT_NEAR(direct.g(r, c), g, 1e-12);
                EXPECT_NEAR(direct.h(r, c), h, 1e-12);
                EXPECT_NEAR(fft.g(r, c), g, 1e-9);
                EXPECT_NEAR(fft.h(r, c), h, 1e-9);
            }
        }
    }
}

TEST(AutoMatrix, EntriesFollowDefinition) {
    std::mt19937_64 rng(32);
    const auto w = fixtures::binary_weights(rng, 50, 0.6);
    const LagWindow window(-6, 5);
    const auto m = build_auto_matrix(w, window);
    const long double d = oracle::total(w);
    for (int k = window.k1(); k <= window.k2(); ++k) {
        for (int j = window.k1(); j <= window.k2(); ++j) {
            const long double want = (k == j ? 1.0L : 0.0L) + oracle::pair_weight(w, w, j) / (d * d) -
                                     (oracle::triple_g(w, w, k, j) + oracle::triple_h(w, w, k, j)) /
                                         (d * oracle::pair_weight(w, w, k));
            EXPECT_NEAR(m.at(k, j), static_cast<double>(want), 1e-13);
        }
    }
    EXPECT_EQ(m.kind, EstimateKind::autocovariance);
    EXPECT_EQ(m.weight_fingerprint, fingerprint_weights(w));
}

TEST(AutoMatrix, RoutesAgree) {
    std::mt19937_64 rng(33);
    const auto w = fixtures::binary_weights(rng, 400, 0.5);
    const LagWindow window(-20, 19);
    const auto direct = build_auto_matrix(w, window, {AssemblyRoute::direct});
    const auto fft = build_auto_matrix(w, window, {AssemblyRoute::fft});
    EXPECT_LT((direct.entries - fft.entries).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(AutoMatrix, PredictsExpectationFromFirstPrinciples) {
    std::mt19937_64 rng(34);
    for (int t = 0; t < 15; ++t) {
        const std::size_t n = 30 + 4 * t;
        const auto w = t % 3 == 0 ? fixtures::general_weights(rng, n) : fixtures::binary_weights(rng, n, 0.55);
        const LagWindow window(-8, 8 - (t % 2));
        const auto m = build_auto_matrix(w, window);
        const auto predicted = predict_expected_covariance(m, sample(window, damped));
        const auto want = oracle::expected_auto(w, Truncated{&window, damped}, window.k1(), window.k2());
        for (std::size_t i = 0; i < want.size(); ++i) {
            EXPECT_NEAR(predicted[i], static_cast<double>(want[i]), 1e-11) << "trial " << t << " index " << i;
        }
    }
}

TEST(CrossMatrix, PredictsExpectationFromFirstPrinciples) {
    std::mt19937_64 rng(35);
    for (int t = 0; t < 15; ++t) {
        const std::size_t nx = 40 + 3 * t;
        const std::size_t ny = nx - (t % 3) * 2;
        const auto wx = fixtures::binary_weights(rng, nx, 0.6);
        const auto wy = t % 2 ? fixtures::general_weights(rng, ny) : fixtures::binary_weights(rng, ny, 0.6);
        const LagWindow window(-7, 10);
        const auto m = build_cross_matrix(wx, wy, window);
        EXPECT_EQ(m.kind, EstimateKind::cross);
        EXPECT_EQ(m.weight_fingerprint, cross_fingerprint(wx, wy));
        const auto predicted = predict_expected_covariance(m, sample(window, shifted));
        const auto want = oracle::expected_cross(wx, wy, Truncated{&window, shifted}, window.k1(), window.k2());
        for (std::size_t i = 0; i < want.size(); ++i) {
            EXPECT_NEAR(predicted[i], static_cast<double>(want[i]), 1e-11) << "trial " << t << " index " << i;
        }
    }
}

TEST(Correction, InvertsTheMapping) {
    std::mt19937_64 rng(36);
    const auto v = fixtures::gaussian(rng, 120);
    const auto w = fixtures::binary_weights(rng, 120, 0.6);
    const auto s = fixtures::poisoned(v, w);
    const LagWindow window(-12, 11);
    const auto raw = autocovariance(s, window);
    const auto m = build_auto_matrix(w, window);
    const auto corrected = correct_covariance(raw, m);
    EXPECT_TRUE(corrected.estimate.corrected());
    EXPECT_GE(corrected.condition_estimate, 1.0);
    EXPECT_LT(corrected.condition_estimate, 1e12);
    const auto back = predict_expected_covariance(m, corrected.estimate.values());
    for (std::size_t i = 0; i < back.size(); ++i) EXPECT_NEAR(back[i], raw.values()[i], 1e-12);
    for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(corrected.estimate.pair_weights()[i], raw.pair_weights()[i]);
}

TEST(Correction, RecoversHypothesisFromItsExpectation) {
    std::mt19937_64 rng(37);
    const auto w = fixtures::binary_weights(rng, 90, 0.5);
    const LagWindow window(-9, 9);
    const auto m = build_auto_matrix(w, window);
    const auto gamma = sample(window, damped);
    const auto expected = predict_expected_covariance(m, gamma);
    const CovarianceEstimate raw(window, expected, pair_weights_direct(w, w, window), 1.0,
                                 EstimateKind::autocovariance, false, fingerprint_weights(w));
    const auto corrected = correct_covariance(raw, m).estimate;
    for (std::size_t i = 0; i < gamma.size(); ++i) EXPECT_NEAR(corrected.values()[i], gamma[i], 1e-10);
}

TEST(AutoMatrix, SymmetricWindowCommutesWithLagReversal) {
    std::mt19937_64 rng(38);
    const auto w = fixtures::binary_weights(rng, 100, 0.5);
    const LagWindow window(-10, 10);
    const auto m = build_auto_matrix(w, window).entries;
    const auto k = m.rows();
    const Eigen::MatrixXd reversed = m.colwise().reverse().rowwise().reverse();
    EXPECT_LT((m - reversed).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(k, 21);
}

TEST(Correction, ValidatesInputs) {
    const std::vector<double> w{1, 1, 0, 1, 1, 1, 0, 1, 1, 1};
    const std::vector<double> other{1, 1, 1, 0, 1, 1, 0, 1, 1, 1};
    const GappySeries s({1, 4, 0, 2, 8, 5, 0, 7, 3, 6}, w);
    const LagWindow window(-2, 2);
    const auto raw = autocovariance(s, window);
    const auto m = build_auto_matrix(w, window);
    EXPECT_EQ(code_of([&] { correct_covariance(raw, build_auto_matrix(other, window)); }),
              Errc::fingerprint_mismatch);
    EXPECT_EQ(code_of([&] { correct_covariance(raw, build_auto_matrix(w, LagWindow(-1, 1))); }),
              Errc::window_mismatch);
    EXPECT_EQ(code_of([&] { correct_covariance(raw, build_cross_matrix(w, w, window)); }), Errc::invalid_argument);
    const auto once = correct_covariance(raw, m).estimate;
    EXPECT_EQ(code_of([&] { correct_covariance(once, m); }), Errc::invalid_argument);
    try {
        correct_covariance(raw, m, {0.5});
        FAIL();
    } catch (const SingularMatrixError& e) {
        EXPECT_GE(e.condition_estimate(), 1.0);
    }
    EXPECT_EQ(code_of([&] { predict_expected_covariance(m, std::vector<double>{1.0}); }), Errc::dimension_mismatch);
}

TEST(Assembly, RejectsBadWeights) {
    EXPECT_EQ(code_of([] { build_auto_matrix(std::vector<double>{1, -1, 1}, LagWindow(0, 0)); }),
              Errc::negative_weight);
    EXPECT_EQ(code_of([] { build_auto_matrix(std::vector<double>{0, 0, 0}, LagWindow(0, 0)); }), Errc::all_invalid);
    EXPECT_THROW(build_auto_matrix(std::vector<double>{1, 0, 1, 0, 1}, LagWindow(-1, 1)), PairCoverageError);
}
