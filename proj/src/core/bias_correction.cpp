#include "gapspec/bias_correction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gapspec/covariance.hpp"
#include "gapspec/error.hpp"
#include "gapspec/fft.hpp"

namespace gapspec {

namespace {

using Index = Eigen::Index;

/// sum_i a[i] b[i + j] over every i where both exist.
double shifted_dot(std::span<const double> a, std::span<const double> b, long long j) {
    const long long na = static_cast<long long>(a.size());
    const long long nb = static_cast<long long>(b.size());
    const long long lo = std::max(0LL, -j);
    const long long hi = std::min(na, nb - j);
    double sum = 0.0;
    const double* pa = a.data();
    const double* pb = b.data() + j;
    for (long long i = lo; i < hi; ++i) sum += pa[i] * pb[i];
    return sum;
}

/// out[i] = first[i] * second[i + shift] where the second index exists.
std::vector<double> shifted_product(std::span<const double> first, std::span<const double> second, long long shift) {
    std::vector<double> out(first.size(), 0.0);
    const long long n2 = static_cast<long long>(second.size());
    for (std::size_t i = 0; i < first.size(); ++i) {
        const long long m = static_cast<long long>(i) + shift;
        if (m >= 0 && m < n2) out[i] = first[i] * second[static_cast<std::size_t>(m)];
    }
    return out;
}

double weight_sum(std::span<const double> w) {
    double total = 0.0;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) fail(Errc::negative_weight, "weights must be finite and non-negative");
        total += v;
    }
    return total;
}

void check_inputs(std::span<const double> wx, std::span<const double> wy) {
    if (wx.empty() || wy.empty()) fail(Errc::invalid_argument, "weight sequences must be non-empty");
}

MappingMatrix assemble(std::span<const double> wx, std::span<const double> wy, const LagWindow& window,
                       const AssemblyOptions& options, EstimateKind kind) {
    check_inputs(wx, wy);
    window.require_correctable(wx.size(), wy.size());
    const double dx = weight_sum(wx);
    const double dy = weight_sum(wy);
    if (!(dx > 0.0) || !(dy > 0.0)) fail(Errc::all_invalid, "weights sum to zero (D = 0)");

    const auto pair = pair_weights_direct(wx, wy, window);
    std::vector<int> empty;
    for (std::size_t idx = 0; idx < pair.size(); ++idx) {
        if (!(pair[idx] > 0.0)) empty.push_back(window.lag(idx));
    }
    if (!empty.empty()) throw PairCoverageError(std::move(empty));

    bool use_fft = options.route == AssemblyRoute::fft;
    if (options.route == AssemblyRoute::automatic) {
        use_fft = window.size() * std::max(wx.size(), wy.size()) > options.fft_crossover;
    }
    const auto triple = use_fft ? triple_sums_fft(wx, wy, window) : triple_sums_direct(wx, wy, window);

    const auto k_count = static_cast<Index>(window.size());
    Eigen::MatrixXd a(k_count, k_count);
    for (Index r = 0; r < k_count; ++r) {
        const double wk = pair[static_cast<std::size_t>(r)];
        for (Index c = 0; c < k_count; ++c) {
            const double wj = pair[static_cast<std::size_t>(c)];
            a(r, c) = (r == c ? 1.0 : 0.0) + wj / (dx * dy) - triple.g(r, c) / (dy * wk) - triple.h(r, c) / (dx * wk);
        }
    }
    const Fingerprint fp =
        kind == EstimateKind::autocovariance ? fingerprint_weights(wx) : cross_fingerprint(wx, wy);
    return MappingMatrix{std::move(a), window, fp, kind};
}

}  // namespace

TripleAccumulators triple_sums_direct(std::span<const double> wx, std::span<const double> wy,
                                      const LagWindow& window) {
    check_inputs(wx, wy);
    const auto k_count = static_cast<Index>(window.size());
    TripleAccumulators out{Eigen::MatrixXd(k_count, k_count), Eigen::MatrixXd(k_count, k_count)};
    for (Index r = 0; r < k_count; ++r) {
        const long long k = window.lag(static_cast<std::size_t>(r));
        const auto p = shifted_product(wx, wy, k);   // wx_i wy_{i+k}
        const auto q = shifted_product(wy, wx, -k);  // wy_m wx_{m-k}
        for (Index c = 0; c < k_count; ++c) {
            const long long j = window.lag(static_cast<std::size_t>(c));
            out.g(r, c) = shifted_dot(p, wy, j);
            out.h(r, c) = shifted_dot(wx, q, j);
        }
    }
    return out;
}

TripleAccumulators triple_sums_fft(std::span<const double> wx, std::span<const double> wy, const LagWindow& window) {
    check_inputs(wx, wy);
    const std::size_t length = wx.size() + wy.size();
    const auto wx_spec = fft::forward_real(wx, length);
    const auto wy_spec = fft::forward_real(wy, length);
    const auto k_count = static_cast<Index>(window.size());
    TripleAccumulators out{Eigen::MatrixXd(k_count, k_count), Eigen::MatrixXd(k_count, k_count)};
    for (Index r = 0; r < k_count; ++r) {
        const long long k = window.lag(static_cast<std::size_t>(r));
        const auto p_spec = fft::forward_real(shifted_product(wx, wy, k), length);
        const auto q_spec = fft::forward_real(shifted_product(wy, wx, -k), length);
        const auto g_row = fft::correlate_spectra(p_spec, wy_spec, length);
        const auto h_row = fft::correlate_spectra(wx_spec, q_spec, length);
        for (Index c = 0; c < k_count; ++c) {
            const long long j = window.lag(static_cast<std::size_t>(c));
            const bool reachable = j > -static_cast<long long>(wx.size()) && j < static_cast<long long>(wy.size());
            out.g(r, c) = reachable ? fft::circular_at(g_row, j) : 0.0;
            out.h(r, c) = reachable ? fft::circular_at(h_row, j) : 0.0;
        }
    }
    return out;
}

MappingMatrix build_auto_matrix(std::span<const double> weights, const LagWindow& window,
                                const AssemblyOptions& options) {
    return assemble(weights, weights, window, options, EstimateKind::autocovariance);
}

MappingMatrix build_cross_matrix(std::span<const double> wx, std::span<const double> wy, const LagWindow& window,
                                 const AssemblyOptions& options) {
    return assemble(wx, wy, window, options, EstimateKind::cross);
}

CorrectedCovariance correct_covariance(const CovarianceEstimate& raw, const MappingMatrix& matrix,
                                       const CorrectionOptions& options) {
    if (raw.kind() != matrix.kind) fail(Errc::invalid_argument, "estimate and matrix kinds differ (auto vs cross)");
    if (!(raw.window() == matrix.window)) {
        fail(Errc::window_mismatch,
             "estimate window " + raw.window().to_string() + " differs from matrix window " + matrix.window.to_string());
    }
    if (raw.weight_fingerprint() != matrix.weight_fingerprint) {
        fail(Errc::fingerprint_mismatch, "mapping matrix was built from different weights than the estimate");
    }
    if (raw.corrected()) fail(Errc::invalid_argument, "estimate is already corrected");

    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(matrix.entries);
    const double rcond = lu.rcond();
    const double condition = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(condition <= options.condition_threshold)) {
        throw SingularMatrixError(condition, options.condition_threshold);
    }
    const Eigen::Map<const Eigen::VectorXd> rhs(raw.values().data(), static_cast<Index>(raw.size()));
    const Eigen::VectorXd solution = lu.solve(rhs);
    std::vector<double> values(solution.data(), solution.data() + solution.size());
    for (double v : values) {
        if (!std::isfinite(v)) throw SingularMatrixError(condition, options.condition_threshold);
    }
    std::vector<double> pair(raw.pair_weights().begin(), raw.pair_weights().end());
    return CorrectedCovariance{CovarianceEstimate(raw.window(), std::move(values), std::move(pair), raw.dt(),
                                                  raw.kind(), true, raw.weight_fingerprint()),
                               condition};
}

std::vector<double> predict_expected_covariance(const MappingMatrix& matrix, std::span<const double> gamma) {
    if (gamma.size() != matrix.window.size()) fail(Errc::dimension_mismatch, "gamma length must equal the window size");
    const Eigen::Map<const Eigen::VectorXd> g(gamma.data(), static_cast<Index>(gamma.size()));
    const Eigen::VectorXd out = matrix.entries * g;
    return {out.data(), out.data() + out.size()};
}

}  // namespace gapspec
