#include "gapspec/simgen.hpp"

#include <cmath>

#include "gapspec/error.hpp"

namespace gapspec {

namespace {

double kernel_autocorrelation(const std::vector<double>& b, int lag) {
    const auto k = static_cast<std::size_t>(lag < 0 ? -lag : lag);
    double sum = 0.0;
    for (std::size_t m = 0; m + k < b.size(); ++m) sum += b[m] * b[m + k];
    return sum;
}

/// One realization of the zero-mean process, length n.
std::vector<double> draw_process(const ProcessSpec& spec, std::size_t n, std::mt19937_64& engine) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(n);
    if (spec.family == ProcessFamily::moving_average) {
        const auto& b = spec.ma_kernel;
        const double scale = std::sqrt(spec.target_variance / kernel_autocorrelation(b, 0));
        if (scale == 0.0) return out;
        const std::size_t q = b.size() - 1;
        std::vector<double> e(n + q);
        for (auto& v : e) v = normal(engine);
        for (std::size_t i = 0; i < n; ++i) {
            double acc = 0.0;
            for (std::size_t m = 0; m <= q; ++m) acc += b[m] * e[i + q - m];
            out[i] = scale * acc;
        }
    } else {
        if (spec.target_variance == 0.0) return out;
        const double phi = spec.ar_coefficient;
        const double sigma = std::sqrt(spec.target_variance);
        const double innovation = sigma * std::sqrt(1.0 - phi * phi);
        double x = sigma * normal(engine);
        for (std::size_t i = 0; i < n; ++i) {
            if (i > 0) x = phi * x + innovation * normal(engine);
            out[i] = x;
        }
    }
    return out;
}

}  // namespace

void ProcessSpec::validate() const {
    if (!(target_variance >= 0.0) || !std::isfinite(target_variance)) {
        fail(Errc::invalid_argument, "process target_variance must be finite and non-negative");
    }
    if (!(cross_mix >= 0.0 && cross_mix <= 1.0)) fail(Errc::invalid_argument, "cross_mix must lie in [0, 1]");
    if (family == ProcessFamily::moving_average) {
        if (ma_kernel.empty()) fail(Errc::invalid_argument, "moving-average kernel must be non-empty");
        if (!(kernel_autocorrelation(ma_kernel, 0) > 0.0)) fail(Errc::invalid_argument, "moving-average kernel is all zero");
    } else if (!(std::abs(ar_coefficient) < 1.0)) {
        fail(Errc::invalid_argument, "autoregressive coefficient must satisfy |phi| < 1");
    }
}

double ProcessSpec::autocovariance(int lag) const {
    if (family == ProcessFamily::moving_average) {
        return target_variance * kernel_autocorrelation(ma_kernel, lag) / kernel_autocorrelation(ma_kernel, 0);
    }
    return target_variance * std::pow(ar_coefficient, std::abs(lag));
}

double ProcessSpec::crosscovariance(int lag) const { return cross_mix * autocovariance(lag - cross_delay); }

int ProcessSpec::correlation_length() const {
    if (family == ProcessFamily::autoregressive) return ar_coefficient == 0.0 ? 0 : -1;
    return static_cast<int>(ma_kernel.size()) - 1;
}

void GapModelSpec::validate() const {
    auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
    switch (kind) {
        case GapKind::bernoulli:
            if (!in_unit(valid_probability)) fail(Errc::invalid_argument, "valid_probability must lie in [0, 1]");
            break;
        case GapKind::markov:
            if (!in_unit(switch_probability)) fail(Errc::invalid_argument, "switch_probability must lie in [0, 1]");
            break;
        case GapKind::static_mask:
            if (mask.empty()) fail(Errc::invalid_argument, "static mask must be non-empty");
            for (double w : mask) {
                if (!(w >= 0.0)) fail(Errc::negative_weight, "static mask weights must be non-negative");
            }
            break;
    }
}

std::vector<double> TruthRecord::autocovariance(const LagWindow& window) const {
    std::vector<double> out;
    out.reserve(window.size());
    for (int k = window.k1(); k <= window.k2(); ++k) out.push_back(process.autocovariance(k));
    return out;
}

std::vector<double> TruthRecord::crosscovariance(const LagWindow& window) const {
    std::vector<double> out;
    out.reserve(window.size());
    for (int k = window.k1(); k <= window.k2(); ++k) out.push_back(process.crosscovariance(k));
    return out;
}

std::uint64_t realization_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t z = seed ^ (index * 0x9e3779b97f4a7c15ULL);
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(realization_seed(seed, index));
}

GeneratedPair generate_pair(const ProcessSpec& spec, std::size_t n, double dt, std::uint64_t index) {
    spec.validate();
    const std::size_t delay = static_cast<std::size_t>(std::abs(spec.cross_delay));
    const std::size_t kernel = spec.family == ProcessFamily::moving_average ? spec.ma_kernel.size() : 1;
    if (n <= kernel + delay) {
        fail(Errc::invalid_argument, "sample count " + std::to_string(n) + " must exceed kernel length + cross delay (" +
                                         std::to_string(kernel + delay) + ")");
    }
    auto engine = make_engine(spec.seed, index);
    const auto base = draw_process(spec, n + delay, engine);
    const auto independent = draw_process(spec, n, engine);

    const std::size_t x_offset = spec.cross_delay > 0 ? delay : 0;
    const std::size_t y_offset = spec.cross_delay < 0 ? delay : 0;
    const double mix = spec.cross_mix;
    const double rest = std::sqrt(1.0 - mix * mix);
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = spec.mean + base[i + x_offset];
        y[i] = spec.mean + mix * base[i + y_offset] + rest * independent[i];
    }
    return GeneratedPair{GappySeries::all_valid(std::move(x), dt), GappySeries::all_valid(std::move(y), dt),
                         TruthRecord{spec}};
}

std::vector<double> draw_gap_weights(const GapModelSpec& model, std::size_t n, std::uint64_t index) {
    model.validate();
    std::vector<double> w(n, 1.0);
    switch (model.kind) {
        case GapKind::bernoulli: {
            auto engine = make_engine(model.seed, index);
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            for (auto& v : w) v = uniform(engine) < model.valid_probability ? 1.0 : 0.0;
            break;
        }
        case GapKind::markov: {
            auto engine = make_engine(model.seed, index);
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            bool valid = uniform(engine) < 0.5;
            for (std::size_t i = 0; i < n; ++i) {
                if (i > 0 && uniform(engine) < model.switch_probability) valid = !valid;
                w[i] = valid ? 1.0 : 0.0;
            }
            break;
        }
        case GapKind::static_mask:
            if (model.mask.size() != n) {
                fail(Errc::length_mismatch, "static mask has " + std::to_string(model.mask.size()) +
                                                " weights for a series of " + std::to_string(n));
            }
            w = model.mask;
            break;
    }
    return w;
}

GappySeries apply_gaps(const GappySeries& series, const GapModelSpec& model, std::uint64_t index) {
    auto drawn = draw_gap_weights(model, series.size(), index);
    std::vector<double> values(series.values().begin(), series.values().end());
    for (std::size_t i = 0; i < drawn.size(); ++i) {
        drawn[i] *= series.weights()[i];
        if (!(drawn[i] > 0.0)) values[i] = kInvalidSampleValue;
    }
    return GappySeries(std::move(values), std::move(drawn), series.dt());
}

}  // namespace gapspec
