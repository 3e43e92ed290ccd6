#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "gapspec/types.hpp"

namespace fixtures {

inline std::vector<double> gaussian(std::mt19937_64& rng, std::size_t n, double mean = 0.0, double sd = 1.0) {
    std::normal_distribution<double> d(mean, sd);
    std::vector<double> out(n);
    for (auto& v : out) v = d(rng);
    return out;
}

inline std::vector<double> binary_weights(std::mt19937_64& rng, std::size_t n, double p_valid) {
    std::bernoulli_distribution d(p_valid);
    std::vector<double> out(n);
    for (auto& v : out) v = d(rng) ? 1.0 : 0.0;
    if (std::none_of(out.begin(), out.end(), [](double w) { return w > 0; })) out[0] = 1.0;
    return out;
}

inline std::vector<double> general_weights(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::bernoulli_distribution zero(0.3);
    std::vector<double> out(n);
    for (auto& v : out) v = zero(rng) ? 0.0 : u(rng);
    out[0] = 1.0;
    return out;
}

/// Gappy series whose invalid samples hold NaN, so any leak is visible.
inline gapspec::GappySeries poisoned(std::vector<double> values, std::vector<double> weights, double dt = 1.0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(weights[i] > 0.0)) values[i] = std::nan("");
    }
    return gapspec::GappySeries(std::move(values), std::move(weights), dt);
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace fixtures
