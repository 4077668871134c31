#pragma once

#include <cstdint>
#include <random>

namespace simalign {

/// Every stochastic routine takes this engine by reference; chains own one each.
using Rng = std::mt19937_64;

inline double standard_normal(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

// Draw from Gamma(shape, rate).
inline double gamma_rate(double shape, double rate, Rng& rng) {
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

}  // namespace simalign
