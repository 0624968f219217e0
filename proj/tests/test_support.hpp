#pragma once

// Shared helpers for the test suites: a deterministic RNG for property-style
// tests and small sampling utilities over the unit ball.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hyprec/geometry.hpp"

namespace testsup {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>((static_cast<unsigned __int128>(gen_()) * n) >> 64);
    }

private:
    std::mt19937_64 gen_;
};

// Random point with norm <= max_norm, uniform direction.
inline hyprec::PoincareVector random_ball_point(Rng& rng, std::size_t dim, double max_norm) {
    hyprec::PoincareVector v;
    v.c.resize(dim);
    double sq = 0.0;
    for (auto& x : v.c) {
        x = rng.uniform(-1.0, 1.0);
        sq += x * x;
    }
    const double norm = std::sqrt(sq);
    const double target = max_norm * rng.uniform();
    if (norm > 0.0)
        for (auto& x : v.c) x *= target / norm;
    return v;
}

}  // namespace testsup
