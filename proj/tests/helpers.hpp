#pragma once

#include "kawarada/error.hpp"
#include "kawarada/grid.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace testing {

// Strictly increasing nodes on [-1, 1] with cell sizes varying by up to `spread`.
inline kawarada::Grid1D random_grid(std::mt19937_64& rng, std::size_t n, double spread = 4.0) {
    std::uniform_real_distribution<double> w(1.0, spread);
    std::vector<double> cells(n + 1);
    for (auto& c : cells) c = w(rng);
    double total = 0.0;
    for (double c : cells) total += c;
    std::vector<double> nodes(n + 2);
    nodes[0] = -1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += cells[i];
        nodes[i + 1] = -1.0 + 2.0 * acc / total;
    }
    nodes[n + 1] = 1.0;
    return kawarada::Grid1D(std::move(nodes));
}

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

template <class F>
kawarada::ErrorCode code_of(F&& f) {
    try {
        f();
    } catch (const kawarada::Error& e) {
        return e.code();
    }
    return static_cast<kawarada::ErrorCode>(-1);
}

}  // namespace testing
