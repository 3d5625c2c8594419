#pragma once

#include "worci/population.hpp"
#include "worci/rng.hpp"

#include <algorithm>
#include <vector>

namespace testing_util {

// Random distribution on k distinct sorted points of (lo, hi) with Dirichlet(1) weights.
inline worci::DiscreteDistribution random_distribution(worci::Rng& rng, std::size_t k,
                                                       double lo = 0.0, double hi = 1.0) {
    std::vector<double> a;
    while (a.size() < k) {
        const double x = lo + (hi - lo) * rng.uniform_open();
        if (std::find(a.begin(), a.end(), x) == a.end()) a.push_back(x);
    }
    std::sort(a.begin(), a.end());
    std::vector<double> w(k);
    double s = 0.0;
    for (auto& x : w) s += (x = rng.gamma(1.0) + 1e-3);
    for (auto& x : w) x /= s;
    double tail = 1.0;
    for (std::size_t i = 0; i + 1 < k; ++i) tail -= w[i];
    w.back() = tail;
    return worci::DiscreteDistribution(std::move(a), std::move(w));
}

// Random Q on the same alphabet with Q >= beta P.
inline std::vector<double> random_feasible_q(worci::Rng& rng, const worci::DiscreteDistribution& P,
                                             double beta) {
    const std::size_t k = P.size();
    std::vector<double> r(k);
    double s = 0.0;
    for (auto& x : r) s += (x = rng.gamma(1.0) + 1e-3);
    std::vector<double> q(k);
    for (std::size_t i = 0; i < k; ++i) q[i] = beta * P.weights()[i] + (1.0 - beta) * r[i] / s;
    return q;
}

}  // namespace testing_util
