#include <doctest.h>

#include "worci/ci_as.hpp"
#include "worci/numeric.hpp"
#include "worci/rng.hpp"
#include "worci/simharness.hpp"

#include <cmath>

using namespace worci;

namespace {

// Direct evaluation of the per-point log-sum, for comparison at moderate lambda.
double naive_cgf(const std::vector<double>& xs, double beta, double lambda) {
    double acc = 0.0;
    for (double x : xs)
        acc += std::log(beta * std::exp(lambda * (1.0 - beta) * x) + (1.0 - beta) * std::exp(-lambda * beta * x));
    return acc / double(xs.size());
}

CgfModel beta_model(double a, double b, long N, double beta, std::uint64_t seed) {
    return CgfModel::from_values(beta_population(a, b, N, seed).values(), beta);
}

}  // namespace

TEST_CASE("cgf basics") {
    const auto pop = beta_population(2.0, 5.0, 1000, 1);
    const auto m = CgfModel::from_values(pop.values(), 0.5);
    CHECK(m.cgf(0.0) == 0.0);
    for (double l : {-30.0, -2.0, 0.3, 4.0, 25.0})
        CHECK(m.cgf(l) == doctest::Approx(naive_cgf({pop.values().begin(), pop.values().end()}, 0.5, l)).epsilon(1e-12));
    const auto zero = CgfModel({0.0}, {1.0}, 0.4);
    for (double l : {-5.0, 1.0, 1e4}) CHECK(zero.cgf(l) == 0.0);
    CHECK(std::isfinite(m.cgf(1e6)));
    CHECK(m.cgf(1e6) / 1e6 == doctest::Approx(m.saturation()).epsilon(1e-4));
}

TEST_CASE("cgf derivatives at zero") {
    for (double beta : {0.2, 0.5, 0.8}) {
        const auto m = beta_model(2.0, 5.0, 1000, beta, 2);
        const double h = 1e-4;
        const double d1 = (m.cgf(h) - m.cgf(-h)) / (2.0 * h);
        const double d2 = (m.cgf(h) - 2.0 * m.cgf(0.0) + m.cgf(-h)) / (h * h);
        const double c2 = beta * (1.0 - beta) * m.m2();
        CHECK(std::abs(d1) <= 1e-8);
        CHECK(std::abs(d2 - c2) / c2 <= 1e-5);
        CHECK(m.cgf_d1(0.0) == 0.0);
        CHECK(m.cgf_d2(0.0) == doctest::Approx(c2).epsilon(1e-14));
        CHECK(m.cgf(1e-4) == doctest::Approx(c2 * 1e-8 / 2.0).epsilon(1e-2));
    }
}

TEST_CASE("closed-form derivatives match finite differences") {
    const auto m = beta_model(5.0, 2.0, 500, 0.3, 3);
    for (double l : {-8.0, -0.5, 0.2, 3.0, 40.0}) {
        const double h = 1e-5 * (1.0 + std::abs(l));
        CHECK(m.cgf_d1(l) == doctest::Approx((m.cgf(l + h) - m.cgf(l - h)) / (2.0 * h)).epsilon(1e-6));
        CHECK(m.cgf_d2(l) == doctest::Approx((m.cgf_d1(l + h) - m.cgf_d1(l - h)) / (2.0 * h)).epsilon(1e-5));
    }
}

TEST_CASE("cgf is convex") {
    const auto m = beta_model(1.0, 1.0, 300, 0.6, 4);
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        const double a = 40.0 * rng.uniform() - 20.0, b = 40.0 * rng.uniform() - 20.0;
        CHECK(m.cgf(0.5 * (a + b)) <= 0.5 * (m.cgf(a) + m.cgf(b)) + 1e-12);
    }
}

TEST_CASE("legendre transform") {
    const auto m = beta_model(2.0, 5.0, 1000, 0.5, 6);
    CHECK(m.legendre(0.0) == 0.0);
    CHECK(std::isinf(m.legendre(m.saturation())));
    CHECK(std::isfinite(m.legendre(m.saturation() * (1.0 - 1e-9))));
    CHECK(m.saturation() == doctest::Approx(0.5 * m.mean()));
    const double c2 = 0.25 * m.m2();
    for (double y : {1e-4, 1e-3, 5e-3}) {
        const double ref = y * y / (2.0 * c2);
        CHECK(std::abs(m.legendre(y) - ref) / ref <= 0.05);
    }
    double prev = 0.0;
    for (int i = 1; i < 50; ++i) {
        const double y = m.saturation() * i / 50.0;
        const double v = m.legendre(y);
        CHECK(v > prev);
        // Brute-force sup over a lambda grid is a lower bound.
        double grid = 0.0;
        for (double l = 0.0; l < 200.0; l += 0.05) grid = std::max(grid, l * y - m.cgf(l));
        CHECK(grid <= v + 1e-12);
        CHECK(v - grid <= 1e-3 * (1.0 + v));
        prev = v;
    }
}

TEST_CASE("legendre round trips") {
    const auto m = beta_model(2.0, 2.0, 800, 0.4, 7);
    for (double t : {1e-6, 1e-4, 1e-2, 0.1, 0.3}) {
        REQUIRE(t < m.legendre_limit());
        const double y = m.invert_legendre(t);
        CHECK(m.legendre(y) >= t - 1e-8);
        CHECK(m.legendre(y) <= t + 1e-8);
    }
    for (int i = 1; i < 20; ++i) {
        const double y = m.saturation() * i / 20.0;
        CHECK(m.invert_legendre(m.legendre(y)) == doctest::Approx(y).epsilon(1e-8));
    }
    CHECK(m.invert_legendre(0.0) == 0.0);
    CHECK(m.invert_legendre(10.0 * m.legendre_limit()) == m.saturation());
}

TEST_CASE("coupling constants") {
    CHECK(coupling_bound(100, 0.5, CouplingMode::exact) == doctest::Approx(12.565).epsilon(1e-4));
    CHECK(coupling_bound(100, 0.5, CouplingMode::safe) == doctest::Approx(14.74).epsilon(1e-3));
    CHECK(coupling_bound(100, 0.5, CouplingMode::paper) == doctest::Approx(5.90).epsilon(1e-3));
    CHECK(coupling_bound(100, 0.5, CouplingMode::paper) < coupling_bound(100, 0.5, CouplingMode::exact));
    CHECK_THROWS_AS(coupling_bound(101, 0.5, CouplingMode::exact), InvalidArgument);
    CHECK_THROWS_AS(parse_coupling_mode("loose"), InvalidArgument);
}

TEST_CASE("budget and oracle interval") {
    const long N = 1000, n = 500;
    const double alpha = 0.05;
    CHECK(t_budget(N, n, alpha) == doctest::Approx(std::log(2.36 * std::sqrt(0.5 * n) / alpha) / N).epsilon(1e-12));
    const double zero_alpha = 2.36 * std::sqrt(0.5 * n);
    CHECK(t_budget(N, n, zero_alpha) == doctest::Approx(0.0).epsilon(1e-15));
    const auto pop = beta_population(2.0, 5.0, N, 8);
    const auto sample = sample_wor(pop, n, 9);
    const auto orc = ci_as_oracle(pop, sample, alpha);
    const auto m = CgfModel::from_values(pop.values(), 0.5);
    const double c2 = 0.25 * m.m2();
    // Quadratic regime: y = sqrt(2 c2 t) to first order.
    const double approx = std::sqrt(2.0 * c2 * orc.t) / 0.5;
    CHECK(std::abs(orc.epsilon - approx) / approx <= 0.1);
    CHECK(orc.interval.contains(orc.sample_mean));
}

TEST_CASE("empirical interval is wider than the oracle on the full population") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto pop = beta_population(2.0, 5.0, 600, seed);
        const auto m = CgfModel::from_values(pop.values(), 0.5);
        const double t = t_budget(600, 300, 0.05);
        const double oracle = m.invert_legendre(t) / 0.5;
        const double emp = m.invert_legendre(t + std::pow(600.0, -1.1)) / 0.5;
        CHECK(emp >= oracle);
    }
    const std::vector<double> s(50, 0.0);
    const auto z = ci_as_empirical(s, 100, 0.05);
    CHECK(z.epsilon == 0.0);
}

TEST_CASE("oracle coverage at beta one half") {
    const long N = 1000, n = 500;
    const auto pop = beta_population(2.0, 5.0, N, 10);
    const double mu = summary(pop).mu;
    const int trials = 2000;
    int cov = 0;
    for (int t = 0; t < trials; ++t) cov += ci_as_oracle(pop, sample_wor(pop, n, derive_seed(12, t)), 0.05).interval.contains(mu);
    CHECK(double(cov) / trials >= 0.95 - 3.0 * std::sqrt(0.0475 / trials));
}

TEST_CASE("empirical coverage") {
    for (long N : {500L, 1000L}) {
        const long n = N / 2;
        const auto pop = beta_population(2.0, 5.0, N, 13);
        const double mu = summary(pop).mu;
        const int trials = 2000;
        int cov = 0;
        for (int t = 0; t < trials; ++t)
            cov += ci_as_empirical(sample_wor(pop, n, derive_seed(14, t)), N, 0.05).interval.contains(mu);
        CHECK(double(cov) / trials >= 0.95 - 3.0 * std::sqrt(0.0475 / trials));
    }
}

TEST_CASE("empirical width tracks the oracle more often as N grows") {
    std::vector<double> freq;
    for (long N : {200L, 500L, 1000L, 2000L}) {
        const long n = N / 2;
        int hits = 0;
        const int trials = 200;
        for (int t = 0; t < trials; ++t) {
            const auto pop = beta_population(2.0, 5.0, N, derive_seed(15, t));
            const auto s = sample_wor(pop, n, derive_seed(16, t));
            hits += ci_as_empirical(s, N, 0.05).epsilon >= ci_as_oracle(pop, s, 0.05).epsilon;
        }
        freq.push_back(double(hits) / trials);
    }
    CHECK(freq.back() >= freq.front());
}
