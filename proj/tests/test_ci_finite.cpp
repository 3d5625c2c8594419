#include <doctest.h>

#include "helpers.hpp"
#include "worci/ci_finite.hpp"
#include "worci/dualsolve.hpp"
#include "worci/ratefn.hpp"
#include "worci/simharness.hpp"

#include <cmath>

using namespace worci;
using testing_util::random_distribution;

TEST_CASE("budget terms") {
    const auto b = ConfidenceBudget::make(1e-5, 10, 1000);
    const double r = 11.0 * std::log(1001.0);
    CHECK(b.r_N == doctest::Approx(r).epsilon(1e-14));
    CHECK(b.a_N == doctest::Approx(std::log(1.0 / 2e-5) - r).epsilon(1e-14));
    CHECK(b.c_N == doctest::Approx(std::log(2e5) + 2.0 * r).epsilon(1e-14));
    CHECK(b.c_N > b.r_N);
    CHECK(b.a_N < 0.0);
    CHECK(std::isinf(ConfidenceBudget::sandwich_A(0.0)));
    CHECK(ConfidenceBudget::sandwich_A(0.5) == doctest::Approx(5.0));
}

TEST_CASE("inverse rate at level zero is the mean") {
    Rng rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const auto P = random_distribution(rng, 2 + rep % 5);
        CHECK(inverse_rate(P, 0.35, 0.0, Side::plus) == doctest::Approx(P.mean()).epsilon(1e-12));
        CHECK(inverse_rate(P, 0.35, 0.0, Side::minus) == doctest::Approx(P.mean()).epsilon(1e-12));
    }
}

TEST_CASE("inverse rate beyond every finite value returns the reachable boundary") {
    DiscreteDistribution P({0.2, 0.5, 0.8}, {0.3, 0.3, 0.4});
    const double beta = 0.4;
    const double top = beta * P.mean() + (1.0 - beta);
    const double top_rate = rate_value(P, beta, top, Side::plus);
    REQUIRE(std::isfinite(top_rate));
    CHECK(inverse_rate(P, beta, top_rate + 1.0, Side::plus) == doctest::Approx(top).epsilon(1e-12));
    const double bottom = beta * P.mean();
    const double bottom_rate = rate_value(P, beta, bottom, Side::minus);
    CHECK(inverse_rate(P, beta, bottom_rate + 1.0, Side::minus) == doctest::Approx(bottom).epsilon(1e-12));
}

TEST_CASE("inverse rate bracket certificate") {
    Rng rng(11);
    const double tol = 1e-8;
    for (int rep = 0; rep < 40; ++rep) {
        const auto P = random_distribution(rng, 2 + rep % 6);
        const double beta = 0.1 + 0.8 * rng.uniform();
        const double level = 0.5 * rng.uniform();
        const double m = inverse_rate(P, beta, level, Side::plus, tol);
        const double top = beta * P.mean() + (1.0 - beta);
        if (m < top - tol) {
            CHECK(rate_value(P, beta, m - tol, Side::plus) < level);
            CHECK(rate_value(P, beta, m + tol, Side::plus) >= level - 1e-9);
        }
        const double lo = inverse_rate(P, beta, level, Side::minus, tol);
        if (lo > beta * P.mean() + tol) {
            CHECK(rate_value(P, beta, lo + tol, Side::minus) < level);
            CHECK(rate_value(P, beta, lo - tol, Side::minus) >= level - 1e-9);
        }
    }
}

TEST_CASE("proposed interval contains the sample mean and sits in the envelope") {
    const auto alphabet = midpoint_alphabet(6);
    Rng rng(5);
    for (int rep = 0; rep < 30; ++rep) {
        const long N = 200 + long(rng.below(800));
        const long n = 10 + long(rng.below(std::uint64_t(N / 2)));
        const auto pop = finite_alphabet_population(6, 1 + int(rng.below(6)), 1.0, N, rng.next());
        const auto sample = sample_wor(pop, std::size_t(n), rng.next());
        const double alpha = std::pow(10.0, -1.0 - 9.0 * rng.uniform());
        const auto ci = ci_proposed(sample, alphabet, SamplingDesign(N, n), alpha);
        CHECK(ci.interval.lo >= 0.0);
        CHECK(ci.interval.hi <= 1.0);
        CHECK(ci.interval.contains(ci.sample_mean));
        CHECK(ci.envelope.contains(ci.interval));
        const double beta = double(n) / double(N);
        CHECK(ci.envelope.hi - ci.sample_mean ==
              doctest::Approx(std::sqrt((1.0 - beta) * ci.budget.c_N / (2.0 * double(n)))));
    }
}

TEST_CASE("tiny sample with a huge budget spans the reachable range") {
    const std::vector<double> alphabet{0.25, 0.75};
    const std::vector<double> sample{0.25, 0.75, 0.75};
    const auto ci = ci_proposed(sample, alphabet, SamplingDesign(10, 3), 1e-12);
    const double mu = 7.0 / 12.0, beta = 0.3;
    CHECK(ci.interval.lo == doctest::Approx(beta * mu).epsilon(1e-9));
    CHECK(ci.interval.hi == doctest::Approx(beta * mu + 1.0 - beta).epsilon(1e-9));
}

TEST_CASE("sample values off the alphabet are rejected") {
    const std::vector<double> alphabet{0.25, 0.75};
    const std::vector<double> sample{0.25, 0.5};
    CHECK_THROWS_AS(ci_proposed(sample, alphabet, SamplingDesign(10, 2), 0.05), InvalidArgument);
}

TEST_CASE("coverage and dominance on a small E2 run") {
    auto cfg = defaults_for("E2");
    cfg.trials = 40;
    const auto res = run_E2_finite_widths(cfg, Exec::parallel);
    REQUIRE(res.summaries.size() == 2);
    for (const auto& s : res.summaries) {
        CHECK(s.coverage == 1.0);
        CHECK(s.envelope_violations == 0);
    }
    const auto& s10 = res.summaries[1];
    CHECK(s10.mean_proposed < s10.mean_hoeffding);
    CHECK(s10.mean_proposed < s10.mean_bernstein_serfling);
}

TEST_CASE("mean width decreases with n") {
    const auto alphabet = midpoint_alphabet(5);
    const auto pop = finite_alphabet_population(5, 5, 1.0, 2000, 99);
    double prev = 2.0;
    for (long n : {100L, 300L, 900L}) {
        double total = 0.0;
        for (int t = 0; t < 20; ++t)
            total += ci_proposed(sample_wor(pop, std::size_t(n), derive_seed(1, std::uint64_t(t))), alphabet,
                                 SamplingDesign(2000, n), 1e-6)
                         .interval.width();
        CHECK(total / 20.0 < prev);
        prev = total / 20.0;
    }
}

TEST_CASE("type rounding") {
    DiscreteDistribution P({0.1, 0.4, 0.9}, {0.333, 0.334, 0.333});
    const auto t = round_to_type(P, 7);
    double s = 0.0;
    for (double w : t.weights()) {
        CHECK(std::abs(w * 7.0 - std::round(w * 7.0)) < 1e-12);
        s += w;
    }
    CHECK(s == doctest::Approx(1.0));
    CHECK_THROWS_AS(closest_type_exhaustive(P, 0.3, 13), Unsupported);
    CHECK_THROWS_AS(parse_projection("nearest"), InvalidArgument);
}

TEST_CASE("rounded projection is close to the exhaustive one") {
    Rng rng(21);
    for (int rep = 0; rep < 30; ++rep) {
        const std::size_t k = 2 + rep % 2;
        const auto P = random_distribution(rng, k);
        const long n = 4 + long(rng.below(9));
        const double beta = 0.2 + 0.6 * rng.uniform();
        const auto best = closest_type_exhaustive(P, beta, n);
        const auto rounded = round_to_type(P, n);
        const double i_best = rate_I(best, beta, P).value;
        const double i_round = rate_I(rounded, beta, P).value;
        CHECK(i_best <= i_round + 1e-12);
        CHECK(i_round - i_best <= 2.0 * double(k) / (beta * (1.0 - beta) * double(n)));
    }
}

TEST_CASE("lower bound degenerates when a_N is not positive") {
    DiscreteDistribution P({0.2, 0.6}, {0.5, 0.5});
    const auto lb = lower_bound_width(P, SamplingDesign(1000, 350), 1e-5);
    CHECK(lb.degenerate);
    CHECK(lb.half_width == 0.0);
    CHECK(lb.b_star_minus == doctest::Approx(P.mean()));
    CHECK(lb.b_star_plus == doctest::Approx(P.mean()));
}

TEST_CASE("lower bound sits below the proposed width on a moderate instance") {
    const std::vector<double> alphabet{0.2, 0.7};
    const long N = 100, n = 50;
    const double alpha = 1e-10;
    std::vector<double> values(N, 0.2);
    for (long i = 0; i < 40; ++i) values[std::size_t(i)] = 0.7;
    const Population pop(values);
    const auto PN = empirical_distribution(pop.values(), alphabet);
    const auto lb = lower_bound_width(PN, SamplingDesign(N, n), alpha);
    REQUIRE_FALSE(lb.degenerate);
    CHECK(lb.half_width > 0.0);
    int ok = 0;
    for (int t = 0; t < 50; ++t) {
        const auto ci = ci_proposed(sample_wor(pop, n, derive_seed(4, std::uint64_t(t))), alphabet,
                                    SamplingDesign(N, n), alpha);
        ok += lb.half_width <= ci.interval.width();
    }
    CHECK(ok == 50);
    const auto ex = lower_bound_width(DiscreteDistribution({0.2, 0.7}, {0.6, 0.4}), SamplingDesign(20, 10),
                                      1e-12, Projection::exhaustive);
    CHECK(ex.projected.size() == 2);
}

TEST_CASE("sandwich thresholds") {
    const SamplingDesign design(2000, 1000);
    const auto th = sandwich_thresholds(0.05, design, 1e-6, 5);
    const double beta = 0.5, bb = 0.5, kappa = bb / 2.0;
    CHECK(th.kappa == doctest::Approx(kappa));
    const double C = (1.0 / beta) * (1.0 / ((bb - kappa) * (bb - kappa)) + 1.0 / ((1.0 - kappa) * (1.0 - kappa)));
    CHECK(th.C == doctest::Approx(C));
    CHECK(th.variance_condition == doctest::Approx(2.0 * bb / (kappa * kappa * 0.05 * 0.05)));
    CHECK(th.remainder_condition == doctest::Approx(2.0 * bb * bb * bb * C * C / (9.0 * 0.05 * 0.05)));
    const auto looser = sandwich_thresholds(0.2, design, 1e-6, 5);
    CHECK(looser.variance_condition < th.variance_condition);
    CHECK(looser.remainder_condition < th.remainder_condition);
    if (th.n0 > 0) CHECK(looser.n0 <= th.n0);
}

TEST_CASE("population inverse rate is monotone in the level") {
    Rng rng(8);
    for (int rep = 0; rep < 10; ++rep) {
        const auto P = random_distribution(rng, 5);
        const double beta = 0.5;
        const double c = 0.05 + 0.2 * rng.uniform();
        const double A = 1.0 + 2.0 / P.variance();
        CHECK(inverse_rate(P, beta, A * c, Side::plus) >= inverse_rate(P, beta, c, Side::plus));
        CHECK(inverse_rate(P, beta, A * c, Side::minus) <= inverse_rate(P, beta, c, Side::minus));
    }
}

TEST_CASE("sandwich check frequency on a desk-scale instance") {
    const auto pop = finite_alphabet_population(5, 5, 1.0, 2000, 31);
    const auto rep = sandwich_check(pop, midpoint_alphabet(5), SamplingDesign(2000, 1000), 1e-6, 60, 7);
    CHECK(rep.trials == 60);
    CHECK(rep.both_hold == 60);
    CHECK(rep.frequency == 1.0);
    CHECK(rep.A == doctest::Approx(1.0 + 2.0 / rep.sigma2));
    const auto again = sandwich_check(pop, midpoint_alphabet(5), SamplingDesign(2000, 1000), 1e-6, 60, 7);
    CHECK(again.mean_A_sample == rep.mean_A_sample);
}
