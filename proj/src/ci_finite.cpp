#include "worci/ci_finite.hpp"

#include "worci/dualsolve.hpp"
#include "worci/numeric.hpp"
#include "worci/ratefn.hpp"
#include "worci/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace worci {

ConfidenceBudget ConfidenceBudget::make(double alpha, std::size_t k, long N) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must lie in (0,1]");
    if (k < 1) throw InvalidArgument("alphabet must be nonempty");
    if (N < 1) throw InvalidArgument("N must be positive");
    ConfidenceBudget b;
    b.alpha = alpha;
    b.r_N = double(k + 1) * std::log(double(N) + 1.0);
    b.a_N = std::log(1.0 / (2.0 * alpha)) - b.r_N;
    b.c_N = std::log(2.0 / alpha) + 2.0 * b.r_N;
    return b;
}

Interval clipped(double center, double half_width) {
    return {std::clamp(center - half_width, 0.0, 1.0), std::clamp(center + half_width, 0.0, 1.0)};
}

namespace {

double inverse_rate_plus(const DiscreteDistribution& P, double beta, double level, double tol) {
    const double mu = P.mean();
    if (level == 0.0) return mu;
    const double top = max_reachable_mean(mu, beta);
    if (rate_value(P, beta, top, Side::plus) < level) return top;
    auto reached = [&](double m) { return rate_value(P, beta, m, Side::plus) >= level; };
    return numeric::bisect_threshold(reached, mu, top, tol);
}

}  // namespace

double inverse_rate(const DiscreteDistribution& P, double beta, double level, Side side, double tol) {
    if (!(level >= 0.0)) throw InvalidArgument("level must be nonnegative");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (side == Side::plus) return std::clamp(inverse_rate_plus(P, beta, level, tol), 0.0, 1.0);
    return std::clamp(1.0 - inverse_rate_plus(P.reflect(), beta, level, tol), 0.0, 1.0);
}

ProposedCI ci_proposed(std::span<const double> sample, std::span<const double> alphabet,
                       const SamplingDesign& design, double alpha, double tol) {
    if (long(sample.size()) != design.n())
        throw InvalidArgument("sample has " + std::to_string(sample.size()) +
                              " values but the design says n=" + std::to_string(design.n()));
    const auto Pn = empirical_distribution(sample, alphabet);
    ProposedCI out;
    out.budget = ConfidenceBudget::make(alpha, alphabet.size(), design.N());
    out.level = out.budget.c_N / double(design.n());
    out.sample_mean = Pn.mean();
    const double beta = design.beta();
    out.interval.lo = inverse_rate(Pn, beta, out.level, Side::minus, tol);
    out.interval.hi = inverse_rate(Pn, beta, out.level, Side::plus, tol);
    const double half = std::sqrt(design.beta_bar() * out.budget.c_N / (2.0 * double(design.n())));
    out.envelope = {out.sample_mean - half, out.sample_mean + half};
    return out;
}

Projection parse_projection(std::string_view s) {
    if (s == "rounded") return Projection::rounded;
    if (s == "exhaustive") return Projection::exhaustive;
    throw InvalidArgument("projection must be rounded or exhaustive");
}

DiscreteDistribution round_to_type(const DiscreteDistribution& P, long n) {
    if (n < 1) throw InvalidArgument("type denominator must be positive");
    const std::size_t k = P.size();
    std::vector<long> counts(k);
    std::vector<double> frac(k);
    long assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double x = double(n) * P.weights()[i];
        counts[i] = long(std::floor(x));
        frac[i] = x - double(counts[i]);
        assigned += counts[i];
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return frac[a] > frac[b]; });
    for (std::size_t j = 0; assigned < n; ++j, ++assigned) ++counts[order[j % k]];
    std::vector<double> w(k);
    for (std::size_t i = 0; i < k; ++i) w[i] = double(counts[i]) / double(n);
    return DiscreteDistribution({P.alphabet().begin(), P.alphabet().end()}, std::move(w));
}

DiscreteDistribution closest_type_exhaustive(const DiscreteDistribution& P, double beta, long n) {
    if (n > 12 || P.size() > 4)
        throw Unsupported("exhaustive type search is limited to n <= 12 and k <= 4");
    if (n < 1) throw InvalidArgument("type denominator must be positive");
    const std::size_t k = P.size();
    std::vector<long> c(k, 0);
    std::vector<double> w(k);
    std::vector<double> best_w;
    double best = kInf;
    std::function<void(std::size_t, long)> walk = [&](std::size_t pos, long left) {
        if (pos + 1 == k) {
            c[pos] = left;
            for (std::size_t i = 0; i < k; ++i) w[i] = double(c[i]) / double(n);
            const double v = rate_I_weights(w, beta, P.weights());
            if (best_w.empty() || v < best) {
                best = v;
                best_w = w;
            }
            return;
        }
        for (long x = 0; x <= left; ++x) {
            c[pos] = x;
            walk(pos + 1, left - x);
        }
    };
    walk(0, n);
    return DiscreteDistribution({P.alphabet().begin(), P.alphabet().end()}, std::move(best_w));
}

LowerBound lower_bound_width(const DiscreteDistribution& pop_dist, const SamplingDesign& design,
                             double alpha, Projection mode, double tol) {
    LowerBound out;
    out.budget = ConfidenceBudget::make(alpha, pop_dist.size(), design.N());
    const double beta = design.beta();
    if (out.budget.a_N <= 0.0) {
        const double mu = pop_dist.mean();
        out.b_star_minus = out.b_star_plus = mu;
        out.half_width = 0.0;
        out.degenerate = true;
        out.projected = pop_dist;
        return out;
    }
    out.projected = mode == Projection::rounded ? round_to_type(pop_dist, design.n())
                                                : closest_type_exhaustive(pop_dist, beta, design.n());
    const double level = out.budget.a_N / double(design.n());
    out.b_star_minus = inverse_rate(out.projected, beta, level, Side::minus, tol);
    out.b_star_plus = inverse_rate(out.projected, beta, level, Side::plus, tol);
    out.half_width = 0.5 * (out.b_star_plus - out.b_star_minus);
    return out;
}

SandwichThresholds sandwich_thresholds(double sigma2, const SamplingDesign& design, double alpha,
                                       std::size_t k, double kappa) {
    if (!(sigma2 > 0.0)) throw InvalidArgument("sandwich thresholds need a positive variance");
    const double beta = design.beta();
    const double bb = design.beta_bar();
    SandwichThresholds t;
    t.kappa = kappa < 0.0 ? 0.5 * bb : kappa;
    if (!(t.kappa > 0.0 && t.kappa < bb)) throw InvalidArgument("kappa must lie in (0, 1-beta)");
    const double s4 = sigma2 * sigma2;
    t.C = (1.0 / ((bb - t.kappa) * (bb - t.kappa)) + 1.0 / ((1.0 - t.kappa) * (1.0 - t.kappa))) / beta;
    t.variance_condition = 2.0 * bb / (t.kappa * t.kappa * s4);
    t.remainder_condition = 2.0 * bb * bb * bb * t.C * t.C / (9.0 * s4);
    const double need = std::max(t.variance_condition, t.remainder_condition);

    const auto budget = ConfidenceBudget::make(alpha, k, design.N());
    t.n_over_cN = double(design.n()) / budget.c_N;
    t.satisfied = t.n_over_cN >= need;

    // n / c_N with N = n / beta held at this sampling fraction.
    auto ratio = [&](double n) {
        return n / (std::log(2.0 / alpha) + 2.0 * double(k + 1) * std::log(1.0 + n / beta));
    };
    for (long n = 1; n <= 1000000; ++n)
        if (ratio(double(n)) >= need) {
            t.n0 = n;
            return t;
        }
    double lo = 1e6;
    double hi = 2e6;
    while (ratio(hi) < need) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) return t;
    }
    while (hi - lo > 1.0) {
        const double mid = std::floor(0.5 * (lo + hi));
        (ratio(mid) >= need ? hi : lo) = mid;
    }
    t.n0 = long(hi);
    return t;
}

SandwichReport sandwich_check(const Population& pop, std::span<const double> alphabet,
                              const SamplingDesign& design, double alpha, int trials,
                              std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (long(pop.size()) != design.N()) throw InvalidArgument("population size differs from N");
    const auto PN = empirical_distribution(pop.values(), alphabet);
    SandwichReport rep;
    rep.trials = trials;
    rep.sigma2 = PN.variance();
    rep.A = ConfidenceBudget::sandwich_A(rep.sigma2);
    rep.thresholds = sandwich_thresholds(rep.sigma2, design, alpha, alphabet.size());

    const auto budget = ConfidenceBudget::make(alpha, alphabet.size(), design.N());
    const double beta = design.beta();
    const double level = budget.c_N / double(design.n());
    rep.g_plus = inverse_rate(PN, beta, rep.A * level, Side::plus);
    rep.g_minus = inverse_rate(PN, beta, rep.A * level, Side::minus);

    std::vector<char> up(trials), down(trials), both_sample(trials);
    std::vector<double> a_sample(trials);
#pragma omp parallel for schedule(dynamic)
    for (int t = 0; t < trials; ++t) {
        const auto sample = sample_wor(pop, std::size_t(design.n()), derive_seed(seed, std::uint64_t(t)));
        const auto Pn = empirical_distribution(sample, alphabet);
        const double hi = inverse_rate(Pn, beta, level, Side::plus);
        const double lo = inverse_rate(Pn, beta, level, Side::minus);
        up[t] = hi <= rep.g_plus;
        down[t] = lo >= rep.g_minus;
        const double s2 = Pn.variance();
        a_sample[t] = ConfidenceBudget::sandwich_A(s2);
        if (std::isfinite(a_sample[t])) {
            both_sample[t] = hi <= inverse_rate(PN, beta, a_sample[t] * level, Side::plus) &&
                             lo >= inverse_rate(PN, beta, a_sample[t] * level, Side::minus);
        }
    }
    double a_acc = 0.0;
    for (int t = 0; t < trials; ++t) {
        rep.upper_holds += up[t];
        rep.lower_holds += down[t];
        rep.both_hold += up[t] && down[t];
        rep.both_hold_sample_A += both_sample[t];
        a_acc += a_sample[t];
    }
    rep.frequency = double(rep.both_hold) / trials;
    rep.mean_A_sample = a_acc / trials;
    return rep;
}

}  // namespace worci
