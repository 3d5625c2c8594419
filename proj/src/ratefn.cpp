#include "worci/ratefn.hpp"

#include "worci/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace worci {

namespace {

constexpr double kResidueClamp = 1e-12;

void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0,1)");
}

double entropy(std::span<const double> w) {
    double h = 0.0;
    for (double x : w) h -= numeric::xlogx(x);
    return h;
}

}  // namespace

double rate_I_weights(std::span<const double> p, double beta, std::span<const double> q) {
    check_beta(beta);
    if (p.size() != q.size()) throw InvalidArgument("rate_I: mismatched alphabets");
    const double bb = 1.0 - beta;
    double kl_pq = 0.0;
    double kl_rq = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        double resid = q[i] - beta * p[i];
        if (resid < -kResidueClamp) return kInf;
        if (resid < 0.0) resid = 0.0;
        kl_pq += numeric::kl_term(p[i], q[i]);
        kl_rq += numeric::kl_term(resid / bb, q[i]);
    }
    return kl_pq + bb / beta * kl_rq;
}

double rate_I_entropy_weights(std::span<const double> p, double beta, std::span<const double> q) {
    check_beta(beta);
    if (p.size() != q.size()) throw InvalidArgument("rate_I: mismatched alphabets");
    const double bb = 1.0 - beta;
    std::vector<double> r(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double resid = q[i] - beta * p[i];
        if (resid < -kResidueClamp) return kInf;
        r[i] = std::max(resid, 0.0) / bb;
    }
    return (entropy(q) - beta * entropy(p) - bb * entropy(r)) / beta;
}

RateValue rate_I(const DiscreteDistribution& P, double beta, const DiscreteDistribution& Q) {
    if (!P.same_alphabet(Q)) throw InvalidArgument("rate_I: P and Q must share one alphabet");
    return RateValue{rate_I_weights(P.weights(), beta, Q.weights())};
}

RateValue rate_I_entropy_form(const DiscreteDistribution& P, double beta,
                              const DiscreteDistribution& Q) {
    if (!P.same_alphabet(Q)) throw InvalidArgument("rate_I: P and Q must share one alphabet");
    return RateValue{rate_I_entropy_weights(P.weights(), beta, Q.weights())};
}

double jensen_shannon(std::span<const double> p, std::span<const double> r) {
    if (p.size() != r.size()) throw InvalidArgument("jensen_shannon: size mismatch");
    double js = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + r[i]);
        js += 0.5 * numeric::kl_term(p[i], m) + 0.5 * numeric::kl_term(r[i], m);
    }
    return js;
}

DiscreteDistribution extend_with_one(const DiscreteDistribution& P) {
    if (P.alphabet().back() >= 1.0) return P;
    std::vector<double> a(P.alphabet().begin(), P.alphabet().end());
    std::vector<double> w(P.weights().begin(), P.weights().end());
    a.push_back(1.0);
    w.push_back(0.0);
    return DiscreteDistribution(std::move(a), std::move(w));
}

double pinsker_lower(double mean, double beta_bar, double m, Side side) {
    const double gap = side == Side::plus ? m - mean : mean - m;
    if (gap <= 0.0) return 0.0;
    return 2.0 / beta_bar * gap * gap;
}

namespace {

// Calls fn(counts) for every composition of `total` into counts.size() parts.
void for_each_composition(std::vector<int>& counts, std::size_t pos, int remaining,
                          const std::function<void(const std::vector<int>&)>& fn) {
    if (pos + 1 == counts.size()) {
        counts[pos] = remaining;
        fn(counts);
        return;
    }
    for (int c = 0; c <= remaining; ++c) {
        counts[pos] = c;
        for_each_composition(counts, pos + 1, remaining - c, fn);
    }
}

struct PrimalProblem {
    std::vector<double> s;  // extended alphabet
    std::vector<double> p;  // P on the extended alphabet
    double beta;
    double target;  // required mean of R

    double objective(std::span<const double> r, std::vector<double>& scratch) const {
        scratch.resize(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) scratch[i] = beta * p[i] + (1.0 - beta) * r[i];
        return rate_I_weights(p, beta, scratch);
    }

    double mean(std::span<const double> r) const {
        double m = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) m += s[i] * r[i];
        return m;
    }
};

}  // namespace

PrimalSolution j_primal_solve(const RateQuery& query, int grid_resolution) {
    check_beta(query.beta);
    if (query.P.size() > 4) throw Unsupported("primal oracle supports alphabets of size <= 4");
    if (grid_resolution < 50) throw InvalidArgument("grid_resolution must be >= 50");

    const DiscreteDistribution P = query.side == Side::plus ? query.P : query.P.reflect();
    const double m = query.side == Side::plus ? query.m : 1.0 - query.m;
    const double beta = query.beta;
    const double mu = P.mean();

    const DiscreteDistribution ext = extend_with_one(P);
    PrimalProblem prob{{ext.alphabet().begin(), ext.alphabet().end()},
                       {ext.weights().begin(), ext.weights().end()},
                       beta,
                       (m - beta * mu) / (1.0 - beta)};
    const std::size_t K = prob.s.size();

    PrimalSolution out;
    if (m <= mu) {
        out.value = RateValue{0.0};
        out.q = prob.p;
        return out;
    }
    if (m > max_reachable_mean(mu, beta) + 1e-15) {
        out.value = RateValue::infeasible();
        return out;
    }

    // Coarse grid over R.
    std::vector<double> scratch;
    std::vector<double> best_r(K, 0.0);
    best_r.back() = 1.0;  // all residual mass at the largest point is always feasible
    double best = prob.objective(best_r, scratch);
    {
        std::vector<int> counts(K, 0);
        std::vector<double> r(K);
        const double G = grid_resolution;
        for_each_composition(counts, 0, grid_resolution, [&](const std::vector<int>& c) {
            double mean = 0.0;
            for (std::size_t i = 0; i < K; ++i) {
                r[i] = c[i] / G;
                mean += prob.s[i] * r[i];
            }
            if (mean < prob.target - 1e-14) return;
            const double v = prob.objective(r, scratch);
            if (v < best) {
                best = v;
                best_r = r;
            }
        });
    }

    // Directions: pairwise mass transfers and mean-preserving triples.
    std::vector<std::vector<double>> dirs;
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j) {
            std::vector<double> d(K, 0.0);
            d[i] = -1.0;
            d[j] = 1.0;
            dirs.push_back(std::move(d));
        }
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = i + 1; j < K; ++j)
            for (std::size_t l = j + 1; l < K; ++l) {
                std::vector<double> d(K, 0.0);
                d[i] = prob.s[j] - prob.s[l];
                d[j] = prob.s[l] - prob.s[i];
                d[l] = prob.s[i] - prob.s[j];
                const double norm = std::abs(d[i]) + std::abs(d[j]) + std::abs(d[l]);
                for (auto& x : d) x /= norm;
                dirs.push_back(std::move(d));
            }

    std::vector<double> r = best_r;
    std::vector<double> trial(K);
    int sweeps = 0;
    for (; sweeps < 2000; ++sweeps) {
        const double start = best;
        for (const auto& d : dirs) {
            double tlo = -kInf;
            double thi = kInf;
            for (std::size_t i = 0; i < K; ++i) {
                if (d[i] > 0.0) tlo = std::max(tlo, -r[i] / d[i]);
                if (d[i] < 0.0) thi = std::min(thi, r[i] / -d[i]);
            }
            double sd = 0.0;
            for (std::size_t i = 0; i < K; ++i) sd += prob.s[i] * d[i];
            const double slack = std::max(prob.mean(r) - prob.target, 0.0);
            if (sd > 1e-15) tlo = std::max(tlo, -slack / sd);
            if (sd < -1e-15) thi = std::min(thi, slack / -sd);
            if (!(thi - tlo > 1e-15)) continue;

            auto along = [&](double t) {
                for (std::size_t i = 0; i < K; ++i) trial[i] = std::max(r[i] + t * d[i], 0.0);
                return prob.objective(trial, scratch);
            };
            const auto res = numeric::golden_section_min(along, tlo, thi, 1e-13 * (1.0 + thi - tlo), 120);
            // Endpoints are often optimal when the mean constraint binds.
            double t = res.x;
            double v = res.fx;
            for (double cand : {tlo, thi}) {
                const double fv = along(cand);
                if (fv < v) {
                    v = fv;
                    t = cand;
                }
            }
            if (v < best) {
                best = v;
                for (std::size_t i = 0; i < K; ++i) r[i] = std::max(r[i] + t * d[i], 0.0);
            }
        }
        if (start - best <= 1e-15 * (1.0 + best)) break;
    }

    out.value = RateValue{best};
    out.sweeps = sweeps;
    out.q.resize(K);
    for (std::size_t i = 0; i < K; ++i) out.q[i] = beta * prob.p[i] + (1.0 - beta) * r[i];
    return out;
}

}  // namespace worci
