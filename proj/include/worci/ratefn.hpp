#pragma once

#include "worci/common.hpp"
#include "worci/population.hpp"

#include <span>
#include <vector>

namespace worci {

/// Weight-level rate function on a shared alphabet:
///   I(P, beta, Q) = KL(P || Q) + (1 - beta)/beta * KL(R || Q),  R = (Q - beta P)/(1 - beta).
/// Returns kInf when Q(s) < beta P(s) - 1e-12 for some s. Residues above that
/// threshold are clamped to zero before taking logs.
double rate_I_weights(std::span<const double> p, double beta, std::span<const double> q);

/// Entropy form (1/beta)(H(Q) - beta H(P) - (1-beta) H(R)); same feasibility rule.
double rate_I_entropy_weights(std::span<const double> p, double beta, std::span<const double> q);

RateValue rate_I(const DiscreteDistribution& P, double beta, const DiscreteDistribution& Q);
RateValue rate_I_entropy_form(const DiscreteDistribution& P, double beta,
                              const DiscreteDistribution& Q);

/// Jensen-Shannon divergence (natural log) between two weight vectors.
double jensen_shannon(std::span<const double> p, std::span<const double> r);

/// P on the alphabet extended by the point 1 (weight 0 there). Unchanged when
/// 1 is already an alphabet point.
DiscreteDistribution extend_with_one(const DiscreteDistribution& P);

struct RateQuery {
    DiscreteDistribution P;
    double beta = 0.5;
    double m = 0.0;
    Side side = Side::plus;
};

/// Largest mean reachable under Q >= beta P on the plus side: beta mu_P + (1 - beta).
inline double max_reachable_mean(double mu, double beta) { return beta * mu + (1.0 - beta); }

struct PrimalSolution {
    RateValue value;
    /// Minimiser on the extended alphabet of the (possibly reflected) problem.
    std::vector<double> q;
    int sweeps = 0;
};

/// Brute-force primal evaluation of J+ / J- for small alphabets (k <= 4):
/// a full simplex grid of the given resolution over R = (Q - beta P)/(1 - beta),
/// followed by exact line searches along pairwise and mean-preserving
/// three-point directions. Test oracle; throws Unsupported for k > 4.
PrimalSolution j_primal_solve(const RateQuery& q, int grid_resolution = 50);

inline RateValue j_primal_oracle(const RateQuery& q, int grid_resolution = 50) {
    return j_primal_solve(q, grid_resolution).value;
}

/// Pinsker-type lower bound (2/(1-beta)) (m - mu)^2 on the active side, zero otherwise.
double pinsker_lower(double mean, double beta_bar, double m, Side side = Side::plus);

}  // namespace worci
