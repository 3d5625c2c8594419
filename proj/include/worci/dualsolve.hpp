#pragma once

#include "worci/common.hpp"
#include "worci/population.hpp"

namespace worci {

/// A point of the dual domain: lambda >= 0 and rho + lambda <= (1/beta) log(1/(1-beta)).
struct DualPoint {
    double lambda = 0.0;
    double rho = 0.0;
};

/// Upper limit of rho + lambda.
inline double dual_rho_limit(double beta) { return -std::log1p(-beta) / beta; }

bool in_dual_domain(double beta, DualPoint pt);

struct DualSolution {
    DualPoint point;
    double value = 0.0;  ///< kInf when the mean constraint is unreachable
    /// Reconstructed primal minimiser on the alphabet extended by 1
    /// (by 0 on the minus side). Empty when infeasible.
    DiscreteDistribution primal_q;
    double gap_certificate = 0.0;
    int outer_iterations = 0;
    int inner_iterations = 0;

    bool feasible() const noexcept { return std::isfinite(value); }
    RateValue rate() const noexcept { return RateValue{value}; }
};

/// Concave dual objective
///   E_P[log((1 - (1-beta) e^{beta(lambda X + rho)}) / beta)] + lambda (m - beta mu_P) + rho (1-beta).
/// Throws InvalidArgument outside the dual domain or when the log argument
/// at the largest alphabet point drops below 1e-12.
double dual_objective(const DiscreteDistribution& P, double beta, double m, DualPoint pt);

/// Q*(s) = beta P(s) / (1 - (1-beta) e^{beta(lambda s + rho)}) on the alphabet
/// plus residual mass at 1. Throws CertificateError when that residual is
/// below -1e-9; smaller negative residues are clamped to zero.
DiscreteDistribution kkt_reconstruct(const DiscreteDistribution& P, double beta, DualPoint pt);

/// Alphabet points at 0 or 1 moved inward by 1e-9; other points untouched.
DiscreteDistribution nudge_endpoints(const DiscreteDistribution& P);

/// J+ (or J- through reflection) by maximising the dual with nested
/// safeguarded Newton iterations on (lambda, lambda + rho).
DualSolution j_dual(const DiscreteDistribution& P, double beta, double m, Side side,
                    double tol = 1e-9);

/// Shorthand for j_dual(...).value.
double rate_value(const DiscreteDistribution& P, double beta, double m, Side side,
                  double tol = 1e-9);

}  // namespace worci
