#pragma once

#include "worci/common.hpp"
#include "worci/population.hpp"

#include <cstdint>
#include <span>

namespace worci {

/// Log-budget terms for an alphabet of size k and population size N.
struct ConfidenceBudget {
    double alpha = 0.0;
    double r_N = 0.0;  ///< (k+1) ln(N+1)
    double a_N = 0.0;  ///< ln(1/(2 alpha)) - r_N
    double c_N = 0.0;  ///< ln(2/alpha) + 2 r_N

    static ConfidenceBudget make(double alpha, std::size_t k, long N);

    /// 1 + 2/sigma2; infinite when sigma2 = 0.
    static double sandwich_A(double sigma2) { return sigma2 > 0.0 ? 1.0 + 2.0 / sigma2 : kInf; }
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const noexcept { return hi - lo; }
    double center() const noexcept { return 0.5 * (lo + hi); }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    bool contains(const Interval& o) const noexcept { return lo <= o.lo && o.hi <= hi; }
};

/// Symmetric interval around `center` clipped to [0, 1].
Interval clipped(double center, double half_width);

/// Plus side: inf{m : J+(P,beta,m) >= level}; minus side: sup{m : J-(P,beta,m) >= level}.
/// level 0 gives mu_P. J+ is infinite past beta mu_P + (1 - beta), so a level above
/// every finite value returns that point (and beta mu_P on the minus side).
/// The plus result m satisfies J+(m - tol) < level <= J+(m).
double inverse_rate(const DiscreteDistribution& P, double beta, double level, Side side,
                    double tol = 1e-8);

struct ProposedCI {
    Interval interval;
    double sample_mean = 0.0;
    double level = 0.0;  ///< c_N / n
    ConfidenceBudget budget;
    Interval envelope;  ///< sample mean +- sqrt((1 - beta) c_N / (2n)), unclipped
};

/// [b-, b+] from the empirical inverse rate functions at level c_N/n.
/// Sample values must lie in `alphabet` (snapping tolerance 1e-12).
ProposedCI ci_proposed(std::span<const double> sample, std::span<const double> alphabet,
                       const SamplingDesign& design, double alpha, double tol = 1e-8);

enum class Projection { rounded, exhaustive };

Projection parse_projection(std::string_view s);

/// Largest-remainder rounding of n P(s) to integers summing to n, as a type.
DiscreteDistribution round_to_type(const DiscreteDistribution& P, long n);

/// argmin of I(t, beta, P) over all types t with denominator n (n <= 12, k <= 4).
DiscreteDistribution closest_type_exhaustive(const DiscreteDistribution& P, double beta, long n);

struct LowerBound {
    double b_star_minus = 0.0;
    double b_star_plus = 0.0;
    double half_width = 0.0;
    bool degenerate = false;  ///< a_N <= 0
    DiscreteDistribution projected;
    ConfidenceBudget budget;
};

LowerBound lower_bound_width(const DiscreteDistribution& pop_dist, const SamplingDesign& design,
                             double alpha, Projection mode = Projection::rounded,
                             double tol = 1e-8);

/// Sample-size conditions under which the inverse-rate sandwich is proved.
struct SandwichThresholds {
    double kappa = 0.0;
    double C = 0.0;                 ///< (1/beta)(1/(1-beta-kappa)^2 + 1/(1-kappa)^2)
    double variance_condition = 0.0;   ///< 2 (1-beta) / (kappa^2 sigma^4)
    double remainder_condition = 0.0;  ///< 2 (1-beta)^3 C^2 / (9 sigma^4)
    double n_over_cN = 0.0;
    long n0 = -1;  ///< smallest n meeting both at fixed beta; -1 if none below 10^12
    bool satisfied = false;
};

/// kappa defaults to (1 - beta)/2.
SandwichThresholds sandwich_thresholds(double sigma2, const SamplingDesign& design, double alpha,
                                       std::size_t k, double kappa = -1.0);

struct SandwichReport {
    int trials = 0;
    int upper_holds = 0;
    int lower_holds = 0;
    int both_hold = 0;
    double frequency = 0.0;
    double sigma2 = 0.0;
    double A = 0.0;             ///< with the population variance
    double mean_A_sample = 0.0; ///< average of 1 + 2/sigma_hat^2 over trials
    int both_hold_sample_A = 0; ///< same event with the per-trial sample variance substituted
    double g_plus = 0.0;        ///< g+(A c_N / n) on the population
    double g_minus = 0.0;
    SandwichThresholds thresholds;
};

/// Monte Carlo frequency of g^+(c_N/n) <= g+(A c_N/n) and g^-(c_N/n) >= g-(A c_N/n).
/// Trials run in parallel with per-trial seeds; counts do not depend on the thread count.
SandwichReport sandwich_check(const Population& pop, std::span<const double> alphabet,
                              const SamplingDesign& design, double alpha, int trials,
                              std::uint64_t seed);

}  // namespace worci
