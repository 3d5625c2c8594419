#pragma once

#include "worci/ci_finite.hpp"
#include "worci/population.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace worci {

enum class CouplingMode { paper, safe, exact };

CouplingMode parse_coupling_mode(std::string_view s);
std::string_view to_string(CouplingMode m);

/// Upper bound on 1/P(Binomial(N, beta) = beta N):
///   paper  1.18 sqrt(beta (1-beta) N)
///   safe   (e^2/sqrt(2 pi)) sqrt(beta (1-beta) N)
///   exact  the reciprocal itself, through log-gamma.
/// exact mode requires beta N to be an integer (within 1e-9).
double coupling_bound(long N, double beta, CouplingMode mode);

/// Lambda(lambda) = sum_i w_i log(beta e^{lambda (1-beta) x_i} + (1-beta) e^{-lambda beta x_i})
/// over a weighted point list, with beta fixed by the design.
class CgfModel {
public:
    CgfModel(std::vector<double> points, std::vector<double> weights, double beta);

    /// Equal weights over `values` (population or sample).
    static CgfModel from_values(std::span<const double> values, double beta);

    double beta() const noexcept { return beta_; }
    double mean() const noexcept { return mean_; }
    double m2() const noexcept { return m2_; }

    double cgf(double lambda) const;
    double cgf_d1(double lambda) const;
    double cgf_d2(double lambda) const;

    /// sup of Lambda' over lambda >= 0: (1 - beta) times the mean.
    double saturation() const noexcept { return (1.0 - beta_) * mean_; }
    /// Limit of Lambda* as y approaches the saturation slope: -P(x > 0) log beta.
    double legendre_limit() const noexcept { return -positive_mass_ * std::log(beta_); }

    /// sup_{lambda >= 0} lambda y - Lambda(lambda); kInf for y >= saturation().
    double legendre(double y, double tol = 1e-13) const;

    /// Smallest y with Lambda*(y) >= t; saturation() when t is at or above
    /// legendre_limit().
    double invert_legendre(double t, double tol = 1e-13) const;

    /// lambda solving Lambda'(lambda) = y for 0 <= y < saturation().
    double slope_inverse(double y, double tol = 1e-13) const;

private:
    std::vector<double> x_;
    std::vector<double> w_;
    double beta_;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double positive_mass_ = 0.0;
};

/// (1/N) ln(2 coupling_bound(N, beta, mode) / alpha).
double t_budget(long N, long n, double alpha, CouplingMode mode = CouplingMode::paper);

struct AsCI {
    Interval interval;
    double sample_mean = 0.0;
    double epsilon = 0.0;
    double t = 0.0;  ///< argument passed to the inverse conjugate
    bool saturated = false;
};

/// Oracle interval from the population CGF; the sample supplies the center.
AsCI ci_as_oracle(const Population& pop, std::span<const double> sample, double alpha,
                  CouplingMode mode = CouplingMode::paper);

/// Empirical interval: the sample CGF with the population sampling fraction n/N
/// and slack N^{-exponent} added to the budget.
AsCI ci_as_empirical(std::span<const double> sample, long N, double alpha,
                     CouplingMode mode = CouplingMode::paper, double slack_exponent = 1.1);

}  // namespace worci
