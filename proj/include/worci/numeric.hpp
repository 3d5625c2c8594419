#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>

namespace worci::numeric {

/// Neumaier-compensated sum.
double compensated_sum(std::span<const double> xs);

/// x*log(x) with the convention 0*log(0) = 0.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// p*log(p/q) with 0*log(0/q) = 0 and +inf when p > 0 = q.
double kl_term(double p, double q);

struct MinResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
};

/// Golden-section minimisation of a unimodal function on [a, b].
MinResult golden_section_min(const std::function<double(double)>& f, double a, double b,
                             double xtol, int max_iter = 200);

/// Smallest x in [lo, hi] with pred(x) true, for a predicate that is false
/// then true along the interval. Returns the upper end of the final bracket,
/// so pred(result) holds whenever pred(hi) does.
double bisect_threshold(const std::function<bool(double)>& pred, double lo, double hi,
                        double xtol, int max_iter = 200);

/// Standard normal quantile. Acklam's rational approximation refined by one
/// Halley step against erfc; absolute error well below 1e-12 on (1e-300, 1).
double normal_quantile(double p);

/// log P(Binomial(N, p) = k) via lgamma.
double log_binomial_pmf(long N, long k, double p);

}  // namespace worci::numeric
