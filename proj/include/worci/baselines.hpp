#pragma once

#include "worci/population.hpp"

#include <span>
#include <string_view>

namespace worci {

enum class BaselineMethod { hoeffding, hoeffding_serfling, hoeffding_serfling_improved, bernstein_serfling, clt };

BaselineMethod parse_baseline(std::string_view name);
std::string_view to_string(BaselineMethod m);

/// sqrt(ln(2/alpha) / (2n)).
double width_hoeffding(long n, double alpha);
inline double width_hoeffding(const SamplingDesign& d, double alpha) { return width_hoeffding(d.n(), alpha); }

/// sqrt(ln(2/alpha) rho / (2n)) with rho = 1 - (n-1)/N, or 1 - n/N when improved.
/// Takes (N, n) directly so the census case n = N is expressible.
double width_hoeffding_serfling(long N, long n, double alpha, bool improved);

/// Known-sigma Bernstein-Serfling half width:
///   sigma sqrt(2(1-n/N)(1+1/n) ln(2/alpha)/n) + (4/3 + sqrt((N/(n+1)-1)(1-n/N))) ln(2/alpha)/n.
double width_bernstein_serfling(long N, long n, double alpha, double sigma);

/// z_{1-alpha/2} sigma_hat sqrt((1-n/N)/n) with sigma_hat the sample std (denominator n).
double width_clt(std::span<const double> sample, long N, double alpha);

/// Half width of `method`; sigma is required for bernstein_serfling and the
/// sample for clt.
double baseline_half_width(BaselineMethod method, std::span<const double> sample, long N,
                           double alpha, double sigma = -1.0);

}  // namespace worci
