#include "worci/baselines.hpp"

#include "worci/common.hpp"
#include "worci/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace worci {

namespace {

void check(long N, long n, double alpha) {
    if (n < 1) throw InvalidArgument("n must be positive");
    if (n > N) throw InvalidArgument("n exceeds N");
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
}

}  // namespace

BaselineMethod parse_baseline(std::string_view raw) {
    std::string name(raw);
    std::replace(name.begin(), name.end(), '-', '_');
    if (name == "hoeffding") return BaselineMethod::hoeffding;
    if (name == "hoeffding_serfling") return BaselineMethod::hoeffding_serfling;
    if (name == "hoeffding_serfling_improved") return BaselineMethod::hoeffding_serfling_improved;
    if (name == "bernstein_serfling") return BaselineMethod::bernstein_serfling;
    if (name == "clt") return BaselineMethod::clt;
    throw InvalidArgument("unknown baseline '" + std::string(name) + "'");
}

std::string_view to_string(BaselineMethod m) {
    switch (m) {
    case BaselineMethod::hoeffding: return "hoeffding";
    case BaselineMethod::hoeffding_serfling: return "hoeffding_serfling";
    case BaselineMethod::hoeffding_serfling_improved: return "hoeffding_serfling_improved";
    case BaselineMethod::bernstein_serfling: return "bernstein_serfling";
    case BaselineMethod::clt: return "clt";
    }
    return "?";
}

double width_hoeffding(long n, double alpha) {
    if (n < 1) throw InvalidArgument("n must be positive");
    return std::sqrt(std::max(std::log(2.0 / alpha), 0.0) / (2.0 * double(n)));
}

double width_hoeffding_serfling(long N, long n, double alpha, bool improved) {
    check(N, n, alpha);
    const double rho = improved ? 1.0 - double(n) / double(N) : 1.0 - double(n - 1) / double(N);
    return std::sqrt(std::max(std::log(2.0 / alpha), 0.0) * rho / (2.0 * double(n)));
}

double width_bernstein_serfling(long N, long n, double alpha, double sigma) {
    check(N, n, alpha);
    if (!(sigma >= 0.0)) throw InvalidArgument("bernstein_serfling needs sigma >= 0");
    const double L = std::log(2.0 / alpha);
    const double nn = double(n);
    const double f = 1.0 - nn / double(N);
    const double first = sigma * std::sqrt(2.0 * f * (1.0 + 1.0 / nn) * L / nn);
    const double rad = std::max((double(N) / (nn + 1.0) - 1.0) * f, 0.0);
    return first + (4.0 / 3.0 + std::sqrt(rad)) * L / nn;
}

double width_clt(std::span<const double> sample, long N, double alpha) {
    const long n = long(sample.size());
    if (n < 2) throw InvalidArgument("clt width needs n >= 2");
    check(N, n, alpha);
    const auto s = summary(sample);
    const double z = numeric::normal_quantile(1.0 - alpha / 2.0);
    return z * std::sqrt(s.sigma2) * std::sqrt((1.0 - double(n) / double(N)) / double(n));
}

double baseline_half_width(BaselineMethod method, std::span<const double> sample, long N,
                           double alpha, double sigma) {
    const long n = long(sample.size());
    switch (method) {
    case BaselineMethod::hoeffding: return width_hoeffding(n, alpha);
    case BaselineMethod::hoeffding_serfling: return width_hoeffding_serfling(N, n, alpha, false);
    case BaselineMethod::hoeffding_serfling_improved: return width_hoeffding_serfling(N, n, alpha, true);
    case BaselineMethod::bernstein_serfling: return width_bernstein_serfling(N, n, alpha, sigma);
    case BaselineMethod::clt: return width_clt(sample, N, alpha);
    }
    throw InvalidArgument("unknown baseline");
}

}  // namespace worci
