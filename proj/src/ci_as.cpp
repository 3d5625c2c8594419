#include "worci/ci_as.hpp"

#include "worci/common.hpp"
#include "worci/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace worci {

CouplingMode parse_coupling_mode(std::string_view s) {
    if (s == "paper") return CouplingMode::paper;
    if (s == "safe") return CouplingMode::safe;
    if (s == "exact") return CouplingMode::exact;
    throw InvalidArgument("constant mode must be paper, safe or exact");
}

std::string_view to_string(CouplingMode m) {
    switch (m) {
    case CouplingMode::paper: return "paper";
    case CouplingMode::safe: return "safe";
    case CouplingMode::exact: return "exact";
    }
    return "?";
}

double coupling_bound(long N, double beta, CouplingMode mode) {
    if (N < 1) throw InvalidArgument("N must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0,1)");
    const double root = std::sqrt(beta * (1.0 - beta) * double(N));
    switch (mode) {
    case CouplingMode::paper: return 1.18 * root;
    case CouplingMode::safe: return std::exp(2.0) / std::sqrt(2.0 * M_PI) * root;
    case CouplingMode::exact: {
        const double bn = beta * double(N);
        const long n = std::lround(bn);
        if (std::abs(bn - double(n)) > 1e-9)
            throw InvalidArgument("exact coupling needs beta N to be an integer");
        return std::exp(-numeric::log_binomial_pmf(N, n, beta));
    }
    }
    throw InvalidArgument("unknown coupling mode");
}

CgfModel::CgfModel(std::vector<double> points, std::vector<double> weights, double beta)
    : x_(std::move(points)), w_(std::move(weights)), beta_(beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0,1)");
    if (x_.empty() || x_.size() != w_.size()) throw InvalidArgument("CGF model needs matching points and weights");
    std::vector<double> t1(x_.size()), t2(x_.size()), tp(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) {
        if (!(x_[i] >= 0.0 && x_[i] <= 1.0)) throw InvalidArgument("CGF points must lie in [0,1]");
        if (!(w_[i] >= 0.0)) throw InvalidArgument("negative CGF weight");
        t1[i] = w_[i] * x_[i];
        t2[i] = w_[i] * x_[i] * x_[i];
        tp[i] = x_[i] > 0.0 ? w_[i] : 0.0;
    }
    mean_ = numeric::compensated_sum(t1);
    m2_ = numeric::compensated_sum(t2);
    positive_mass_ = numeric::compensated_sum(tp);
}

CgfModel CgfModel::from_values(std::span<const double> values, double beta) {
    if (values.empty()) throw InvalidArgument("CGF model needs at least one value");
    std::vector<double> w(values.size(), 1.0 / double(values.size()));
    return CgfModel({values.begin(), values.end()}, std::move(w), beta);
}

// Per point, with t = lambda x and u = e^{-|t|}, every term is written so
// that no exponential exceeds 1.
double CgfModel::cgf(double lambda) const {
    const double b = beta_, bb = 1.0 - beta_;
    double acc = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double t = lambda * x_[i];
        double f;
        if (t >= 0.0)
            f = bb * t + std::log1p(bb * std::expm1(-t));
        else
            f = -b * t + std::log1p(b * std::expm1(t));
        acc += w_[i] * f;
    }
    return acc;
}

double CgfModel::cgf_d1(double lambda) const {
    const double b = beta_, bb = 1.0 - beta_;
    double acc = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double x = x_[i];
        const double t = lambda * x;
        double g;
        if (t >= 0.0) {
            const double u = std::exp(-t);
            g = -b * bb * x * std::expm1(-t) / (b + bb * u);
        } else {
            const double v = std::exp(t);
            g = b * bb * x * std::expm1(t) / (b * v + bb);
        }
        acc += w_[i] * g;
    }
    return acc;
}

double CgfModel::cgf_d2(double lambda) const {
    const double b = beta_, bb = 1.0 - beta_;
    double acc = 0.0;
    for (std::size_t i = 0; i < x_.size(); ++i) {
        const double x = x_[i];
        const double t = lambda * x;
        double h;
        if (t >= 0.0) {
            const double u = std::exp(-t);
            const double d = b + bb * u;
            h = u / (d * d);
        } else {
            const double v = std::exp(t);
            const double d = b * v + bb;
            h = v / (d * d);
        }
        acc += w_[i] * b * bb * x * x * h;
    }
    return acc;
}

namespace {

// Root of an increasing function g on [0, inf) with g(0) < 0 via doubling and
// safeguarded Newton. Returns the upper end of the final bracket.
template <class G, class DG>
double increasing_root(G g, DG dg, double tol) {
    double lo = 0.0;
    double hi = 1.0;
    while (g(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw SolverError("failed to bracket the Legendre root", lo);
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        const double gx = g(x);
        if (gx >= 0.0)
            hi = x;
        else
            lo = x;
        if (hi - lo <= tol * (1.0 + hi)) break;
        const double d = dg(x);
        double next = d > 0.0 ? x - gx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == x) break;
        x = next;
    }
    return hi;
}

}  // namespace

double CgfModel::slope_inverse(double y, double tol) const {
    if (!(y >= 0.0)) throw InvalidArgument("slope must be nonnegative");
    if (y >= saturation()) return kInf;
    if (y == 0.0) return 0.0;
    return increasing_root([&](double l) { return cgf_d1(l) - y; },
                           [&](double l) { return cgf_d2(l); }, tol);
}

double CgfModel::legendre(double y, double tol) const {
    if (!(y >= 0.0)) throw InvalidArgument("legendre needs y >= 0");
    if (y == 0.0) return 0.0;
    if (y >= saturation()) return kInf;
    const double l = slope_inverse(y, tol);
    return std::max(l * y - cgf(l), 0.0);
}

double CgfModel::invert_legendre(double t, double tol) const {
    if (!(t >= 0.0)) throw InvalidArgument("invert_legendre needs t >= 0");
    if (t == 0.0) return 0.0;
    if (t >= legendre_limit()) return saturation();
    // Lambda*(Lambda'(l)) = l Lambda'(l) - Lambda(l), increasing in l with derivative l Lambda''(l).
    const double l = increasing_root([&](double z) { return z * cgf_d1(z) - cgf(z) - t; },
                                     [&](double z) { return z * cgf_d2(z); }, tol);
    return std::min(cgf_d1(l), saturation());
}

double t_budget(long N, long n, double alpha, CouplingMode mode) {
    if (!(n >= 1 && n < N)) throw InvalidArgument("t budget needs 1 <= n < N");
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    const double beta = double(n) / double(N);
    return std::log(2.0 * coupling_bound(N, beta, mode) / alpha) / double(N);
}

namespace {

AsCI finish(const CgfModel& model, double center, double t) {
    AsCI out;
    out.sample_mean = center;
    out.t = t;
    const double y = model.invert_legendre(std::max(t, 0.0));
    out.saturated = t > 0.0 && t >= model.legendre_limit();
    out.epsilon = y / model.beta();
    out.interval = clipped(center, out.epsilon);
    return out;
}

}  // namespace

AsCI ci_as_oracle(const Population& pop, std::span<const double> sample, double alpha,
                  CouplingMode mode) {
    const long N = long(pop.size());
    const long n = long(sample.size());
    const double beta = double(n) / double(N);
    const auto model = CgfModel::from_values(pop.values(), beta);
    return finish(model, summary(sample).mu, t_budget(N, n, alpha, mode));
}

AsCI ci_as_empirical(std::span<const double> sample, long N, double alpha, CouplingMode mode,
                     double slack_exponent) {
    const long n = long(sample.size());
    const double beta = double(n) / double(N);
    const auto model = CgfModel::from_values(sample, beta);
    const double t = t_budget(N, n, alpha, mode) + std::pow(double(N), -slack_exponent);
    return finish(model, summary(sample).mu, t);
}

}  // namespace worci
