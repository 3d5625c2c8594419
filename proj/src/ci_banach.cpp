#include "worci/ci_banach.hpp"

#include "worci/common.hpp"
#include "worci/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace worci {

BanachParams BanachParams::from_design(const SamplingDesign& design, double d, double D, double alpha) {
    BanachParams p{d, D, alpha, design.beta(), double(design.n()), design.N()};
    p.validate();
    return p;
}

BanachParams BanachParams::from_fraction(long N, double beta, double d, double D, double alpha) {
    BanachParams p{d, D, alpha, beta, beta * double(N), N};
    p.validate();
    return p;
}

void BanachParams::validate() const {
    if (!(d > 0.0)) throw InvalidArgument("d must be positive");
    if (!(D >= 1.0)) throw InvalidArgument("D must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0,1)");
    if (!(n > 0.0)) throw InvalidArgument("n must be positive");
    if (N < 1) throw InvalidArgument("N must be positive");
}

double ell_n(const BanachParams& p) {
    return std::log(2.36 * std::sqrt((1.0 - p.beta) * p.n) / p.alpha);
}

namespace {

// e^a - 1 - a without cancellation for small a.
double expm1_minus_linear(double a) {
    if (std::abs(a) < 1e-3) return a * a * (0.5 + a * (1.0 / 6.0 + a * (1.0 / 24.0 + a / 120.0)));
    return std::expm1(a) - a;
}

}  // namespace

double g_of_lambda(const BanachParams& p, double lambda) {
    if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
    const double b = p.beta, bb = 1.0 - p.beta;
    const double a1 = lambda * bb * p.d;
    const double a2 = lambda * b * p.d;
    const double D2 = p.D * p.D;
    if (std::max(a1, a2) < 600.0) {
        // b a1 + bb a2 = 2 lambda b bb d, so the bracket is a sum of e^a - 1 - a terms.
        const double inner = b * expm1_minus_linear(a1) + bb * expm1_minus_linear(a2);
        return std::log1p(D2 * inner) / b;
    }
    const double top = std::max(a1, a2);
    const double scaled = b * std::exp(a1 - top) + bb * std::exp(a2 - top) -
                          (1.0 + 2.0 * lambda * b * bb * p.d) * std::exp(-top);
    return (std::log(D2) + top + std::log(scaled)) / b;
}

OptimizedRadius radius_optimized(const BanachParams& p, double tol) {
    p.validate();
    const double ell = ell_n(p);
    if (ell <= 0.0) return {0.0, 0.0};
    const double c = ell / p.n;
    auto h = [&](double loglam) {
        const double lam = std::exp(loglam);
        return (c + g_of_lambda(p, lam)) / lam;
    };
    const double lo = std::log(1e-6), hi = std::log(1e6);
    const int M = 481;
    int best = 0;
    double best_v = kInf;
    for (int i = 0; i < M; ++i) {
        const double v = h(lo + (hi - lo) * i / (M - 1));
        if (v < best_v) {
            best_v = v;
            best = i;
        }
    }
    if (best == M - 1)
        throw SolverError("radius objective still decreasing at lambda = 1e6", best_v);
    if (best == 0)
        throw SolverError("radius objective still decreasing at lambda = 1e-6", best_v);
    const double step = (hi - lo) / (M - 1);
    const double a = lo + step * (best - 1), bnd = lo + step * (best + 1);
    const auto res = numeric::golden_section_min(h, a, bnd, tol, 400);
    return {res.fx, std::exp(res.x)};
}

ClosedFormConstant parse_closed_form(std::string_view s) {
    if (s == "c3" || s == "3") return ClosedFormConstant::c3;
    if (s == "c24" || s == "2.4") return ClosedFormConstant::c24;
    throw InvalidArgument("closed-form constant must be c3 or c24");
}

ClosedFormRadius radius_closed_form(const BanachParams& p, ClosedFormConstant c) {
    p.validate();
    const double ell = ell_n(p);
    const double bb = 1.0 - p.beta;
    ClosedFormRadius out;
    if (c == ClosedFormConstant::c3) {
        const double mx = std::max(p.beta, bb);
        out.epsilon = p.d * p.D * std::sqrt(3.0 * bb * std::max(ell, 0.0) / p.n);
        out.required_n = 4.0 * mx * mx * ell / (3.0 * p.D * p.D * bb);
    } else {
        out.epsilon = p.d * p.D * std::sqrt(2.4 * bb * std::max(ell, 0.0) / p.n);
        out.required_n = 5.0 * ell / (0.81 * bb * p.D * p.D * p.d * p.d);
    }
    out.valid = p.n >= out.required_n;
    return out;
}

double radius_schneider(const BanachParams& p) {
    p.validate();
    return p.d * p.D *
           std::sqrt(8.0 * ((1.0 - p.beta) + 1.0 / double(p.N)) * std::log(2.0 / p.alpha) / p.n);
}

KernelKind parse_kernel(std::string_view s) {
    if (s == "matern32") return KernelKind::matern32;
    if (s == "rbf") return KernelKind::rbf;
    throw InvalidArgument("kernel must be matern32 or rbf");
}

double Kernel::at_distance(double r) const {
    if (kind == KernelKind::matern32) {
        const double z = std::sqrt(3.0) * r / lengthscale;
        return (1.0 + z) * std::exp(-z);
    }
    return std::exp(-r * r / (2.0 * lengthscale * lengthscale));
}

double Kernel::operator()(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != y.size()) throw InvalidArgument("kernel arguments differ in dimension");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        s += d * d;
    }
    return at_distance(std::sqrt(s));
}

double GramSummary::deviation() const {
    const double nn = double(n), NN = double(N);
    const double rad = S_nn / (nn * nn) - 2.0 * S_nN / (nn * NN) + S_NN / (NN * NN);
    return std::sqrt(std::max(rad, 0.0));
}

GramCache::GramCache(const std::vector<std::vector<double>>& vectors, Kernel kernel, Exec exec)
    : N_(long(vectors.size())) {
    if (N_ < 1) throw InvalidArgument("empty dataset");
    if (!(kernel.lengthscale > 0.0)) throw InvalidArgument("lengthscale must be positive");
    const std::size_t dim = vectors.front().size();
    for (const auto& v : vectors)
        if (v.size() != dim) throw InvalidArgument("feature vectors differ in dimension");
    const std::size_t N = std::size_t(N_);
    gram_.assign(N * N, 0.0);
    row_sum_.assign(N, 0.0);
    auto fill_row = [&](std::size_t i) {
        gram_[i * N + i] = 1.0;
        for (std::size_t j = i + 1; j < N; ++j) gram_[i * N + j] = kernel(vectors[i], vectors[j]);
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long i = 0; i < N_; ++i) fill_row(std::size_t(i));
    } else {
        for (std::size_t i = 0; i < N; ++i) fill_row(i);
    }
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < i; ++j) gram_[i * N + j] = gram_[j * N + i];
    for (std::size_t i = 0; i < N; ++i)
        row_sum_[i] = numeric::compensated_sum(std::span<const double>(&gram_[i * N], N));
    S_NN_ = numeric::compensated_sum(row_sum_);
}

GramSummary GramCache::summarize(std::span<const std::size_t> sample, Exec exec) const {
    const std::size_t N = std::size_t(N_);
    const std::size_t n = sample.size();
    if (n == 0) throw InvalidArgument("empty sample");
    for (auto i : sample)
        if (i >= N) throw InvalidArgument("sample index out of range");
    GramSummary g;
    g.N = N_;
    g.n = long(n);
    g.S_NN = S_NN_;
    std::vector<double> cross(n), partial(n);
    auto row = [&](std::size_t a) {
        const double* r = &gram_[sample[a] * N];
        double s = 0.0;
        for (std::size_t b = 0; b < n; ++b) s += r[sample[b]];
        partial[a] = s;
        cross[a] = row_sum_[sample[a]];
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long a = 0; a < long(n); ++a) row(std::size_t(a));
    } else {
        for (std::size_t a = 0; a < n; ++a) row(a);
    }
    g.S_nn = numeric::compensated_sum(partial);
    g.S_nN = numeric::compensated_sum(cross);
    return g;
}

double GramCache::deviation(std::span<const std::size_t> sample, Exec exec) const {
    const std::size_t N = std::size_t(N_);
    if (sample.empty()) throw InvalidArgument("empty sample");
    std::vector<double> w(N, -1.0 / double(N));
    const double inv_n = 1.0 / double(sample.size());
    std::vector<long> count(N, 0);
    for (auto i : sample) {
        if (i >= N) throw InvalidArgument("sample index out of range");
        ++count[i];
    }
    for (std::size_t i = 0; i < N; ++i)
        if (count[i] > 0) w[i] = double(count[i]) * inv_n - 1.0 / double(N);
    std::vector<double> partial(N);
    auto row = [&](std::size_t i) {
        const double* r = &gram_[i * N];
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j) s += r[j] * w[j];
        partial[i] = w[i] * s;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
        for (long i = 0; i < N_; ++i) row(std::size_t(i));
    } else {
        for (std::size_t i = 0; i < N; ++i) row(i);
    }
    return std::sqrt(std::max(numeric::compensated_sum(partial), 0.0));
}

double mmd_deviation(const std::vector<std::vector<double>>& vectors,
                     std::span<const std::size_t> sample_indices, Kernel kernel, Exec exec) {
    return GramCache(vectors, kernel, exec).deviation(sample_indices, exec);
}

}  // namespace worci
