#pragma once

#include "worci/ci_as.hpp"
#include "worci/population.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace worci {

/// Norm bound d, smoothness constant D >= 1, and the sampling design. The
/// sample size is a real number so that beta N need not be integral.
struct BanachParams {
    double d = 1.0;
    double D = 1.0;
    double alpha = 0.05;
    double beta = 0.5;
    double n = 1.0;
    long N = 2;

    static BanachParams from_design(const SamplingDesign& design, double d, double D, double alpha);
    /// n = beta N exactly (possibly fractional).
    static BanachParams from_fraction(long N, double beta, double d, double D, double alpha);

    void validate() const;
};

/// ln(2.36 sqrt((1-beta) n) / alpha).
double ell_n(const BanachParams& p);

/// (1/beta) ln(1 + D^2 (beta e^{lambda (1-beta) d} + (1-beta) e^{lambda beta d} - 1 - 2 lambda beta (1-beta) d)).
double g_of_lambda(const BanachParams& p, double lambda);

struct OptimizedRadius {
    double epsilon = 0.0;
    double lambda = 0.0;
};

/// inf over lambda > 0 of (ell_n/n + g(lambda))/lambda: a log-spaced scan of
/// [1e-6, 1e6] followed by golden-section search on log lambda.
OptimizedRadius radius_optimized(const BanachParams& p, double tol = 1e-10);

enum class ClosedFormConstant { c3, c24 };

ClosedFormConstant parse_closed_form(std::string_view s);

struct ClosedFormRadius {
    double epsilon = 0.0;
    bool valid = false;
    double required_n = 0.0;  ///< sample size at which the validity condition starts to hold
};

/// c3:  d D sqrt(3 (1-beta) ell_n / n), valid iff n >= 4 max(beta,1-beta)^2 ell_n / (3 D^2 (1-beta)).
/// c24: d D sqrt(2.4 (1-beta) ell_n / n), valid iff n >= 5 ell_n / (0.81 (1-beta) D^2 d^2).
ClosedFormRadius radius_closed_form(const BanachParams& p, ClosedFormConstant c);

/// d D sqrt(8 ((1-beta) + 1/N) ln(2/alpha) / n).
double radius_schneider(const BanachParams& p);

enum class KernelKind { matern32, rbf };

KernelKind parse_kernel(std::string_view s);

struct Kernel {
    KernelKind kind = KernelKind::matern32;
    double lengthscale = 1.0;

    /// Value at Euclidean distance r; both kernels have k(x, x) = 1.
    double at_distance(double r) const;
    double operator()(std::span<const double> x, std::span<const double> y) const;
};

enum class Exec { serial, parallel };

struct GramSummary {
    double S_NN = 0.0;
    double S_nn = 0.0;
    double S_nN = 0.0;
    long N = 0;
    long n = 0;

    /// sqrt(S_nn/n^2 - 2 S_nN/(nN) + S_NN/N^2), tiny negative radicands clamped to 0.
    double deviation() const;
};

/// Dense gram matrix of a vector dataset with cached row sums. The parallel
/// path splits rows across OpenMP threads; per-row partial sums are combined
/// in row order, so both paths return bit-identical aggregates.
class GramCache {
public:
    GramCache(const std::vector<std::vector<double>>& vectors, Kernel kernel, Exec exec = Exec::parallel);

    long size() const noexcept { return N_; }
    double S_NN() const noexcept { return S_NN_; }

    GramSummary summarize(std::span<const std::size_t> sample, Exec exec = Exec::parallel) const;
    /// sqrt(w' K w) with w_i = count_i/n - 1/N; exactly zero for a census.
    double deviation(std::span<const std::size_t> sample, Exec exec = Exec::parallel) const;

private:
    long N_;
    std::vector<double> gram_;
    std::vector<double> row_sum_;
    double S_NN_ = 0.0;
};

/// ||mu_n - mu_N||_k for one sample; builds the gram aggregates from scratch.
double mmd_deviation(const std::vector<std::vector<double>>& vectors,
                     std::span<const std::size_t> sample_indices, Kernel kernel,
                     Exec exec = Exec::parallel);

}  // namespace worci
