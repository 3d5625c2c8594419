#include "worci/dualsolve.hpp"

#include "worci/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace worci {

namespace {

constexpr double kInteriorMargin = 1e-9;
constexpr double kEndpointNudge = 1e-9;
constexpr double kBoundaryTolerance = 1e-12;
constexpr int kMaxIterations = 200;

// Dual objective in the coordinates (lambda, u = lambda + rho), u <= L.
// Writing e_s = (1-beta) exp(beta(u - lambda(1-s))):
//   h = sum_s P_s log((1 - e_s)/beta) + lambda (m - beta mu - (1-beta)) + u (1-beta).
class DualFunction {
public:
    DualFunction(const DiscreteDistribution& P, double beta, double m)
        : s_(P.alphabet().begin(), P.alphabet().end()),
          p_(P.weights().begin(), P.weights().end()),
          beta_(beta),
          log_bb_(std::log1p(-beta)),
          lin_(m - beta * P.mean() - (1.0 - beta)) {}

    struct Eval {
        double h = 0.0;
        double hu = 0.0;
        double huu = 0.0;
        double hl = 0.0;
        double hll = 0.0;
        double hlu = 0.0;
    };

    Eval eval(double lambda, double u, bool with_value = true) const {
        Eval e;
        double sum_log = 0.0;
        double sum_ratio = 0.0;    // sum P e/om
        double sum_ratio_l = 0.0;  // sum P (1-s) e/om
        double sum_c = 0.0;        // sum P e/om^2
        double sum_c_l = 0.0;      // sum P (1-s) e/om^2
        double sum_c_ll = 0.0;     // sum P (1-s)^2 e/om^2
        for (std::size_t i = 0; i < s_.size(); ++i) {
            if (p_[i] == 0.0) continue;
            const double gap = 1.0 - s_[i];
            const double a = log_bb_ + beta_ * (u - lambda * gap);
            const double es = std::exp(a);
            const double om = -std::expm1(a);
            if (with_value) sum_log += p_[i] * std::log(om);
            const double r = es / om;
            const double c = r / om;
            sum_ratio += p_[i] * r;
            sum_ratio_l += p_[i] * gap * r;
            sum_c += p_[i] * c;
            sum_c_l += p_[i] * gap * c;
            sum_c_ll += p_[i] * gap * gap * c;
        }
        const double bb = 1.0 - beta_;
        if (with_value) e.h = sum_log - std::log(beta_) + lambda * lin_ + u * bb;
        e.hu = bb - beta_ * sum_ratio;
        e.huu = -beta_ * beta_ * sum_c;
        e.hl = beta_ * sum_ratio_l + lin_;
        e.hll = -beta_ * beta_ * sum_c_ll;
        e.hlu = beta_ * beta_ * sum_c_l;
        return e;
    }

    double beta() const { return beta_; }

private:
    std::vector<double> s_;
    std::vector<double> p_;
    double beta_;
    double log_bb_;
    double lin_;
};

// argmax_u h(lambda, u) over u <= upper; h is concave in u.
double inner_argmax(const DualFunction& f, double lambda, double upper, int& iterations) {
    auto hu = [&](double u) { return f.eval(lambda, u, false); };
    auto e = hu(upper);
    ++iterations;
    if (e.hu >= 0.0) return upper;

    double hi = upper;
    double lo = std::min(upper, 0.0) - 1.0;
    for (double step = 1.0;; step *= 2.0) {
        ++iterations;
        if (hu(lo).hu > 0.0) break;
        hi = lo;
        lo -= step;
        if (step > 1e300) throw SolverError("dual inner search failed to bracket");
    }

    double u = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxIterations; ++it) {
        ++iterations;
        e = hu(u);
        if (e.hu > 0.0)
            lo = u;
        else
            hi = u;
        if (e.hu == 0.0) return u;
        double next = u - e.hu / e.huu;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double scale = 1.0 + std::abs(u);
        if (std::abs(next - u) <= 1e-15 * scale || hi - lo <= 1e-15 * scale) return next;
        u = next;
    }
    return u;
}

struct OuterState {
    double lambda = 0.0;
    double u = 0.0;
    double slope = 0.0;     // d phi / d lambda
    double curvature = 0.0; // d^2 phi / d lambda^2
};

OuterState outer_eval(const DualFunction& f, double lambda, double upper, int& inner_iters) {
    OuterState st;
    st.lambda = lambda;
    st.u = inner_argmax(f, lambda, upper, inner_iters);
    const auto e = f.eval(lambda, st.u, false);
    st.slope = e.hl;
    if (st.u < upper && e.huu < 0.0)
        st.curvature = e.hll - e.hlu * e.hlu / e.huu;
    else
        st.curvature = e.hll;
    return st;
}

DualSolution solve_plus(const DiscreteDistribution& P_in, double beta, double m, double tol) {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0,1)");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    const DiscreteDistribution P = nudge_endpoints(P_in);
    const double mu = P.mean();
    const double top = max_reachable_mean(mu, beta);

    DualSolution sol;
    if (m > top + kBoundaryTolerance) {
        sol.value = kInf;
        sol.point = {kInf, -kInf};
        return sol;
    }
    const DiscreteDistribution ext = extend_with_one(P);
    if (m >= top - kBoundaryTolerance) {
        // Only Q = beta P + (1-beta) delta_1 reaches this mean.
        std::vector<double> q(ext.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = beta * ext.weights()[i];
        q.back() += 1.0 - beta;
        sol.value = rate_I_weights(ext.weights(), beta, q);
        sol.point = {kInf, -kInf};
        sol.primal_q = DiscreteDistribution({ext.alphabet().begin(), ext.alphabet().end()}, q);
        return sol;
    }

    const DualFunction f(P, beta, m);
    const double upper = dual_rho_limit(beta) - kInteriorMargin;

    OuterState st = outer_eval(f, 0.0, upper, sol.inner_iterations);
    if (st.slope > 0.0) {
        double lo = 0.0;
        double hi = 1.0;
        OuterState hi_state = outer_eval(f, hi, upper, sol.inner_iterations);
        while (hi_state.slope > 0.0) {
            lo = hi;
            st = hi_state;
            hi *= 2.0;
            ++sol.outer_iterations;
            if (hi > 1e15) throw SolverError("dual outer search failed to bracket", st.lambda);
            hi_state = outer_eval(f, hi, upper, sol.inner_iterations);
        }
        double lambda = st.lambda > 0.0 ? st.lambda : 0.5 * (lo + hi);
        for (int it = 0; it < kMaxIterations; ++it) {
            ++sol.outer_iterations;
            st = outer_eval(f, lambda, upper, sol.inner_iterations);
            if (st.slope > 0.0)
                lo = lambda;
            else
                hi = lambda;
            if (st.slope == 0.0) break;
            // Newton decrement bounds the remaining suboptimality.
            const bool tiny_decrement =
                st.curvature < 0.0 && st.slope * st.slope / (-2.0 * st.curvature) <= 1e-6 * tol * tol;
            double next = st.curvature < 0.0 ? lambda - st.slope / st.curvature : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            const double scale = 1.0 + lambda;
            if (tiny_decrement || hi - lo <= 1e-15 * scale) break;
            lambda = next;
        }
    }

    sol.point = {st.lambda, st.u - st.lambda};
    sol.value = f.eval(st.lambda, st.u).h;
    if (st.lambda == 0.0) sol.value = std::max(sol.value, 0.0);
    sol.primal_q = kkt_reconstruct(P, beta, sol.point);
    const double primal = rate_I_weights(ext.weights(), beta, sol.primal_q.weights());
    sol.gap_certificate = std::abs(primal - sol.value);
    return sol;
}

}  // namespace

bool in_dual_domain(double beta, DualPoint pt) {
    return pt.lambda >= 0.0 && pt.rho + pt.lambda <= dual_rho_limit(beta) + 1e-15;
}

double dual_objective(const DiscreteDistribution& P, double beta, double m, DualPoint pt) {
    if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0,1)");
    if (!in_dual_domain(beta, pt)) throw InvalidArgument("dual point outside the dual domain");
    const double smax = P.alphabet().back();
    const double arg_max = -std::expm1(std::log1p(-beta) + beta * (pt.lambda * smax + pt.rho));
    if (!(arg_max >= 1e-12)) throw InvalidArgument("dual point too close to the domain boundary");
    const DualFunction f(P, beta, m);
    return f.eval(pt.lambda, pt.lambda + pt.rho).h;
}

DiscreteDistribution kkt_reconstruct(const DiscreteDistribution& P, double beta, DualPoint pt) {
    if (P.alphabet().back() >= 1.0)
        throw InvalidArgument("kkt_reconstruct needs an alphabet inside [0,1); nudge endpoints first");
    const std::size_t k = P.size();
    std::vector<double> a(P.alphabet().begin(), P.alphabet().end());
    std::vector<double> q(k + 1);
    const double log_bb = std::log1p(-beta);
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double om = -std::expm1(log_bb + beta * (pt.lambda * a[i] + pt.rho));
        if (!(om > 0.0)) throw CertificateError("KKT denominator vanished");
        q[i] = beta * P.weights()[i] / om;
        total += q[i];
    }
    double resid = 1.0 - total;
    if (resid < -1e-9)
        throw CertificateError("KKT reconstruction has negative residual mass " + format_number(resid));
    if (resid < 0.0) {
        // Fold the tiny overshoot back so the weights still sum to one.
        for (std::size_t i = 0; i < k; ++i) q[i] /= total;
        resid = 0.0;
    }
    q[k] = resid;
    a.push_back(1.0);
    return DiscreteDistribution(std::move(a), std::move(q));
}

DiscreteDistribution nudge_endpoints(const DiscreteDistribution& P) {
    const auto al = P.alphabet();
    if (al.front() > 0.0 && al.back() < 1.0) return P;
    std::vector<double> a(al.begin(), al.end());
    if (a.front() <= 0.0) a.front() = kEndpointNudge;
    if (a.back() >= 1.0) a.back() = 1.0 - kEndpointNudge;
    return DiscreteDistribution(std::move(a), {P.weights().begin(), P.weights().end()});
}

DualSolution j_dual(const DiscreteDistribution& P, double beta, double m, Side side, double tol) {
    if (side == Side::plus) return solve_plus(P, beta, m, tol);
    DualSolution sol = solve_plus(P.reflect(), beta, 1.0 - m, tol);
    if (sol.primal_q.size() > 0) sol.primal_q = sol.primal_q.reflect();
    return sol;
}

double rate_value(const DiscreteDistribution& P, double beta, double m, Side side, double tol) {
    return j_dual(P, beta, m, side, tol).value;
}

}  // namespace worci
