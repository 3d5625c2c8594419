// Runs every acceptance criterion at its stated tolerance and prints one line per criterion.
#include "helpers.hpp"
#include "worci/ci_as.hpp"
#include "worci/ci_banach.hpp"
#include "worci/dualsolve.hpp"
#include "worci/ratefn.hpp"
#include "worci/simharness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace worci;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

Outcome duality_verification() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_E1_dual_vs_primal(defaults_for("E1"), Exec::parallel);
    const double secs = seconds_since(t0);
    return {r.max_gap <= 1e-3 && secs <= 60.0 && r.rows.size() == 402,
            "max gap " + fmt(r.max_gap) + " over " + std::to_string(r.rows.size()) + " points, " + fmt(secs) + " s"};
}

Outcome strong_duality() {
    Rng rng(2024);
    double worst_gap = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t k = 2 + std::size_t(rng.below(7));
        const auto P = testing_util::random_distribution(rng, k);
        const double beta = 0.05 + 0.9 * rng.uniform();
        const double frac = 0.02 + 0.96 * rng.uniform();
        const Side side = rng.uniform() < 0.5 ? Side::plus : Side::minus;
        const double mu = P.mean();
        const double m = side == Side::plus ? mu + (1.0 - beta) * (1.0 - mu) * frac : mu - (1.0 - beta) * mu * frac;
        const auto sol = j_dual(P, beta, m, side);
        worst_gap = std::max(worst_gap, sol.gap_certificate);
    }
    double worst_violation = -kInf;
    for (int i = 0; i < 200; ++i) {
        const std::size_t k = 2 + std::size_t(rng.below(3));
        const auto P = testing_util::random_distribution(rng, k);
        const double beta = 0.1 + 0.8 * rng.uniform();
        const double top = beta * P.mean() + (1.0 - beta);
        const double m = P.mean() + (top - P.mean()) * rng.uniform();
        const double primal = j_primal_oracle({P, beta, m, Side::plus}).value;
        const double L = dual_rho_limit(beta);
        for (int j = 0; j < 5; ++j) {
            const double lambda = 5.0 * rng.uniform();
            const double u = L - 1e-3 - 4.0 * rng.uniform();
            worst_violation = std::max(worst_violation, dual_objective(P, beta, m, {lambda, u - lambda}) - primal);
        }
    }
    return {worst_gap <= 1e-5 && worst_violation <= 1e-6,
            "max certificate " + fmt(worst_gap) + " on 1000 instances, max dual-minus-primal " + fmt(worst_violation)};
}

E2Result e2_cache;
bool e2_ran = false;
double e2_secs = 0.0;

const E2Result& e2() {
    if (!e2_ran) {
        const auto t0 = std::chrono::steady_clock::now();
        e2_cache = run_E2_finite_widths(defaults_for("E2"), Exec::parallel);
        e2_secs = seconds_since(t0);
        e2_ran = true;
    }
    return e2_cache;
}

Outcome dominance() {
    const auto& r = e2();
    bool pass = e2_secs <= 600.0;
    std::ostringstream os;
    for (const auto& s : r.summaries) {
        const bool ok = s.mean_proposed < s.mean_hoeffding && s.mean_proposed < s.mean_bernstein_serfling &&
                        s.coverage == 1.0;
        pass = pass && ok;
        os << "alpha=" << fmt(s.alpha) << (ok ? " ok" : " FAILS") << " (proposed " << fmt(s.mean_proposed)
           << ", Hoeffding " << fmt(s.mean_hoeffding) << ", Bernstein-Serfling " << fmt(s.mean_bernstein_serfling)
           << ", coverage " << fmt(s.coverage) << "); ";
    }
    os << fmt(e2_secs) << " s";
    return {pass, os.str()};
}

Outcome containment() {
    const auto& r = e2();
    long bad = 0;
    for (const auto& row : r.rows) bad += !row.in_envelope;
    return {bad == 0, std::to_string(bad) + " violations in " + std::to_string(r.rows.size()) + " intervals"};
}

Outcome lower_bound() {
    for (const auto& s : e2().summaries) {
        if (s.alpha != 1e-10) continue;
        std::string note = s.lower_bound_degenerate ? " (a_N <= 0, bound degenerate)" : "";
        return {s.lower_bound_ok_fraction >= 0.99,
                "half width " + fmt(s.lower_bound_half) + " below proposed width in " +
                    fmt(100.0 * s.lower_bound_ok_fraction) + "% of trials" + note};
    }
    return {false, "alpha=1e-10 not run"};
}

Outcome as_ordering() {
    auto cfg = defaults_for("E3");
    cfg.beta_params = {{2.0, 5.0}, {5.0, 2.0}};
    const auto r = run_E3_as_ci(cfg, Exec::parallel);
    const double floor = 0.95 - 3.0 * std::sqrt(0.0475 / cfg.trials);
    bool pass = true;
    std::ostringstream os;
    for (const auto& s : r.summaries) {
        const bool ok = s.mean_clt < s.mean_as && s.mean_as < s.mean_bs && s.as_coverage >= floor;
        pass = pass && ok;
        os << "Beta(" << s.a << "," << s.b << ")" << (ok ? " ok" : " FAILS") << " (CLT " << fmt(s.mean_clt)
           << ", AS " << fmt(s.mean_as) << ", Bernstein-Serfling " << fmt(s.mean_bs) << ", AS coverage "
           << fmt(s.as_coverage) << "); ";
    }
    return {pass, os.str()};
}

Outcome cgf_properties() {
    const double beta = 0.5;
    const auto pop = beta_population(2.0, 5.0, 1000, 1);
    const auto m = CgfModel::from_values(pop.values(), beta);
    const double c2 = beta * (1.0 - beta) * m.m2();
    const double h = 1e-4;
    const double d1 = (m.cgf(h) - m.cgf(-h)) / (2.0 * h);
    const double d2 = (m.cgf(h) - 2.0 * m.cgf(0.0) + m.cgf(-h)) / (h * h);
    double worst = 0.0;
    for (int i = 1; i < 200; ++i) {
        const double t = m.legendre_limit() * i / 200.0;
        worst = std::max(worst, std::abs(m.legendre(m.invert_legendre(t, 1e-14)) - t));
    }
    const double rel = std::abs(d2 - c2) / c2;
    return {m.cgf(0.0) == 0.0 && std::abs(d1) <= 1e-8 && rel <= 1e-5 && worst <= 1e-8,
            "Lambda'(0) " + fmt(d1) + ", Lambda'' rel err " + fmt(rel) + ", round-trip residual " + fmt(worst)};
}

Outcome banach_ratio() {
    const auto r = run_E4_banach_ratio(defaults_for("E4"), Exec::parallel);
    bool pass = true;
    double prev = kInf;
    std::ostringstream os;
    for (const auto& [N, mn] : r.min_ratio) {
        pass = pass && mn > 1.0 && mn < prev;
        prev = mn;
        os << "N=" << N << ":" << fmt(mn) << " ";
    }
    double worst = 0.0;
    for (const auto& row : r.rows) {
        pass = pass && row.ratio_sq >= row.bound;
        worst = std::max(worst, std::abs(row.ratio_sq - row.exact_sq) / row.exact_sq);
    }
    pass = pass && worst <= 1e-12;
    os << "min ratios; exact-identity rel err " << fmt(worst);
    return {pass, os.str()};
}

Outcome closed_form_thresholds() {
    long first = -1;
    for (long N = 2; N <= 10000 && first < 0; ++N) {
        const long n = long(std::ceil(0.3 * double(N)));
        if (n >= N) continue;
        if (radius_closed_form({1.0, 1.5, 0.05, 0.3, double(n), N}, ClosedFormConstant::c24).valid) first = N;
    }
    long c3_fail = 0;
    for (long n = 2; n <= 10000; ++n)
        c3_fail += !radius_closed_form({1.0, 1.5, 0.05, 0.3, double(n), long(std::ceil(n / 0.3))},
                                       ClosedFormConstant::c3)
                        .valid;
    return {first == 67 && c3_fail == 0,
            "c24 first valid at N=" + std::to_string(first) + "; c3 invalid for " + std::to_string(c3_fail) +
                " of n in 2..10000"};
}

Outcome coupling_audit() {
    long pairs = 0, bad = 0;
    for (int b = 1; b <= 9; ++b) {
        const double beta = b / 10.0;
        for (long N = 1; N <= 10000; ++N) {
            if ((long(b) * N) % 10 != 0) continue;
            const double exact = coupling_bound(N, beta, CouplingMode::exact);
            bad += exact > coupling_bound(N, beta, CouplingMode::safe);
            ++pairs;
        }
    }
    const double exact = coupling_bound(100, 0.5, CouplingMode::exact);
    const double nominal = coupling_bound(100, 0.5, CouplingMode::paper);
    const bool counter = std::abs(exact - 12.57) < 0.01 && exact > nominal && std::abs(nominal - 5.90) < 0.005;
    return {bad == 0 && counter, std::to_string(bad) + " of " + std::to_string(pairs) +
                                     " pairs exceed the safe bound; N=100, beta=0.5: exact " + fmt(exact) +
                                     " vs 1.18 form " + fmt(nominal)};
}

Outcome mmd_harness() {
    const auto r = run_E5_mmd(defaults_for("E5"), Exec::parallel);
    long bad = 0;
    for (const auto& row : r.rows)
        bad += !(row.mean_dev <= row.eps_opt && row.eps_opt <= row.eps_closed && row.eps_closed <= row.eps_sch);
    const double census = r.rows.back().n == 1000 ? r.rows.back().mean_dev : -1.0;
    return {bad == 0 && census == 0.0, std::to_string(bad) + " of " + std::to_string(r.rows.size()) +
                                           " n values break the ordering; census deviation " + fmt(census)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"duality verification", duality_verification},
        {"strong-duality certificate", strong_duality},
        {"proposed-CI dominance", dominance},
        {"containment invariant", containment},
        {"lower-bound sandwich", lower_bound},
        {"almost-sure CI ordering", as_ordering},
        {"CGF properties", cgf_properties},
        {"Banach ratio curves", banach_ratio},
        {"closed-form validity thresholds", closed_form_thresholds},
        {"coupling-constant audit", coupling_audit},
        {"MMD harness", mmd_harness},
    };
    int passed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        passed += o.pass;
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", passed, criteria.size());
    return passed == int(criteria.size()) ? 0 : 1;
}
