#pragma once

#include "worci/ci_as.hpp"
#include "worci/ci_banach.hpp"
#include "worci/ci_finite.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace worci {

inline constexpr const char* kVersion = "0.4.0";

/// Flat key=value experiment description. Unset fields keep the defaults of
/// the chosen experiment (see defaults_for).
struct ExperimentConfig {
    std::string experiment = "E2";
    std::uint64_t seed = 20240917;
    int trials = 200;
    long N = 1000;
    long n = 350;
    std::vector<double> alphas{1e-5, 1e-10};

    // finite-alphabet populations
    int k = 10;
    double concentration = 1.0;
    int support = 2;  ///< consecutive alphabet points carrying mass

    // Beta populations (E3)
    std::vector<std::pair<double, double>> beta_params{{2.0, 5.0}, {5.0, 2.0}};
    CouplingMode constant = CouplingMode::paper;
    double slack_exponent = 1.1;

    // Banach / kernel experiments (E4, E5)
    std::vector<long> N_grid{200, 1000, 2000, 10000, 20000};
    int beta_grid = 999;
    int dim = 8;
    int components = 4;
    double lengthscale = 4.0;
    long n_step = 20;

    // E1
    int grid_points = 201;
    double beta = 0.35;

    double tol = 1e-8;
    std::string output;
};

ExperimentConfig defaults_for(const std::string& experiment);

/// Parses key=value lines ('#' starts a comment). Keys not listed in the
/// README are rejected. The experiment key, if present, selects the defaults
/// that the remaining keys override.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// WOR_CI_SEED, when set, replaces the configured master seed.
void apply_env_overrides(ExperimentConfig& cfg);

std::string csv_preamble(const std::string& experiment, std::uint64_t seed);

/// Finite population on the alphabet (i + 0.5)/k: `support` consecutive
/// points starting at a random offset, Dirichlet(concentration) weights
/// turned into counts by largest-remainder rounding.
Population finite_alphabet_population(int k, int support, double concentration, long N,
                                      std::uint64_t seed);
std::vector<double> midpoint_alphabet(int k);

/// Jittered stratified inverse-CDF draw of N values from Beta(a, b).
Population beta_population(double a, double b, long N, std::uint64_t seed);

/// Gaussian-mixture feature vectors.
std::vector<std::vector<double>> mixture_vectors(long N, int dim, int components, std::uint64_t seed);

struct E1Row {
    int distribution = 0;
    double m = 0.0;
    double j_primal = 0.0;
    double j_dual = 0.0;
};
struct E1Result {
    std::vector<E1Row> rows;
    double max_gap = 0.0;
    double max_at_mean = 0.0;  ///< largest J at the distribution mean over both curves
    std::string csv() const;
};
E1Result run_E1_dual_vs_primal(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

struct E2Row {
    double alpha = 0.0;
    int trial = 0;
    double sample_mean = 0.0;
    double lo = 0.0, hi = 0.0;
    double proposed = 0.0;  ///< full widths from here on
    double hoeffding = 0.0;
    double bernstein_serfling = 0.0;
    double hoeffding_serfling_improved = 0.0;
    double lower_bound_half = 0.0;
    bool covered = false;
    bool baseline_covered = false;  ///< every baseline interval covers
    bool in_envelope = false;
};
struct E2Summary {
    double alpha = 0.0;
    double mean_proposed = 0.0, mean_hoeffding = 0.0, mean_bernstein_serfling = 0.0,
           mean_hoeffding_serfling_improved = 0.0;
    double coverage = 0.0;
    int envelope_violations = 0;
    double lower_bound_half = 0.0;
    bool lower_bound_degenerate = false;
    double lower_bound_ok_fraction = 0.0;
};
struct E2Result {
    double mu = 0.0, sigma = 0.0;
    std::vector<E2Row> rows;
    std::vector<E2Summary> summaries;
    std::string csv() const;
};
E2Result run_E2_finite_widths(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

struct E3Row {
    double a = 0.0, b = 0.0;
    int trial = 0;
    double as_width = 0.0, clt_width = 0.0, bs_width = 0.0;
    double oracle_width = 0.0;
    bool as_covered = false, clt_covered = false, bs_covered = false;
};
struct E3Summary {
    double a = 0.0, b = 0.0;
    double mean_as = 0.0, mean_clt = 0.0, mean_bs = 0.0, mean_oracle = 0.0;
    double as_coverage = 0.0, clt_coverage = 0.0, bs_coverage = 0.0;
    double empirical_ge_oracle = 0.0;
};
struct E3Result {
    std::vector<E3Row> rows;
    std::vector<E3Summary> summaries;
    std::string csv() const;
};
E3Result run_E3_as_ci(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

struct E4Row {
    long N = 0;
    double beta = 0.0;
    double ratio = 0.0;
    double ratio_sq = 0.0;
    double bound = 0.0;        ///< 8 ln(2/alpha) / (3 ell_n)
    double exact_sq = 0.0;     ///< bound times ((1-beta) + 1/N)/(1-beta)
};
struct E4Result {
    std::vector<E4Row> rows;
    std::vector<std::pair<long, double>> min_ratio;
    std::string csv() const;
};
E4Result run_E4_banach_ratio(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

struct E5Row {
    long n = 0;
    double mean_dev = 0.0;
    double max_dev = 0.0;
    double eps_sch = 0.0, eps_closed = 0.0, eps_opt = 0.0;
    bool closed_valid = true;
    double coverage = 0.0;  ///< fraction of trials with deviation <= eps_opt
};
struct E5Result {
    std::vector<E5Row> rows;
    std::string csv() const;
};
E5Result run_E5_mmd(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

struct E6Result {
    SandwichReport report;
    double mc_sigma = 0.0;
    std::string csv() const;
};
E6Result run_E6_sandwich(const ExperimentConfig& cfg);

/// Runs cfg.experiment, returning the CSV text and a one-line summary.
std::pair<std::string, std::string> run_experiment(const ExperimentConfig& cfg, Exec exec = Exec::parallel);

}  // namespace worci
