#include <doctest.h>

#include "worci/simharness.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

using namespace worci;

namespace {

std::vector<std::string> lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    std::string l;
    while (std::getline(in, l)) out.push_back(l);
    return out;
}

std::size_t columns(const std::string& line) { return std::size_t(std::count(line.begin(), line.end(), ',')) + 1; }

std::string run_csv(const ExperimentConfig& cfg, Exec exec) { return run_experiment(cfg, exec).first; }

ExperimentConfig small(const std::string& e) {
    auto cfg = defaults_for(e);
    if (e == "E1")
        cfg.grid_points = 11;
    else
        cfg.trials = 6;
    if (e == "E4") {
        cfg.beta_grid = 19;
        cfg.N_grid = {200, 2000};
    }
    if (e == "E5") {
        cfg.N = 120;
        cfg.n_step = 40;
    }
    if (e == "E6") {
        cfg.N = 400;
        cfg.n = 200;
    }
    return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(
        "# comment line\n"
        "experiment = E3\n"
        "trials = 17   # trailing comment\n"
        "alpha = 0.1, 0.01\n"
        "beta_params = 2:5, 5:2\n"
        "constant = safe\n"
        "seed = 42\n");
    CHECK(cfg.experiment == "E3");
    CHECK(cfg.trials == 17);
    CHECK(cfg.alphas == std::vector<double>{0.1, 0.01});
    REQUIRE(cfg.beta_params.size() == 2);
    CHECK(cfg.beta_params[1].first == 5.0);
    CHECK(cfg.constant == CouplingMode::safe);
    CHECK(cfg.seed == 42u);
    CHECK(cfg.n == 500);
    CHECK_THROWS_AS(parse_config("bogus = 1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("trials = many\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("trials = 2.5\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("just words\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_config("experiment = E9\n"), InvalidArgument);
    CHECK_THROWS_AS(load_config("/nonexistent/e.cfg"), IngestionError);
}

TEST_CASE("seed override from the environment") {
    auto cfg = defaults_for("E2");
    ::setenv("WOR_CI_SEED", "123", 1);
    apply_env_overrides(cfg);
    CHECK(cfg.seed == 123u);
    ::setenv("WOR_CI_SEED", "12x", 1);
    CHECK_THROWS_AS(apply_env_overrides(cfg), InvalidArgument);
    ::unsetenv("WOR_CI_SEED");
    apply_env_overrides(cfg);
    CHECK(cfg.seed == 123u);
}

TEST_CASE("population generators") {
    const auto pop = finite_alphabet_population(10, 2, 1.0, 1000, 5);
    CHECK(pop.size() == 1000);
    std::set<double> distinct(pop.values().begin(), pop.values().end());
    CHECK(distinct.size() <= 2);
    const auto a = midpoint_alphabet(10);
    for (double v : distinct) CHECK(std::find(a.begin(), a.end(), v) != a.end());
    CHECK_THROWS_AS(finite_alphabet_population(4, 5, 1.0, 100, 1), InvalidArgument);

    const auto b = beta_population(2.0, 5.0, 5000, 6);
    const auto s = summary(b);
    CHECK(s.mu == doctest::Approx(2.0 / 7.0).epsilon(1e-3));
    CHECK(s.sigma2 == doctest::Approx(10.0 / (49.0 * 8.0)).epsilon(1e-2));
    CHECK(beta_population(2.0, 5.0, 100, 6).values()[0] == beta_population(2.0, 5.0, 100, 6).values()[0]);

    const auto v = mixture_vectors(50, 3, 2, 7);
    CHECK(v.size() == 50);
    CHECK(v[7].size() == 3);
}

TEST_CASE("csv schema per experiment") {
    const std::map<std::string, std::string> headers{
        {"E1", "distribution,m,J_primal,J_dual,abs_gap"},
        {"E2", "alpha,trial,sample_mean,lo,hi,proposed,hoeffding,bernstein_serfling,hoeffding_serfling_improved,lower_bound_half,covered,baselines_covered,in_envelope"},
        {"E3", "a,b,trial,as_width,oracle_width,clt_width,bernstein_serfling_width,as_covered,clt_covered,bernstein_serfling_covered"},
        {"E4", "N,beta,ratio,ratio_sq,lower_bound_sq,exact_sq"},
        {"E5", "n,mean_dev,max_dev,eps_sch,eps_closed,eps_opt,closed_valid,coverage"},
        {"E6", "metric,value"},
    };
    for (const auto& [e, header] : headers) {
        CAPTURE(e);
        const auto cfg = small(e);
        const auto [csv, summary_line] = run_experiment(cfg, Exec::serial);
        const auto ls = lines(csv);
        REQUIRE(ls.size() > 2);
        CHECK(ls[0] == csv_preamble(e, cfg.seed).substr(0, csv_preamble(e, cfg.seed).size() - 1));
        CHECK(ls[1] == header);
        for (std::size_t i = 2; i < ls.size(); ++i) CHECK(columns(ls[i]) == columns(header));
        CHECK(summary_line.rfind(e, 0) == 0);
    }
}

TEST_CASE("serial and parallel runs are byte identical") {
    const int saved = omp_get_max_threads();
    omp_set_num_threads(4);
    for (const char* e : {"E1", "E2", "E3", "E4", "E5", "E6"}) {
        CAPTURE(e);
        const auto cfg = small(e);
        CHECK(run_csv(cfg, Exec::serial) == run_csv(cfg, Exec::parallel));
    }
    omp_set_num_threads(saved);
}

TEST_CASE("seeds control the output") {
    auto cfg = small("E3");
    const auto a = run_csv(cfg, Exec::parallel);
    CHECK(a == run_csv(cfg, Exec::parallel));
    cfg.seed += 1;
    CHECK(a != run_csv(cfg, Exec::parallel));
}

TEST_CASE("experiment results") {
    const auto e1 = run_E1_dual_vs_primal(small("E1"), Exec::parallel);
    CHECK(e1.rows.size() == 2 * 11);
    CHECK(e1.max_gap <= 1e-3);
    CHECK(e1.max_at_mean == doctest::Approx(0.0).epsilon(1e-12));

    const auto e4 = run_E4_banach_ratio(small("E4"), Exec::parallel);
    CHECK(e4.rows.size() == 2 * 19);
    REQUIRE(e4.min_ratio.size() == 2);
    CHECK(e4.min_ratio[0].second > e4.min_ratio[1].second);
    CHECK(e4.min_ratio[1].second > 1.0);

    const auto e6 = run_E6_sandwich(small("E6"));
    CHECK(e6.report.trials == 6);
    CHECK(e6.mc_sigma > 0.0);

    auto bad = defaults_for("E1");
    bad.k = 6;
    CHECK_THROWS_AS(run_E1_dual_vs_primal(bad, Exec::serial), Unsupported);
}
