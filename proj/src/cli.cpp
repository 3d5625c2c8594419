#include "worci/cli.hpp"

#include "worci/baselines.hpp"
#include "worci/ci_as.hpp"
#include "worci/ci_banach.hpp"
#include "worci/ci_finite.hpp"
#include "worci/dualsolve.hpp"
#include "worci/ratefn.hpp"
#include "worci/rng.hpp"
#include "worci/simharness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <variant>

#ifndef WORCI_BUILD_TYPE
#define WORCI_BUILD_TYPE "unknown"
#endif
#ifndef WORCI_GIT_REVISION
#define WORCI_GIT_REVISION "unknown"
#endif

namespace worci::cli {

namespace {

// Ordered key/value output, printed either as aligned text or as one JSON object.
class Record {
public:
    using Value = std::variant<double, long, bool, std::string>;

    Record& add(std::string key, Value v) {
        fields_.emplace_back(std::move(key), std::move(v));
        return *this;
    }

    void print(std::ostream& os, bool json) const {
        if (json) {
            os << '{';
            for (std::size_t i = 0; i < fields_.size(); ++i) {
                if (i) os << ',';
                os << nlohmann::json(fields_[i].first).dump() << ':' << json_value(fields_[i].second);
            }
            os << "}\n";
            return;
        }
        std::size_t w = 0;
        for (const auto& f : fields_) w = std::max(w, f.first.size());
        for (const auto& [k, v] : fields_)
            os << k << std::string(w - k.size() + 2, ' ') << text_value(v) << '\n';
    }

private:
    static std::string text_value(const Value& v) {
        if (auto d = std::get_if<double>(&v)) return format_number(*d);
        if (auto l = std::get_if<long>(&v)) return std::to_string(*l);
        if (auto b = std::get_if<bool>(&v)) return *b ? "true" : "false";
        return std::get<std::string>(v);
    }
    static std::string json_value(const Value& v) {
        if (auto d = std::get_if<double>(&v))
            return std::isfinite(*d) ? format_number(*d) : nlohmann::json(format_number(*d)).dump();
        if (std::holds_alternative<std::string>(v)) return nlohmann::json(std::get<std::string>(v)).dump();
        return text_value(v);
    }

    std::vector<std::pair<std::string, Value>> fields_;
};

DataFormat format_of(const std::string& path, const std::string& flag) {
    if (!flag.empty()) return parse_format(flag);
    return std::filesystem::path(path).extension() == ".json" ? DataFormat::json : DataFormat::csv;
}

// "s:w,s:w,..." inline, or a two-column CSV file (point, weight).
DiscreteDistribution read_distribution(const std::string& spec) {
    std::vector<double> a, w;
    if (std::filesystem::exists(spec)) {
        for (const auto& row : load_vectors_csv(spec)) {
            if (row.size() != 2) throw IngestionError("distribution rows need two columns: point,weight");
            a.push_back(row[0]);
            w.push_back(row[1]);
        }
    } else {
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw InvalidArgument("distribution '" + spec + "' is neither a file nor a list of point:weight");
            try {
                a.push_back(std::stod(item.substr(0, colon)));
                w.push_back(std::stod(item.substr(colon + 1)));
            } catch (const std::logic_error&) {
                throw InvalidArgument("cannot parse distribution entry '" + item + "'");
            }
        }
    }
    return DiscreteDistribution(std::move(a), std::move(w));
}

std::vector<double> load_unit_values(const std::string& path, const std::string& format) {
    auto v = load_values(path, format_of(path, format));
    for (std::size_t i = 0; i < v.size(); ++i)
        if (v[i] < 0.0 || v[i] > 1.0)
            throw IngestionError("value " + format_number(v[i]) + " at row " + std::to_string(i + 1) +
                                     " is outside [0,1]",
                                 long(i + 1));
    return v;
}

std::uint64_t seed_or_env(std::uint64_t seed) {
    ExperimentConfig tmp;
    tmp.seed = seed;
    apply_env_overrides(tmp);
    return tmp.seed;
}

}  // namespace

std::string version_string() {
    std::ostringstream os;
    os << "worci " << kVersion << " (" << WORCI_BUILD_TYPE << ", ";
#if defined(__clang__)
    os << "clang " << __clang_major__ << '.' << __clang_minor__;
#elif defined(__GNUC__)
    os << "gcc " << __GNUC__ << '.' << __GNUC_MINOR__;
#endif
    os << ", rev " << WORCI_GIT_REVISION;
#ifdef _OPENMP
    os << ", openmp " << _OPENMP;
#endif
    os << ')';
    return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Confidence intervals for the mean of a finite population sampled without replacement", "worci"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);
    app.fallthrough();
    bool json = false;
    app.add_flag("--json", json, "Machine-readable output");

    std::string sample_path, alphabet_path, format, config_path, output_path, method, data_path;
    std::string constant = "paper", kernel_name = "matern32", closed = "c3", side_name = "plus";
    std::string p_spec, q_spec;
    long N = 0, n = 0;
    double alpha = 0.05, tol = 1e-8, sigma = -1.0, slack = 1.1, d = 1.0, D = 1.0;
    double beta = 0.5, m = 0.5, frac = 0.1, lengthscale = 1.0;
    bool optimize = false, serial = false;
    std::uint64_t seed = 20240917;

    auto* ci = app.add_subcommand("ci", "Confidence intervals")->require_subcommand(1);

    auto* finite = ci->add_subcommand("finite", "Rate-function CI on a finite alphabet");
    finite->add_option("--sample", sample_path, "Sample values")->required();
    finite->add_option("--alphabet", alphabet_path, "Alphabet values")->required();
    finite->add_option("--N", N, "Population size")->required();
    finite->add_option("--alpha", alpha, "Miscoverage level")->required();
    finite->add_option("--tol", tol, "Inverse-rate tolerance");
    finite->add_option("--format", format, "csv or json (default: by extension)");

    auto* as = ci->add_subcommand("as", "Almost-sure CI on [0,1]");
    as->add_option("--sample", sample_path)->required();
    as->add_option("--N", N)->required();
    as->add_option("--alpha", alpha)->required();
    as->add_option("--constant", constant, "paper, safe or exact");
    as->add_option("--slack-exponent", slack);
    as->add_option("--format", format);

    auto* banach = ci->add_subcommand("banach", "Radius for a (2,D)-smooth Banach space");
    banach->add_option("--N", N)->required();
    banach->add_option("--n", n)->required();
    banach->add_option("--alpha", alpha)->required();
    banach->add_option("--d", d, "Norm bound");
    banach->add_option("--D", D, "Smoothness constant");
    banach->add_option("--constant", closed, "Closed-form constant: c3 or c24");
    banach->add_flag("--optimize", optimize, "Also minimise over lambda");

    auto* baseline = ci->add_subcommand("baseline", "Classical intervals");
    baseline->add_option("--method", method, "hoeffding, hoeffding_serfling, hoeffding_serfling_improved, bernstein_serfling or clt")->required();
    baseline->add_option("--sample", sample_path)->required();
    baseline->add_option("--N", N)->required();
    baseline->add_option("--alpha", alpha)->required();
    baseline->add_option("--sigma", sigma, "Population standard deviation (bernstein-serfling)");
    baseline->add_option("--format", format);

    auto* ratefn = app.add_subcommand("ratefn", "Rate function utilities")->require_subcommand(1);
    auto* eval = ratefn->add_subcommand("eval", "I(P, beta, Q)");
    eval->add_option("--p", p_spec, "point:weight list or CSV file")->required();
    eval->add_option("--q", q_spec, "point:weight list or CSV file")->required();
    eval->add_option("--beta", beta)->required();
    auto* dual = ratefn->add_subcommand("dual", "J+ or J- through the dual");
    dual->add_option("--p", p_spec, "point:weight list or CSV file")->required();
    dual->add_option("--beta", beta)->required();
    dual->add_option("--m", m)->required();
    dual->add_option("--side", side_name, "plus or minus");
    dual->add_option("--tol", tol);

    auto* mmd = app.add_subcommand("mmd", "Kernel mean embedding deviation for one WoR sample");
    mmd->add_option("--data", data_path, "One feature vector per row")->required();
    mmd->add_option("--sample-frac", frac)->required();
    mmd->add_option("--kernel", kernel_name, "matern32 or rbf");
    mmd->add_option("--lengthscale", lengthscale);
    mmd->add_option("--alpha", alpha);
    mmd->add_option("--seed", seed);

    auto* simulate = app.add_subcommand("simulate", "Run an experiment from a config file");
    simulate->add_option("--config", config_path)->required();
    simulate->add_option("--output", output_path, "CSV path (overrides the config; '-' for stdout)");
    simulate->add_flag("--serial", serial, "Use the serial reference path");

    std::vector<const char*> argv{"worci"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return kUsage;
    }

    Record rec;
    try {
        if (*finite) {
            const auto sample = load_unit_values(sample_path, format);
            const auto alphabet = load_unit_values(alphabet_path, format);
            const SamplingDesign design(N, long(sample.size()));
            const auto r = ci_proposed(sample, alphabet, design, alpha, tol);
            rec.add("n", long(sample.size())).add("N", N).add("alpha", alpha)
                .add("sample_mean", r.sample_mean).add("b_minus", r.interval.lo).add("b_plus", r.interval.hi)
                .add("width", r.interval.width()).add("level", r.level).add("c_N", r.budget.c_N)
                .add("envelope_lo", r.envelope.lo).add("envelope_hi", r.envelope.hi);
        } else if (*as) {
            const auto sample = load_unit_values(sample_path, format);
            const auto r = ci_as_empirical(sample, N, alpha, parse_coupling_mode(constant), slack);
            rec.add("n", long(sample.size())).add("N", N).add("alpha", alpha)
                .add("sample_mean", r.sample_mean).add("lo", r.interval.lo).add("hi", r.interval.hi)
                .add("epsilon", r.epsilon).add("t", r.t).add("saturated", r.saturated);
        } else if (*banach) {
            const auto p = BanachParams::from_design(SamplingDesign(N, n), d, D, alpha);
            const auto c = radius_closed_form(p, parse_closed_form(closed));
            rec.add("N", N).add("n", n).add("alpha", alpha).add("ell_n", ell_n(p))
                .add("epsilon_closed", c.epsilon).add("closed_valid", c.valid)
                .add("closed_required_n", c.required_n).add("epsilon_schneider", radius_schneider(p));
            if (optimize) {
                const auto o = radius_optimized(p);
                rec.add("epsilon_optimized", o.epsilon).add("lambda", o.lambda);
            }
        } else if (*baseline) {
            const auto sample = load_unit_values(sample_path, format);
            const auto mth = parse_baseline(method);
            const double h = baseline_half_width(mth, sample, N, alpha, sigma);
            const double mu = summary(sample).mu;
            const auto iv = clipped(mu, h);
            rec.add("method", std::string(to_string(mth))).add("n", long(sample.size())).add("N", N)
                .add("alpha", alpha).add("sample_mean", mu).add("half_width", h)
                .add("lo", iv.lo).add("hi", iv.hi);
        } else if (*eval) {
            const auto P = read_distribution(p_spec);
            const auto Q = read_distribution(q_spec);
            const double v = rate_I(P, beta, Q).value;
            rec.add("I", v).add("feasible", std::isfinite(v));
        } else if (*dual) {
            const auto P = read_distribution(p_spec);
            const auto s = j_dual(P, beta, m, parse_side(side_name), tol);
            rec.add("side", side_name).add("value", s.value).add("lambda", s.point.lambda)
                .add("rho", s.point.rho).add("gap", s.gap_certificate)
                .add("outer_iterations", long(s.outer_iterations))
                .add("inner_iterations", long(s.inner_iterations));
        } else if (*mmd) {
            const auto data = load_vectors_csv(data_path);
            const long NN = long(data.size());
            const long nn = std::lround(frac * double(NN));
            const SamplingDesign design(NN, nn);
            const std::uint64_t s = seed_or_env(seed);
            const auto idx = sample_indices_wor(std::size_t(NN), std::size_t(nn), s);
            const Kernel k{parse_kernel(kernel_name), lengthscale};
            const double dev = mmd_deviation(data, idx, k);
            const auto p = BanachParams::from_design(design, 1.0, 1.0, alpha);
            rec.add("N", NN).add("n", nn).add("seed", long(s)).add("deviation", dev)
                .add("epsilon_optimized", radius_optimized(p).epsilon)
                .add("epsilon_closed", radius_closed_form(p, ClosedFormConstant::c3).epsilon)
                .add("epsilon_schneider", radius_schneider(p));
        } else if (*simulate) {
            auto cfg = load_config(config_path);
            apply_env_overrides(cfg);
            if (!output_path.empty()) cfg.output = output_path;
            const auto [csv, line] = run_experiment(cfg, serial ? Exec::serial : Exec::parallel);
            if (cfg.output.empty() || cfg.output == "-") {
                out << csv;
            } else {
                std::ofstream f(cfg.output, std::ios::binary);
                if (!(f << csv)) throw IngestionError("cannot write " + cfg.output);
            }
            rec.add("experiment", cfg.experiment).add("seed", long(cfg.seed))
                .add("output", cfg.output.empty() ? std::string("-") : cfg.output).add("summary", line);
        }
    } catch (const IngestionError& e) {
        err << "data error: " << e.what() << '\n';
        return kData;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const CertificateError& e) {
        err << "solver error: " << e.what() << '\n';
        return kSolver;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    rec.print(out, json);
    return kOk;
}

}  // namespace worci::cli
