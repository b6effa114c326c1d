#include "irstt/cli.hpp"

#include "irstt/csv.hpp"
#include "irstt/errors.hpp"
#include "irstt/rng.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace irstt {

namespace {

constexpr double kGradTol = 1e-6;

std::string out_path(const RunConfig& cfg, const std::string& name)
{
    return (std::filesystem::path(cfg.out) / name).string();
}

int run_sweep_cmd(const RunConfig& cfg, std::ostream& log)
{
    const SweepResult res = run_sweep(cfg.sweep);
    write_csv(res.records, out_path(cfg, "trials.csv"), cfg.record_wall_time);
    write_aggregate_csv(res.aggregate, cfg.sweep.param, out_path(cfg, "aggregate.csv"));

    Index failures = 0;
    log << std::left << std::setw(14) << cfg.sweep.param << std::setw(8) << "solver" << std::setw(16)
        << "mean_err_abs" << std::setw(16) << "mean_err_rel" << "failed\n";
    for (const auto& a : res.aggregate) {
        log << std::setw(14) << a.value << std::setw(8) << a.solver << std::setw(16) << a.mean_error_abs
            << std::setw(16) << a.mean_error_rel << a.failures << '/' << a.trials << '\n';
        failures += a.failures;
    }
    log << "wrote " << out_path(cfg, "trials.csv") << " and " << out_path(cfg, "aggregate.csv") << '\n';
    return cfg.strict && failures > 0 ? 1 : 0;
}

int run_rip_cmd(const RunConfig& cfg, std::ostream& log)
{
    const SweepSpec& s = cfg.sweep;
    std::ostringstream csv;
    csv << "sweep_param,value,samples,delta_hat,median_dev";
    for (double q : kRipQuantiles) {
        csv << ",q" << std::lround(q * 100);
    }
    csv << '\n';
    for (double v : s.values) {
        const RipReport rep =
            rip_probe(s.config_at(v), s.pilot, cfg.rip_samples, derive_seed(s.master_seed, "rip"), s.policy);
        csv << s.param << ',' << format_real(v) << ',' << rep.samples << ',' << format_real(rep.delta_hat)
            << ',' << format_real(rep.median_dev);
        for (double q : rep.quantiles) {
            csv << ',' << format_real(q);
        }
        csv << '\n';
        log << s.param << '=' << v << "  delta_hat=" << rep.delta_hat << "  median|rho-1|=" << rep.median_dev
            << '\n';
    }
    write_file(out_path(cfg, "rip.csv"), csv.str());
    log << "wrote " << out_path(cfg, "rip.csv") << '\n';
    return 0;
}

int run_gradcheck_cmd(const RunConfig& cfg, std::ostream& log)
{
    const SweepSpec& s = cfg.sweep;
    const auto rows = gradcheck(s.base, trial_seed(s.master_seed, 0));
    std::ostringstream csv;
    csv << "hops,factor,max_rel_error,pass\n";
    bool all = true;
    double worst = 0.0;
    for (const auto& r : rows) {
        const bool pass = r.max_rel_error < kGradTol;
        all = all && pass;
        worst = std::max(worst, r.max_rel_error);
        csv << r.hops << ',' << r.factor << ',' << format_real(r.max_rel_error) << ',' << (pass ? 1 : 0)
            << '\n';
        log << "D=" << r.hops << " B_" << r.factor << "  max rel error " << r.max_rel_error
            << (pass ? "  PASS" : "  FAIL") << '\n';
    }
    write_file(out_path(cfg, "gradcheck.csv"), csv.str());
    log << "max relative gradient error " << worst << '\n';
    return all ? 0 : 1;
}

int run_demo_cmd(const RunConfig& cfg, std::ostream& log)
{
    const SweepSpec& s = cfg.sweep;
    const double v = s.values.front();
    const SystemConfig config = s.config_at(v);
    const std::uint64_t seed = trial_seed(s.master_seed, 0);
    std::ostringstream trace;
    trace << "solver,iteration,loss\n";
    std::vector<TrialRecord> records;
    bool failed = false;
    for (const auto& solver : s.solvers) {
        TrialRecord r = run_trial(config, solver, s.pilot, s.policy, s.settings, seed);
        r.sweep_param = s.param;
        r.value = v;
        for (std::size_t i = 0; i < r.loss_trace.size(); ++i) {
            trace << solver << ',' << i << ',' << format_real(r.loss_trace[i]) << '\n';
        }
        log << solver << ": status " << r.status << ", iterations " << r.iterations << ", error_abs "
            << r.error_abs << ", error_rel " << r.error_rel << ", best-iterate error_abs " << r.best_error_abs
            << '\n';
        failed = failed || !r.ok();
        records.push_back(std::move(r));
    }
    write_csv(records, out_path(cfg, "demo.csv"), cfg.record_wall_time);
    write_file(out_path(cfg, "demo_trace.csv"), trace.str());
    log << "wrote " << out_path(cfg, "demo.csv") << " and " << out_path(cfg, "demo_trace.csv") << '\n';
    return cfg.strict && failed ? 1 : 0;
}

} // namespace

int execute(const std::string& command, const RunConfig& cfg, std::ostream& log)
{
    if (command == "sweep") {
        return run_sweep_cmd(cfg, log);
    }
    if (command == "rip") {
        return run_rip_cmd(cfg, log);
    }
    if (command == "gradcheck") {
        return run_gradcheck_cmd(cfg, log);
    }
    if (command == "demo") {
        return run_demo_cmd(cfg, log);
    }
    throw ConfigError("unknown command '" + command + "'");
}

int cli_main(int argc, char** argv)
{
    CLI::App app{"IRS-assisted MIMO channel estimation experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long long> trials;
    std::string out;
    bool strict = false;
    std::vector<std::string> sets;
    app.add_option("--config", config_path, "flat key=value config file");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out, "output directory");
    app.add_option("--trials", trials, "Monte Carlo trials per point");
    app.add_flag("--strict", strict, "nonzero exit on any failed trial");
    app.add_option("--set", sets, "KEY=VALUE override (repeatable)")->allow_extra_args(false);

    for (const auto* name : {"sweep", "rip", "gradcheck", "demo"}) {
        app.add_subcommand(name)->fallthrough();
    }
    app.get_subcommand("sweep")->description("Monte Carlo sweep; writes trials.csv and aggregate.csv");
    app.get_subcommand("rip")->description("empirical RIP probe; writes rip.csv");
    app.get_subcommand("gradcheck")->description("finite-difference check of the Wirtinger gradients");
    app.get_subcommand("demo")->description("single trial per solver with its loss trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        std::vector<KeyValue> overrides;
        for (const auto& s : sets) {
            overrides.push_back(split_assignment(s));
        }
        if (seed) {
            overrides.emplace_back("seed", std::to_string(*seed));
        }
        if (trials) {
            overrides.emplace_back("trials", std::to_string(*trials));
        }
        if (strict) {
            overrides.emplace_back("strict", "1");
        }
        RunConfig cfg = config_path.empty() ? parse_config("", overrides) : load_config(config_path, overrides);
        // Precedence for the output directory: --out, then IRSTT_OUT_DIR, then the config.
        if (!out.empty()) {
            cfg.out = out;
        } else if (const char* env = std::getenv("IRSTT_OUT_DIR"); env != nullptr && *env != '\0') {
            cfg.out = env;
        }
        return execute(app.get_subcommands().front()->get_name(), cfg, std::cout);
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace irstt
