#include "irstt/analysis.hpp"

#include "irstt/errors.hpp"
#include "irstt/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>

namespace irstt {

RecoveryError recovery_error(const CTensor3& b_hat, const CTensor3& b_star)
{
    if (b_hat.dims() != b_star.dims()) {
        throw DimensionMismatch("recovery_error: estimate and truth differ in shape");
    }
    const double ref = b_star.frobenius_norm();
    if (ref == 0.0) {
        throw DivisionByZero("recovery_error: ||B*||_F is zero");
    }
    double acc = 0.0;
    const auto a = b_hat.data();
    const auto b = b_star.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::norm(a[i] - b[i]);
    }
    const double err = std::sqrt(acc);
    return {err, err / ref};
}

namespace {

// Linear interpolation between order statistics.
double quantile_sorted(const std::vector<double>& v, double q)
{
    if (v.empty()) {
        return 0.0;
    }
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<PhaseTensor> phases_from(const SystemConfig& c, std::uint64_t seed, PhasePolicy policy)
{
    const PhaseSchedule sched = gen_phase_schedule(c, seed, policy);
    std::vector<PhaseTensor> out;
    for (Index d = 1; d <= c.D; ++d) {
        out.push_back(build_phase_tensor(sched, d));
    }
    return out;
}

Index to_dim(double v, const std::string& name)
{
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
        throw ConfigError(name + " values must be positive integers");
    }
    return static_cast<Index>(v);
}

} // namespace

RipReport rip_probe(const SystemConfig& config, PilotKind kind, Index samples, std::uint64_t seed,
                    PhasePolicy policy)
{
    if (samples < 1) {
        throw ConfigError("rip_probe: samples must be >= 1");
    }
    config.validate();
    const PilotMatrix x = gen_pilots(config, kind, derive_seed(seed, "rip-pilots"));
    const double t = static_cast<double>(config.T);
    // ||B_k X||^2 = tr(B_k (X X^H) B_k^H), so only the Gram matrix is needed.
    const CMatrix gram = x.X * x.X.adjoint();

    RipReport rep;
    rep.samples = samples;
    rep.ratios.reserve(static_cast<std::size_t>(samples));
    std::vector<double> dev;
    for (Index i = 0; i < samples; ++i) {
        const auto u = static_cast<std::uint64_t>(i);
        TTChannel tt{gen_channels(config, derive_seed(seed, "rip-channels", {u})),
                     phases_from(config, derive_seed(seed, "rip-phases", {u}), policy), config};
        double num = 0.0;
        double den = 0.0;
        for (Index k = 0; k < config.K; ++k) {
            const CMatrix bk = cascade_block(tt.channels.factors, tt.phases, k);
            num += (bk * gram * bk.adjoint()).trace().real();
            den += bk.squaredNorm();
        }
        const double rho = num / (t * den);
        rep.ratios.push_back(rho);
        dev.push_back(std::abs(rho - 1.0));
    }
    std::sort(dev.begin(), dev.end());
    rep.delta_hat = dev.back();
    rep.median_dev = quantile_sorted(dev, 0.5);
    for (double q : kRipQuantiles) {
        rep.quantiles.push_back(quantile_sorted(dev, q));
    }
    return rep;
}

SolverOptions SolverSettings::options_for(const std::string& solver, Index hops) const
{
    SolverOptions o;
    o.stop_tol = stop_tol;
    o.pinv_tol = pinv_tol;
    o.rank_limits = rank_limits;
    if (solver == "als") {
        o.max_iters = als_iters;
    } else if (solver == "agd") {
        o.max_iters = agd_iters;
        if (hops < 1 || hops > static_cast<Index>(agd_steps.size())) {
            throw ConfigError("agd_step has no entry for D = " + std::to_string(hops));
        }
        o.step_size = agd_steps[static_cast<std::size_t>(hops - 1)];
    } else if (solver != "ttsvd") {
        throw ConfigError("unknown solver '" + solver + "'");
    }
    return o;
}

ScenarioSeeds ScenarioSeeds::from_trial(std::uint64_t s)
{
    return {derive_seed(s, "channels"), derive_seed(s, "phases"), derive_seed(s, "pilots"),
            derive_seed(s, "noise"), derive_seed(s, "init")};
}

TrialRecord run_trial(const SystemConfig& config, const std::string& solver, PilotKind pilot,
                      PhasePolicy policy, const SolverSettings& settings, std::uint64_t seed)
{
    TrialRecord rec;
    rec.solver = solver;
    rec.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        config.validate();
        const ScenarioSeeds seeds = ScenarioSeeds::from_trial(seed);
        const TTChannel truth{gen_channels(config, seeds.channels),
                              phases_from(config, seeds.phases, policy), config};
        const CTensor3 b_star = build_ground_truth(truth);
        const PilotMatrix x = gen_pilots(config, pilot, seeds.pilots);
        const CTensor3 y = measure(b_star, x, config.noise_var, seeds.noise);

        if (solver == "ttsvd") {
            if (config.D != 1) {
                throw ConfigError("ttsvd baseline is single-hop only");
            }
            // TT ranks of Z cannot exceed the unfolding sizes, so clamping N there loses nothing.
            const Index n = config.irs_sizes.front();
            const Index r1 = std::min({n, config.lp(), config.K * config.um()});
            const Index r2 = std::min({n, config.lp() * config.K, config.um()});
            const CTensor3 b_hat = ttsvd_baseline(y, x, r1, r2, settings.pinv_tol);
            const RecoveryError e = recovery_error(b_hat, b_star);
            rec.error_abs = rec.best_error_abs = e.abs;
            rec.error_rel = e.rel;
        } else {
            SolverOptions opts = settings.options_for(solver, config.D);
            opts.init_seed = seeds.init;
            const TTChannel init{random_init(config, seeds.init), truth.phases, config};
            EstimateResult res;
            if (solver == "als") {
                if (config.D != 1) {
                    throw ConfigError("als is single-hop only");
                }
                res = als_single(init, x, y, opts);
            } else {
                res = config.D == 1 ? agd_single(init, x, y, opts) : agd_multi(init, x, y, opts);
            }
            const RecoveryError e = recovery_error(build_ground_truth(res.estimate), b_star);
            rec.error_abs = e.abs;
            rec.error_rel = e.rel;
            rec.best_error_abs = recovery_error(build_ground_truth(res.best_estimate), b_star).abs;
            rec.iterations = res.iterations_run;
            rec.loss_trace = std::move(res.loss_trace);
        }
    } catch (const Error& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.error_abs = rec.error_rel = rec.best_error_abs = nan;
        if (dynamic_cast<const Diverged*>(&e)) {
            rec.status = "diverged";
        } else if (dynamic_cast<const ConfigError*>(&e)) {
            rec.status = "config-error";
        } else if (dynamic_cast<const NumericalFailure*>(&e)) {
            rec.status = "numerical-failure";
        } else {
            rec.status = "error";
        }
    }
    rec.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

void SweepSpec::validate() const
{
    static const std::vector<std::string> params{"T", "UM", "LP", "N", "K", "noise_var", "D"};
    if (std::find(params.begin(), params.end(), param) == params.end()) {
        throw ConfigError("unknown sweep parameter '" + param + "'");
    }
    if (values.empty()) {
        throw ConfigError("sweep values must be nonempty");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw ConfigError("sweep values must be strictly increasing");
        }
    }
    if (trials < 1) {
        throw ConfigError("trials must be >= 1");
    }
    if (solvers.empty()) {
        throw ConfigError("at least one solver is required");
    }
    for (const auto& s : solvers) {
        if (std::find(kSolvers.begin(), kSolvers.end(), s) == kSolvers.end()) {
            throw ConfigError("unknown solver '" + s + "'");
        }
    }
    for (double v : values) {
        config_at(v).validate();
    }
}

SystemConfig SweepSpec::config_at(double v) const
{
    SystemConfig c = base;
    if (param == "T") {
        c.T = to_dim(v, param);
    } else if (param == "UM") {
        c.U = 1;
        c.M = to_dim(v, param);
    } else if (param == "LP") {
        c.P = 1;
        c.L = to_dim(v, param);
    } else if (param == "N") {
        std::fill(c.irs_sizes.begin(), c.irs_sizes.end(), to_dim(v, param));
    } else if (param == "K") {
        c.K = to_dim(v, param);
    } else if (param == "noise_var") {
        c.noise_var = v;
    } else if (param == "D") {
        c.D = to_dim(v, param);
        // Hops beyond the listed sizes reuse the last listed size.
        const Index fill = base.irs_sizes.empty() ? 10 : base.irs_sizes.back();
        c.irs_sizes.resize(static_cast<std::size_t>(c.D), fill);
    } else {
        throw ConfigError("unknown sweep parameter '" + param + "'");
    }
    return c;
}

std::uint64_t trial_seed(std::uint64_t master, Index trial)
{
    return derive_seed(master, "trial", {static_cast<std::uint64_t>(trial)});
}

std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records)
{
    std::map<std::pair<double, std::string>, std::vector<const TrialRecord*>> groups;
    for (const auto& r : records) {
        groups[{r.value, r.solver}].push_back(&r);
    }
    std::vector<AggregateRow> out;
    for (auto& [key, rows] : groups) {
        std::sort(rows.begin(), rows.end(),
                  [](const TrialRecord* a, const TrialRecord* b) { return a->trial < b->trial; });
        AggregateRow a;
        a.value = key.first;
        a.solver = key.second;
        a.trials = static_cast<Index>(rows.size());
        double sum_abs = 0.0;
        double sum_rel = 0.0;
        Index good = 0;
        for (const TrialRecord* r : rows) {
            if (!r->ok()) {
                ++a.failures;
                continue;
            }
            sum_abs += r->error_abs;
            sum_rel += r->error_rel;
            ++good;
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        a.mean_error_abs = good > 0 ? sum_abs / static_cast<double>(good) : nan;
        a.mean_error_rel = good > 0 ? sum_rel / static_cast<double>(good) : nan;
        out.push_back(a);
    }
    return out;
}

SweepResult run_sweep(const SweepSpec& spec)
{
    spec.validate();
    struct Job
    {
        double value;
        std::string solver;
        Index trial;
    };
    std::vector<Job> jobs;
    for (double v : spec.values) {
        for (const auto& s : spec.solvers) {
            for (Index t = 0; t < spec.trials; ++t) {
                jobs.push_back({v, s, t});
            }
        }
    }

    SweepResult result;
    result.records.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            const Job& j = jobs[i];
            TrialRecord r = run_trial(spec.config_at(j.value), j.solver, spec.pilot, spec.policy,
                                      spec.settings, trial_seed(spec.master_seed, j.trial));
            r.sweep_param = spec.param;
            r.value = j.value;
            r.trial = j.trial;
            result.records[i] = std::move(r);
        }
    };
    unsigned n = spec.threads != 0 ? spec.threads : std::max(1U, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, jobs.size()));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n; ++i) {
            pool.emplace_back(worker);
        }
    }

    std::sort(result.records.begin(), result.records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.value, a.solver, a.trial) < std::tie(b.value, b.solver, b.trial);
    });
    result.aggregate = aggregate(result.records);
    return result;
}

SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points)
{
    if (points.size() < 2) {
        throw NonPositiveInput("slope_fit needs at least two points");
    }
    const double n = static_cast<double>(points.size());
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw NonPositiveInput("slope_fit needs positive x and y");
        }
        sx += std::log(x);
        sy += std::log(y);
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        const double dy = std::log(y) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw DivisionByZero("slope_fit: all x values are equal");
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    const double ss_res = std::max(0.0, syy - f.slope * sxy);
    f.r2 = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return f;
}

std::vector<GradCheckRow> gradcheck(const SystemConfig& config, std::uint64_t seed, double h)
{
    config.validate();
    const ScenarioSeeds seeds = ScenarioSeeds::from_trial(seed);
    const auto phases = phases_from(config, seeds.phases, PhasePolicy::RandomUniform);
    const TTChannel truth{gen_channels(config, seeds.channels), phases, config};
    const PilotMatrix x = gen_pilots(config, PilotKind{}, seeds.pilots);
    // Noise keeps the residual away from zero at the check point.
    const CTensor3 y = measure(build_ground_truth(truth), x, 1e-2, seeds.noise);
    TTChannel point{random_init(config, seeds.init), phases, config};
    auto& f = point.channels.factors;

    std::vector<CMatrix> grads;
    if (config.D == 1) {
        const SingleHopGradients g = wirtinger_grads_single(f[1], f[0], phases[0], x, y);
        grads = {g.g, g.h};
    } else {
        for (Index d = 0; d <= config.D; ++d) {
            grads.push_back(wirtinger_grad_multi(f, phases, x, y, d));
        }
    }

    std::vector<GradCheckRow> rows;
    for (Index d = 0; d <= config.D; ++d) {
        const auto du = static_cast<std::size_t>(d);
        const CMatrix& g = grads[du];
        double worst = 0.0;
        for (Index j = 0; j < g.cols(); ++j) {
            for (Index i = 0; i < g.rows(); ++i) {
                for (const cplx dir : {cplx{1.0, 0.0}, cplx{0.0, 1.0}}) {
                    const cplx orig = f[du](i, j);
                    f[du](i, j) = orig + h * dir;
                    const double up = loss(point, x, y);
                    f[du](i, j) = orig - h * dir;
                    const double down = loss(point, x, y);
                    f[du](i, j) = orig;
                    const double fd = (up - down) / (2.0 * h);
                    // df/d(re z) = 2 re(grad), df/d(im z) = 2 im(grad)
                    const double pred = dir.real() != 0.0 ? 2.0 * g(i, j).real() : 2.0 * g(i, j).imag();
                    worst = std::max(worst, std::abs(fd - pred));
                }
            }
        }
        const double scale = 2.0 * g.cwiseAbs().maxCoeff();
        rows.push_back({config.D, d, scale > 0.0 ? worst / scale : worst});
    }
    return rows;
}

} // namespace irstt
