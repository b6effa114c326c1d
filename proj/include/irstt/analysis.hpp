#pragma once

#include "irstt/estimators.hpp"
#include "irstt/system_model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace irstt {

struct RecoveryError
{
    double abs = 0.0; // ||B_hat - B*||_F
    double rel = 0.0; // abs / ||B*||_F
};

// Throws DimensionMismatch, or DivisionByZero when ||B*||_F = 0.
RecoveryError recovery_error(const CTensor3& b_hat, const CTensor3& b_star);

struct RipReport
{
    Index samples = 0;
    std::vector<double> ratios; // rho = ||X(B)||^2 / (T ||B||^2)
    double delta_hat = 0.0;     // max |rho - 1|
    double median_dev = 0.0;
    // |rho - 1| at the levels in kRipQuantiles.
    std::vector<double> quantiles;
};

inline const std::vector<double> kRipQuantiles{0.5, 0.9, 0.95, 0.99, 1.0};

// Monte Carlo lower bound on the RIP constant over random unit-norm TT tensors.
RipReport rip_probe(const SystemConfig& config, PilotKind kind, Index samples, std::uint64_t seed,
                    PhasePolicy policy = PhasePolicy::RandomUniform);

// Per-solver settings of a trial. agd_steps[D-1] is the step for D hops.
struct SolverSettings
{
    Index als_iters = 100;
    Index agd_iters = 100000;
    std::vector<double> agd_steps{0.2, 1.0, 5.0, 10.0, 15.0};
    double stop_tol = 0.0;
    double pinv_tol = kDefaultPinvTol;
    std::optional<std::vector<Index>> rank_limits;

    SolverOptions options_for(const std::string& solver, Index hops) const;
};

inline const std::vector<std::string> kSolvers{"als", "agd", "ttsvd"};

struct TrialRecord
{
    std::string sweep_param;
    double value = 0.0;
    Index trial = 0;
    std::string solver;
    double error_abs = 0.0;
    double error_rel = 0.0;
    double best_error_abs = 0.0; // error of the lowest-loss iterate
    Index iterations = 0;
    double wall_time_ms = 0.0;
    std::uint64_t seed = 0;
    std::string status = "ok";
    std::vector<double> loss_trace;

    bool ok() const { return status == "ok"; }
};

struct ScenarioSeeds
{
    std::uint64_t channels, phases, pilots, noise, init;

    static ScenarioSeeds from_trial(std::uint64_t trial_seed);
};

// One Monte Carlo trial. Solver exceptions become a non-"ok" status with NaN errors.
TrialRecord run_trial(const SystemConfig& config, const std::string& solver, PilotKind pilot,
                      PhasePolicy policy, const SolverSettings& settings, std::uint64_t seed);

struct SweepSpec
{
    SystemConfig base;
    std::string param = "T"; // T, UM, LP, N, K, noise_var, D
    std::vector<double> values{100};
    std::vector<std::string> solvers{"als"};
    Index trials = 20;
    std::uint64_t master_seed = 1;
    PilotKind pilot;
    PhasePolicy policy = PhasePolicy::RandomUniform;
    SolverSettings settings;
    unsigned threads = 0; // 0: hardware concurrency

    void validate() const;
    // Base config with the swept parameter set to v.
    SystemConfig config_at(double v) const;
};

std::uint64_t trial_seed(std::uint64_t master, Index trial);

struct AggregateRow
{
    double value = 0.0;
    std::string solver;
    Index trials = 0;
    Index failures = 0;
    double mean_error_abs = 0.0; // over successful trials
    double mean_error_rel = 0.0;
};

struct SweepResult
{
    std::vector<TrialRecord> records; // sorted by (value, solver, trial)
    std::vector<AggregateRow> aggregate;
};

SweepResult run_sweep(const SweepSpec& spec);

// Mean over successful records, grouped by (value, solver), in sorted order.
std::vector<AggregateRow> aggregate(const std::vector<TrialRecord>& records);

struct SlopeFit
{
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// OLS of log y on log x. Throws NonPositiveInput.
SlopeFit slope_fit(const std::vector<std::pair<double, double>>& points);

struct GradCheckRow
{
    Index hops = 0;
    Index factor = 0; // d of B_d
    double max_rel_error = 0.0;
};

// Central finite differences of the loss against the Wirtinger gradients of
// every factor, on a seeded instance of `config`.
std::vector<GradCheckRow> gradcheck(const SystemConfig& config, std::uint64_t seed, double h = 1e-5);

} // namespace irstt
