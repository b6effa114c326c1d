#pragma once

#include "irstt/linalg.hpp"
#include "irstt/system_model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace irstt {

// Loss above this multiple of the reference loss aborts a gradient run.
inline constexpr double kDivergenceFactor = 1e6;

struct SolverOptions
{
    Index max_iters = 100;
    double step_size = 0.2; // AGD only
    double pinv_tol = kDefaultPinvTol; // ALS only
    // Optional rank caps r_0..r_D applied to B_0..B_D after every update.
    std::optional<std::vector<Index>> rank_limits;
    // Stop once |loss_prev - loss| / loss_prev < stop_tol. 0 runs the full budget.
    double stop_tol = 0.0;
    std::uint64_t init_seed = 0;

    void validate() const;
};

struct EstimateResult
{
    TTChannel estimate;      // last iterate
    TTChannel best_estimate; // iterate with the lowest recorded loss
    double best_loss = 0.0;
    // (1/T)||X(B) - Y||_F^2: entry 0 at the initial point, entry i after sweep i.
    std::vector<double> loss_trace;
    Index iterations_run = 0;
    bool converged = false;
    bool rank_deficient = false; // some pseudoinverse dropped singular values
};

// (1/T) ||build_ground_truth(tt) x_3^1 X - Y||_F^2
double loss(const TTChannel& tt, const PilotMatrix& x, const CTensor3& y);

// Factors with iid CN(0,1) entries, each scaled to unit Frobenius norm.
ChannelSet random_init(const SystemConfig& config, std::uint64_t seed);

// R(S) (G kron I_K): unfold(B,1) = H * mode1_design(S, G).
CMatrix mode1_design(const PhaseTensor& s, const CMatrix& g);
// (I_K kron H) L(S): unfold(B,2) = mode2_design(S, H) * G.
CMatrix mode2_design(const PhaseTensor& s, const CMatrix& h);

// Y x_3^1 pinv(X), the pilot-inverted data both ALS and TT-SVD factor.
CTensor3 pilot_inverse(const CTensor3& y, const PilotMatrix& x, double pinv_tol = kDefaultPinvTol);

struct AlsStep
{
    CMatrix h;
    CMatrix g;
    bool rank_deficient = false;
};

// One ALS sweep: H from the unfold-1 least squares problem at fixed G, then G
// from the unfold-2 problem at the new H.
AlsStep als_step_single(const CMatrix& h, const CMatrix& g, const PhaseTensor& s,
                        const PilotMatrix& x, const CTensor3& y, const SolverOptions& opts);
// Same step given the precomputed pilot-inverted data z = Y x_3^1 pinv(X).
AlsStep als_step_projected(const CMatrix& h, const CMatrix& g, const PhaseTensor& s,
                           const CTensor3& z, const SolverOptions& opts);

// opts.max_iters ALS sweeps from init.channels. Single hop only.
EstimateResult als_single(const TTChannel& init, const PilotMatrix& x, const CTensor3& y,
                          const SolverOptions& opts);

struct SingleHopGradients
{
    CMatrix h; // LP x N
    CMatrix g; // N x UM
};

// Wirtinger gradients of the single-hop loss with respect to H* and G*,
// written as the tensor contractions of the residual against X* and S*.
SingleHopGradients wirtinger_grads_single(const CMatrix& h, const CMatrix& g, const PhaseTensor& s,
                                          const PilotMatrix& x, const CTensor3& y);

// Wirtinger gradient with respect to B_d* for the multi-hop loss.
CMatrix wirtinger_grad_multi(const std::vector<CMatrix>& factors,
                             const std::vector<PhaseTensor>& phases, const PilotMatrix& x,
                             const CTensor3& y, Index d);

// Alternating gradient descent, H then G. Throws Diverged.
EstimateResult agd_single(const TTChannel& init, const PilotMatrix& x, const CTensor3& y,
                          const SolverOptions& opts);

// Alternating gradient descent over B_D, ..., B_0, each step at the freshest
// neighbours. Throws Diverged.
EstimateResult agd_multi(const TTChannel& init, const PilotMatrix& x, const CTensor3& y,
                         const SolverOptions& opts);

// Phase-agnostic baseline: TT-SVD of Y x_3^1 pinv(X), reconstructed.
CTensor3 ttsvd_baseline(const CTensor3& y, const PilotMatrix& x, Index r1, Index r2,
                        double pinv_tol = kDefaultPinvTol);

} // namespace irstt
