#include "irstt/estimators.hpp"

#include "irstt/errors.hpp"
#include "irstt/rng.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace irstt {

namespace {

void check_data(const TTChannel& tt, const PilotMatrix& x, const CTensor3& y)
{
    tt.check_shapes();
    const SystemConfig& c = tt.config;
    if (x.X.rows() != c.um()) {
        throw DimensionMismatch("pilot matrix must have UM rows");
    }
    if (y.dim(0) != c.lp() || y.dim(1) != c.K || y.dim(2) != x.X.cols()) {
        throw DimensionMismatch("Y must be LP x K x T");
    }
}

// Normal-equation form of the loss. With A = X X^H / T and C_k = Y_k X^H / T,
// the residual gradient (1/T)(P_k X - Y_k) X^H equals P_k A - C_k, which avoids
// touching the T-long time axis inside the iteration.
class GramData
{
public:
    GramData(const CMatrix& x, const CTensor3& y)
        : a_(x * x.adjoint() / static_cast<double>(x.cols())),
          y0_(y.squared_norm() / static_cast<double>(x.cols()))
    {
        const CMatrix xh = x.adjoint() / static_cast<double>(x.cols());
        c_.reserve(static_cast<std::size_t>(y.dim(1)));
        for (Index k = 0; k < y.dim(1); ++k) {
            c_.push_back(y.slice(k) * xh);
        }
    }

    Index blocks() const noexcept { return static_cast<Index>(c_.size()); }
    double zero_model_loss() const noexcept { return y0_; }

    CMatrix residual(const CMatrix& p, Index k) const
    {
        return p * a_ - c_[static_cast<std::size_t>(k)];
    }

    // Contribution of block k to the loss, minus the constant ||Y_k||^2 / T.
    double loss_term(const CMatrix& p, const CMatrix& e, Index k) const
    {
        const CMatrix& c = c_[static_cast<std::size_t>(k)];
        return (p.conjugate().cwiseProduct(e)).sum().real() - (p.conjugate().cwiseProduct(c)).sum().real();
    }

    double finish_loss(double terms) const { return std::max(0.0, terms + y0_); }

private:
    CMatrix a_;
    std::vector<CMatrix> c_;
    double y0_;
};

// Single-hop loss folded over the block index. With A = X X^H / T,
// C_k = Y_k X^H / T, Phi = sum_k s(k) s(k)^H and Q_n = sum_k conj(s_n(k)) C_k:
//   grad_H = H ((G A G^H) o Phi) - F,   F(:,n) = Q_n conj(G(n,:))^T
//   grad_G = ((H^H H) o conj(Phi)) G A - E,   E(n,:) = H(:,n)^H Q_n
//   loss   = Re<H ((G A G^H) o Phi), H> - 2 Re<F, H> + ||Y||^2 / T
// so an iteration costs O(LP * N * UM) regardless of K and T.
class SingleHopGram
{
public:
    SingleHopGram(const CMatrix& x, const CTensor3& y, const PhaseTensor& s)
        : a_(x * x.adjoint() / static_cast<double>(x.cols())),
          phi_(s.coefficients() * s.coefficients().adjoint()),
          y0_(y.squared_norm() / static_cast<double>(x.cols()))
    {
        const CMatrix xh = x.adjoint() / static_cast<double>(x.cols());
        const Index n = s.elements();
        q_.assign(static_cast<std::size_t>(n), CMatrix::Zero(y.dim(0), x.rows()));
        for (Index k = 0; k < y.dim(1); ++k) {
            const CMatrix c = y.slice(k) * xh;
            for (Index i = 0; i < n; ++i) {
                q_[static_cast<std::size_t>(i)] += std::conj(s.coefficients()(i, k)) * c;
            }
        }
    }

    double zero_model_loss() const noexcept { return y0_; }

    CMatrix grad_h(const CMatrix& h, const CMatrix& g, double* loss_out) const
    {
        const CMatrix weighted = h * (g * a_ * g.adjoint()).cwiseProduct(phi_);
        CMatrix f(h.rows(), h.cols());
        for (Index i = 0; i < h.cols(); ++i) {
            f.col(i).noalias() = q_[static_cast<std::size_t>(i)] * g.row(i).adjoint();
        }
        if (loss_out) {
            const double quad = (weighted.cwiseProduct(h.conjugate())).sum().real();
            const double cross = (f.cwiseProduct(h.conjugate())).sum().real();
            *loss_out = std::max(0.0, quad - 2.0 * cross + y0_);
        }
        return weighted - f;
    }

    CMatrix grad_g(const CMatrix& h, const CMatrix& g) const
    {
        CMatrix e(g.rows(), g.cols());
        for (Index i = 0; i < g.rows(); ++i) {
            e.row(i).noalias() = h.col(i).adjoint() * q_[static_cast<std::size_t>(i)];
        }
        return (h.adjoint() * h).cwiseProduct(phi_.conjugate()) * g * a_ - e;
    }

private:
    CMatrix a_;
    CMatrix phi_;
    std::vector<CMatrix> q_;
    double y0_;
};

void apply_rank_limit(CMatrix& factor, const SolverOptions& opts, Index d)
{
    if (!opts.rank_limits) {
        return;
    }
    const Index r = opts.rank_limits->at(static_cast<std::size_t>(d));
    if (r < std::min(factor.rows(), factor.cols())) {
        factor = rank_project(factor, r);
    }
}

// Shared bookkeeping for the iterative solvers: trace, best iterate,
// stopping rule and divergence guard.
class Tracker
{
public:
    Tracker(EstimateResult& result, const SolverOptions& opts, double zero_model_loss, bool guard)
        : result_(result), opts_(opts), zero_loss_(zero_model_loss), guard_(guard)
    {
    }

    // Records the loss of the current iterate. Returns true when the
    // stopping rule fires.
    bool record(double value, const std::vector<CMatrix>& factors)
    {
        if (!std::isfinite(value)) {
            throw Diverged("loss became non-finite after " + std::to_string(result_.iterations_run) +
                           " iterations");
        }
        auto& trace = result_.loss_trace;
        if (trace.empty()) {
            reference_ = std::max(value, zero_loss_);
        } else if (guard_ && value > kDivergenceFactor * reference_) {
            throw Diverged("loss " + std::to_string(value) + " exceeds " +
                           std::to_string(kDivergenceFactor) + "x the reference " +
                           std::to_string(reference_) + "; step size too large");
        }
        if (trace.empty() || value < result_.best_loss) {
            result_.best_loss = value;
            result_.best_estimate.channels.factors = factors;
        }
        bool stop = false;
        if (!trace.empty() && opts_.stop_tol > 0.0) {
            const double prev = trace.back();
            const double change = std::abs(prev - value) / std::max(prev, std::numeric_limits<double>::min());
            stop = change < opts_.stop_tol;
        }
        trace.push_back(value);
        return stop;
    }

private:
    EstimateResult& result_;
    const SolverOptions& opts_;
    double zero_loss_;
    bool guard_;
    double reference_ = 0.0;
};

EstimateResult start_result(const TTChannel& init)
{
    EstimateResult r;
    r.estimate = init;
    r.best_estimate = init;
    return r;
}

// B_D S_D(k) ... B_{d+1} S_{d+1}(k): the part of the cascade left of B_d.
// Empty (identity) when d == D.
CMatrix left_chain(const std::vector<CMatrix>& f, const std::vector<PhaseTensor>& s, Index d, Index k)
{
    const Index D = static_cast<Index>(f.size()) - 1;
    if (d == D) {
        return CMatrix::Identity(f.back().rows(), f.back().rows());
    }
    CMatrix acc = f.back() * s[static_cast<std::size_t>(D - 1)].diagonal(k).asDiagonal();
    for (Index j = D - 1; j > d; --j) {
        acc = (acc * f[static_cast<std::size_t>(j)]) * s[static_cast<std::size_t>(j - 1)].diagonal(k).asDiagonal();
    }
    return acc;
}

// S_d(k) B_{d-1} ... S_1(k) B_0: the part of the cascade right of B_d.
// Identity when d == 0.
CMatrix right_chain(const std::vector<CMatrix>& f, const std::vector<PhaseTensor>& s, Index d, Index k)
{
    if (d == 0) {
        return CMatrix::Identity(f.front().cols(), f.front().cols());
    }
    CMatrix acc = f.front();
    for (Index j = 1; j < d; ++j) {
        acc = f[static_cast<std::size_t>(j)] * (s[static_cast<std::size_t>(j - 1)].diagonal(k).asDiagonal() * acc);
    }
    return s[static_cast<std::size_t>(d - 1)].diagonal(k).asDiagonal() * acc;
}

// Gradient for B_d given the per-block chains on either side of it, plus the
// loss at the current point when requested.
CMatrix chain_gradient(const GramData& gram, const CMatrix& bd, const std::vector<CMatrix>& lefts,
                       const std::vector<CMatrix>& rights, double* loss_out)
{
    CMatrix grad = CMatrix::Zero(bd.rows(), bd.cols());
    double terms = 0.0;
    for (Index k = 0; k < gram.blocks(); ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const CMatrix p = lefts[ku] * bd * rights[ku];
        const CMatrix e = gram.residual(p, k);
        grad.noalias() += lefts[ku].adjoint() * e * rights[ku].adjoint();
        if (loss_out) {
            terms += gram.loss_term(p, e, k);
        }
    }
    if (loss_out) {
        *loss_out = gram.finish_loss(terms);
    }
    return grad;
}

} // namespace

void SolverOptions::validate() const
{
    if (max_iters < 1) {
        throw ConfigError("max_iters must be >= 1");
    }
    if (!(step_size > 0.0)) {
        throw ConfigError("step size must be > 0");
    }
    if (!(stop_tol >= 0.0)) {
        throw ConfigError("stop_tol must be >= 0");
    }
    if (!(pinv_tol >= 0.0)) {
        throw ConfigError("pinv_tol must be >= 0");
    }
}

double loss(const TTChannel& tt, const PilotMatrix& x, const CTensor3& y)
{
    check_data(tt, x, y);
    CTensor3 r = apply_pilots(build_ground_truth(tt), x.X);
    r -= y;
    return r.squared_norm() / static_cast<double>(x.X.cols());
}

ChannelSet random_init(const SystemConfig& config, std::uint64_t seed)
{
    config.validate();
    Rng rng(seed);
    ChannelSet set;
    for (Index d = 0; d <= config.D; ++d) {
        CMatrix b = complex_normal_matrix(config.chain_dim(d + 1), config.chain_dim(d), rng);
        b /= b.norm();
        set.factors.push_back(std::move(b));
    }
    return set;
}

CMatrix mode1_design(const PhaseTensor& s, const CMatrix& g)
{
    if (g.rows() != s.elements()) {
        throw DimensionMismatch("mode1_design: G rows differ from IRS size");
    }
    return right_unfold(s.tensor()) * kron(g, CMatrix::Identity(s.blocks(), s.blocks()));
}

CMatrix mode2_design(const PhaseTensor& s, const CMatrix& h)
{
    if (h.cols() != s.elements()) {
        throw DimensionMismatch("mode2_design: H columns differ from IRS size");
    }
    return kron(CMatrix::Identity(s.blocks(), s.blocks()), h) * left_unfold(s.tensor());
}

CTensor3 pilot_inverse(const CTensor3& y, const PilotMatrix& x, double pinv_tol)
{
    if (y.dim(2) != x.X.cols()) {
        throw DimensionMismatch("pilot_inverse: Y time axis differs from pilot length");
    }
    // T x UM pseudoinverse as a T x 1 x UM tensor; contracting Y's time mode
    // against its first mode gives LP x K x UM.
    return contract(y, 2, as_tensor(pinv(x.X, pinv_tol)), 0);
}

AlsStep als_step_projected(const CMatrix& h, const CMatrix& g, const PhaseTensor& s,
                           const CTensor3& z, const SolverOptions& opts)
{
    if (z.dim(0) != h.rows() || z.dim(1) != s.blocks() || z.dim(2) != g.cols()) {
        throw DimensionMismatch("als_step: data shape does not match factors");
    }
    AlsStep step;
    const Pseudoinverse p1 = pinv_detail(mode1_design(s, g), opts.pinv_tol);
    step.h = unfold(z, 1) * p1.matrix;
    apply_rank_limit(step.h, opts, 1);

    const Pseudoinverse p2 = pinv_detail(mode2_design(s, step.h), opts.pinv_tol);
    step.g = p2.matrix * unfold(z, 2);
    apply_rank_limit(step.g, opts, 0);

    step.rank_deficient = p1.truncated() || p2.truncated();
    return step;
}

AlsStep als_step_single(const CMatrix& h, const CMatrix& g, const PhaseTensor& s,
                        const PilotMatrix& x, const CTensor3& y, const SolverOptions& opts)
{
    return als_step_projected(h, g, s, pilot_inverse(y, x, opts.pinv_tol), opts);
}

EstimateResult als_single(const TTChannel& init, const PilotMatrix& x, const CTensor3& y,
                          const SolverOptions& opts)
{
    opts.validate();
    check_data(init, x, y);
    if (init.channels.hops() != 1) {
        throw ConfigError("ALS is defined for a single IRS hop");
    }
    EstimateResult result = start_result(init);
    Tracker tracker(result, opts, 0.0, false);
    const CTensor3 z = pilot_inverse(y, x, opts.pinv_tol);
    const PhaseTensor& s = init.phase(1);
    auto& f = result.estimate.channels.factors;

    tracker.record(loss(result.estimate, x, y), f);
    for (Index it = 0; it < opts.max_iters; ++it) {
        AlsStep step = als_step_projected(f[1], f[0], s, z, opts);
        f[1] = std::move(step.h);
        f[0] = std::move(step.g);
        result.rank_deficient = result.rank_deficient || step.rank_deficient;
        ++result.iterations_run;
        if (tracker.record(loss(result.estimate, x, y), f)) {
            result.converged = true;
            break;
        }
    }
    return result;
}

SingleHopGradients wirtinger_grads_single(const CMatrix& h, const CMatrix& g, const PhaseTensor& s,
                                          const PilotMatrix& x, const CTensor3& y)
{
    if (h.cols() != s.elements() || g.rows() != s.elements() || g.cols() != x.X.rows()) {
        throw DimensionMismatch("wirtinger_grads_single: factor shapes do not chain");
    }
    if (y.dim(0) != h.rows() || y.dim(1) != s.blocks() || y.dim(2) != x.X.cols()) {
        throw DimensionMismatch("wirtinger_grads_single: Y must be LP x K x T");
    }
    const double inv_t = 1.0 / static_cast<double>(x.X.cols());

    // B = H x_2^1 S x_3^1 G
    const CTensor3 hs = contract(as_tensor(h), 2, s.tensor(), 0); // LP x K x N
    const CTensor3 b = contract(hs, 2, as_tensor(g), 0);          // LP x K x UM

    CTensor3 residual = contract(b, 2, as_tensor(x.X), 0); // LP x K x T
    residual -= y;
    // (B x_3^1 X - Y) x_3^2 X*
    const CTensor3 rx = contract(residual, 2, as_tensor(x.X.conjugate()), 2); // LP x K x UM

    const CTensor3 s_conj = s.tensor().conj();
    // S* x_3^1 G*
    const CTensor3 sg = contract(s_conj, 2, as_tensor(g.conjugate()), 0); // N x K x UM
    // H* x_2^1 S*
    const CTensor3 hs_conj = contract(as_tensor(h.conjugate()), 2, s_conj, 0); // LP x K x N

    SingleHopGradients out;
    out.h = inv_t * contract_pair(rx, {1, 2}, sg, {1, 2});
    out.g = inv_t * contract_pair(hs_conj, {0, 1}, rx, {0, 1});
    return out;
}

CMatrix wirtinger_grad_multi(const std::vector<CMatrix>& factors,
                             const std::vector<PhaseTensor>& phases, const PilotMatrix& x,
                             const CTensor3& y, Index d)
{
    const Index D = static_cast<Index>(factors.size()) - 1;
    if (D < 1 || static_cast<Index>(phases.size()) != D) {
        throw DimensionMismatch("wirtinger_grad_multi: need D+1 factors and D phase tensors");
    }
    if (d < 0 || d > D) {
        throw DimensionMismatch("wirtinger_grad_multi: factor index out of range");
    }
    if (factors.front().cols() != x.X.rows() || y.dim(2) != x.X.cols() ||
        y.dim(0) != factors.back().rows() || y.dim(1) != phases.front().blocks()) {
        throw DimensionMismatch("wirtinger_grad_multi: data shapes do not match factors");
    }
    const double inv_t = 1.0 / static_cast<double>(x.X.cols());
    const CMatrix xh = x.X.adjoint();
    const CMatrix& bd = factors[static_cast<std::size_t>(d)];
    CMatrix grad = CMatrix::Zero(bd.rows(), bd.cols());
    for (Index k = 0; k < y.dim(1); ++k) {
        const CMatrix left = left_chain(factors, phases, d, k);
        const CMatrix right = right_chain(factors, phases, d, k);
        const CMatrix residual = left * bd * right * x.X - y.slice(k);
        grad += left.adjoint() * residual * xh * right.adjoint();
    }
    return inv_t * grad;
}

EstimateResult agd_single(const TTChannel& init, const PilotMatrix& x, const CTensor3& y,
                          const SolverOptions& opts)
{
    opts.validate();
    check_data(init, x, y);
    if (init.channels.hops() != 1) {
        throw ConfigError("agd_single needs exactly one IRS hop");
    }
    const SingleHopGram gram(x.X, y, init.phase(1));
    EstimateResult result = start_result(init);
    Tracker tracker(result, opts, gram.zero_model_loss(), true);
    auto& f = result.estimate.channels.factors;
    CMatrix& h = f[1];
    CMatrix& g = f[0];
    const double mu = opts.step_size;

    for (Index it = 0; it <= opts.max_iters; ++it) {
        // H gradient at (H^l, G^l); the loss of iterate l comes with it.
        double current = 0.0;
        const CMatrix grad_h = gram.grad_h(h, g, &current);
        if (tracker.record(current, f)) {
            result.converged = true;
            break;
        }
        if (it == opts.max_iters) {
            break;
        }
        h -= mu * grad_h;
        apply_rank_limit(h, opts, 1);

        // G gradient at (H^{l+1}, G^l)
        g -= mu * gram.grad_g(h, g);
        apply_rank_limit(g, opts, 0);
        ++result.iterations_run;
    }
    return result;
}

EstimateResult agd_multi(const TTChannel& init, const PilotMatrix& x, const CTensor3& y,
                         const SolverOptions& opts)
{
    opts.validate();
    check_data(init, x, y);
    const GramData gram(x.X, y);
    EstimateResult result = start_result(init);
    Tracker tracker(result, opts, gram.zero_model_loss(), true);
    auto& f = result.estimate.channels.factors;
    const auto& s = init.phases;
    const Index D = init.channels.hops();
    const auto nk = static_cast<std::size_t>(gram.blocks());
    const double mu = opts.step_size;
    auto diag = [&](Index hop, std::size_t k) {
        return s[static_cast<std::size_t>(hop - 1)].diagonal(static_cast<Index>(k)).asDiagonal();
    };

    // rights[d][k] = S_d(k) B_{d-1} ... S_1(k) B_0. Factors below d are not yet
    // touched when B_d is updated in a D..0 sweep, so these hold for the whole sweep.
    std::vector<std::vector<CMatrix>> rights(static_cast<std::size_t>(D + 1), std::vector<CMatrix>(nk));
    std::vector<CMatrix> lefts(nk);

    for (Index it = 0; it <= opts.max_iters; ++it) {
        for (std::size_t k = 0; k < nk; ++k) {
            rights[0][k] = CMatrix::Identity(f[0].cols(), f[0].cols());
            rights[1][k] = diag(1, k) * f[0];
            for (Index d = 2; d <= D; ++d) {
                const auto du = static_cast<std::size_t>(d);
                rights[du][k] = diag(d, k) * (f[du - 1] * rights[du - 1][k]);
            }
            lefts[k] = CMatrix::Identity(f.back().rows(), f.back().rows());
        }

        double current = 0.0;
        CMatrix grad = chain_gradient(gram, f.back(), lefts, rights.back(), &current);
        if (tracker.record(current, f)) {
            result.converged = true;
            break;
        }
        if (it == opts.max_iters) {
            break;
        }
        for (Index d = D; d >= 0; --d) {
            const auto du = static_cast<std::size_t>(d);
            if (d != D) {
                grad = chain_gradient(gram, f[du], lefts, rights[du], nullptr);
            }
            f[du] -= mu * grad;
            apply_rank_limit(f[du], opts, d);
            if (d > 0) {
                // Extend the left chains through the freshly updated factor.
                for (std::size_t k = 0; k < nk; ++k) {
                    lefts[k] = (lefts[k] * f[du]) * diag(d, k);
                }
            }
        }
        ++result.iterations_run;
    }
    return result;
}

CTensor3 ttsvd_baseline(const CTensor3& y, const PilotMatrix& x, Index r1, Index r2, double pinv_tol)
{
    if (x.X.cols() < x.X.rows()) {
        throw ConfigError("TT-SVD baseline needs T >= UM");
    }
    return tt_svd3(pilot_inverse(y, x, pinv_tol), r1, r2).reconstruct();
}

} // namespace irstt
