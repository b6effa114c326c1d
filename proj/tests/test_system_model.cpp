#include "helpers.hpp"
#include "irstt/errors.hpp"
#include "irstt/linalg.hpp"
#include "irstt/system_model.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace irstt;

namespace {

SystemConfig small_config(Index lp, Index k, std::vector<Index> n, Index um, Index t = 6)
{
    SystemConfig c;
    c.L = lp;
    c.P = 1;
    c.U = 1;
    c.M = um;
    c.K = k;
    c.T = t;
    c.D = static_cast<Index>(n.size());
    c.irs_sizes = std::move(n);
    return c;
}

TTChannel random_channel(const SystemConfig& c, std::uint64_t seed)
{
    const PhaseSchedule sched = gen_phase_schedule(c, seed + 1000, PhasePolicy::RandomUniform);
    TTChannel tt{gen_channels(c, seed), {}, c};
    for (Index d = 1; d <= c.D; ++d) {
        tt.phases.push_back(build_phase_tensor(sched, d));
    }
    return tt;
}

Index numerical_rank(const CMatrix& m)
{
    const Eigen::VectorXd s = singular_values(m);
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i) {
        r += s(i) > 1e-10 * s(0) ? 1 : 0;
    }
    return r;
}

} // namespace

TEST(Channels, UnitFrobeniusNorm)
{
    const SystemConfig c = small_config(4, 3, {3, 5}, 2);
    for (std::uint64_t seed : {1u, 2u, 99u}) {
        const ChannelSet set = gen_channels(c, seed);
        ASSERT_EQ(set.factors.size(), 3u);
        for (const auto& b : set.factors) {
            EXPECT_NEAR(b.norm(), 1.0, 1e-12);
            EXPECT_GT(singular_values(b).minCoeff(), 1e-10);
        }
        EXPECT_EQ(set.factors[0].rows(), 3);
        EXPECT_EQ(set.factors[0].cols(), 2);
        EXPECT_EQ(set.factors[1].rows(), 5);
        EXPECT_EQ(set.factors[2].rows(), 4);
    }
}

TEST(Channels, Deterministic)
{
    const SystemConfig c;
    const ChannelSet a = gen_channels(c, 7);
    const ChannelSet b = gen_channels(c, 7);
    for (std::size_t d = 0; d < a.factors.size(); ++d) {
        EXPECT_EQ(a.factors[d], b.factors[d]);
    }
}

TEST(Channels, GeneratorSecondMoment)
{
    double sum = 0.0;
    Index n = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        const CMatrix m = complex_normal_matrix(10, 10, rng);
        sum += m.squaredNorm();
        n += m.size();
    }
    // |z|^2 is Exp(1) for CN(0,1): standard error 1/sqrt(n).
    EXPECT_NEAR(sum / static_cast<double>(n), 1.0, 3.0 / std::sqrt(static_cast<double>(n)));
}

TEST(Phases, AllOnZeroPhaseGivesIdentitySlices)
{
    const SystemConfig c = small_config(3, 4, {5}, 2);
    const PhaseTensor s = build_phase_tensor(gen_phase_schedule(c, 3, PhasePolicy::AllOnZeroPhase), 1);
    for (Index k = 0; k < c.K; ++k) {
        const CMatrix slice = s.tensor().slice(k);
        EXPECT_LT((slice - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(Phases, RandomUniformUnitModulusAndDiagonal)
{
    const SystemConfig c = small_config(3, 6, {5, 4}, 2);
    const PhaseSchedule sched = gen_phase_schedule(c, 11, PhasePolicy::RandomUniform);
    for (Index d = 1; d <= 2; ++d) {
        const auto& ph = sched.phase[static_cast<std::size_t>(d - 1)];
        EXPECT_GT(ph.minCoeff(), 0.0);
        EXPECT_LE(ph.maxCoeff(), 2.0 * std::numbers::pi);
        const PhaseTensor s = build_phase_tensor(sched, d);
        const Index n = s.elements();
        for (Index k = 0; k < c.K; ++k) {
            for (Index i = 0; i < n; ++i) {
                for (Index j = 0; j < n; ++j) {
                    if (i == j) {
                        EXPECT_NEAR(std::abs(s.tensor()(i, k, j)), 1.0, 1e-15);
                    } else {
                        EXPECT_EQ(s.tensor()(i, k, j), cplx(0.0, 0.0));
                    }
                }
            }
        }
    }
    const PhaseSchedule again = gen_phase_schedule(c, 11, PhasePolicy::RandomUniform);
    EXPECT_EQ(again.phase[0], sched.phase[0]);
    EXPECT_EQ(again.phase[1], sched.phase[1]);
}

TEST(Phases, HandComputedSlice)
{
    PhaseSchedule sched;
    sched.amplitude.push_back((Eigen::MatrixXd(2, 1) << 1.0, 0.0).finished());
    sched.phase.push_back((Eigen::MatrixXd(2, 1) << std::numbers::pi, std::numbers::pi).finished());
    const CMatrix slice = build_phase_tensor(sched, 1).tensor().slice(0);
    EXPECT_NEAR(std::abs(slice(0, 0) - cplx(-1.0, 0.0)), 0.0, 1e-15);
    EXPECT_EQ(slice(1, 1), cplx(0.0, 0.0));
    EXPECT_EQ(slice(0, 1), cplx(0.0, 0.0));
    EXPECT_EQ(slice(1, 0), cplx(0.0, 0.0));
    EXPECT_THROW(build_phase_tensor(sched, 2), DimensionMismatch);
}

TEST(GroundTruth, IdentityPhasesGiveConstantSlices)
{
    const SystemConfig c = small_config(4, 3, {3}, 5);
    TTChannel tt{gen_channels(c, 5), {}, c};
    tt.phases.push_back(build_phase_tensor(gen_phase_schedule(c, 1, PhasePolicy::AllOnZeroPhase), 1));
    const CTensor3 b = build_ground_truth(tt);
    const CMatrix hg = tt.channels.h() * tt.channels.g();
    for (Index k = 0; k < c.K; ++k) {
        EXPECT_LT(irstt::test::max_abs(b.slice(k), hg), 1e-15);
    }
}

TEST(GroundTruth, SingleHopElementwiseOracle)
{
    const SystemConfig c = small_config(2, 2, {2}, 3);
    const TTChannel tt = random_channel(c, 21);
    const CTensor3 b = build_ground_truth(tt);
    const CMatrix& h = tt.channels.h();
    const CMatrix& g = tt.channels.g();
    const CMatrix& s = tt.phase(1).coefficients();
    double worst = 0.0;
    for (Index p = 0; p < 2; ++p)
        for (Index k = 0; k < 2; ++k)
            for (Index m = 0; m < 3; ++m) {
                cplx acc{0.0, 0.0};
                for (Index n = 0; n < 2; ++n)
                    acc += h(p, n) * s(n, k) * g(n, m);
                worst = std::max(worst, std::abs(b(p, k, m) - acc));
            }
    EXPECT_LT(worst, 1e-13);
}

TEST(GroundTruth, TwoHopElementwiseOracle)
{
    const SystemConfig c = small_config(2, 2, {2, 2}, 3);
    const TTChannel tt = random_channel(c, 22);
    const CTensor3 b = build_ground_truth(tt);
    const auto& f = tt.channels.factors;
    const CMatrix& s1 = tt.phase(1).coefficients();
    const CMatrix& s2 = tt.phase(2).coefficients();
    double worst = 0.0;
    for (Index p = 0; p < 2; ++p)
        for (Index k = 0; k < 2; ++k)
            for (Index m = 0; m < 3; ++m) {
                cplx acc{0.0, 0.0};
                for (Index n2 = 0; n2 < 2; ++n2)
                    for (Index n1 = 0; n1 < 2; ++n1)
                        acc += f[2](p, n2) * s2(n2, k) * f[1](n2, n1) * s1(n1, k) * f[0](n1, m);
                worst = std::max(worst, std::abs(b(p, k, m) - acc));
            }
    EXPECT_LT(worst, 1e-13);
}

TEST(GroundTruth, ShapeMismatchThrows)
{
    const SystemConfig c = small_config(2, 2, {2}, 3);
    TTChannel tt = random_channel(c, 1);
    tt.channels.factors[0] = CMatrix::Zero(3, 3);
    EXPECT_THROW(build_ground_truth(tt), DimensionMismatch);
}

TEST(GroundTruth, SingleHopUnfoldingRanksAtMostN)
{
    const SystemConfig c = small_config(6, 4, {3}, 5);
    const CTensor3 b = build_ground_truth(random_channel(c, 23));
    EXPECT_LE(numerical_rank(unfold(b, 1)), 3);
    EXPECT_LE(numerical_rank(unfold(b, 2)), 3);
}

TEST(GroundTruth, SumOfTwoChannelsHasRanksAtMostTwoN)
{
    const SystemConfig c = small_config(6, 4, {2}, 6);
    const TTChannel a = random_channel(c, 24);
    TTChannel b = random_channel(c, 25);
    b.phases = a.phases;
    CTensor3 sum = build_ground_truth(a);
    sum += build_ground_truth(b);
    EXPECT_LE(numerical_rank(unfold(sum, 1)), 4);
    EXPECT_LE(numerical_rank(unfold(sum, 2)), 4);
}

TEST(Pilots, BernoulliEntriesAreSigns)
{
    const SystemConfig c = small_config(2, 2, {2}, 4, 50);
    const PilotMatrix x = gen_pilots(c, PilotKind::parse("bernoulli"), 3);
    for (Index i = 0; i < x.X.rows(); ++i)
        for (Index j = 0; j < x.X.cols(); ++j)
            EXPECT_TRUE(x.X(i, j) == cplx(1.0, 0.0) || x.X(i, j) == cplx(-1.0, 0.0));
}

TEST(Pilots, DftRowsAreOrthogonal)
{
    const SystemConfig c = small_config(2, 2, {2}, 4, 4);
    const PilotMatrix x = gen_pilots(c, PilotKind::parse("dft"), 0);
    EXPECT_LT(irstt::test::max_abs(x.X * x.X.adjoint(), 4.0 * CMatrix::Identity(4, 4)), 1e-12);
    EXPECT_LT((x.X.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-15);
    const SystemConfig short_t = small_config(2, 2, {2}, 4, 3);
    EXPECT_THROW(gen_pilots(short_t, PilotKind::parse("dft"), 0), ConfigError);
}

TEST(Pilots, GaussianRealPartVariance)
{
    const SystemConfig c = small_config(2, 2, {2}, 10, 1000);
    const PilotMatrix x = gen_pilots(c, PilotKind::parse("gaussian"), 4);
    const double n = static_cast<double>(x.X.size());
    const double var = x.X.real().array().square().sum() / n;
    // Var(re^2) = 2 (1/2)^2 for re ~ N(0, 1/2).
    EXPECT_NEAR(var, 0.5, 3.0 * std::sqrt(0.5 / n));
}

TEST(Pilots, ConstellationsHaveUnitPower)
{
    const SystemConfig c = small_config(2, 2, {2}, 10, 2000);
    const PilotMatrix psk = gen_pilots(c, PilotKind::parse("psk8"), 5);
    EXPECT_LT((psk.X.cwiseAbs().array() - 1.0).abs().maxCoeff(), 1e-14);

    // Square QAM: levels +-1, +-3, ... scaled so that the constellation mean power is 1.
    for (int order : {4, 16, 64}) {
        const PilotMatrix qam = gen_pilots(c, PilotKind::parse("qam" + std::to_string(order)), 6);
        const int side = static_cast<int>(std::lround(std::sqrt(order)));
        double level_power = 0.0;
        for (int l = 0; l < side; ++l) {
            const double v = 2.0 * l - (side - 1);
            level_power += v * v / side;
        }
        const double scale = 1.0 / std::sqrt(2.0 * level_power);
        for (Index i = 0; i < qam.X.rows(); ++i) {
            for (Index j = 0; j < qam.X.cols(); ++j) {
                const double re = qam.X(i, j).real() / scale;
                const double im = qam.X(i, j).imag() / scale;
                EXPECT_NEAR(re, std::round(re), 1e-9);
                EXPECT_NEAR(im, std::round(im), 1e-9);
            }
        }
        const double mean_power = qam.X.squaredNorm() / static_cast<double>(qam.X.size());
        EXPECT_NEAR(mean_power, 1.0, 0.05) << "qam" << order;
    }
    EXPECT_THROW(PilotKind::parse("qam8"), ConfigError);
    EXPECT_THROW(PilotKind::parse("walsh"), ConfigError);
}

TEST(Measure, ZeroCases)
{
    const SystemConfig c = small_config(3, 2, {2}, 4, 4);
    const PilotMatrix x = gen_pilots(c, PilotKind{}, 1);
    const CTensor3 y = measure(CTensor3(3, 2, 4), x, 0.0, 9);
    EXPECT_EQ(y.frobenius_norm(), 0.0);

    Rng rng(2);
    const CTensor3 b = irstt::test::random_tensor(3, 2, 4, rng);
    const PilotMatrix eye{CMatrix::Identity(4, 4), PilotKind{}};
    EXPECT_EQ(max_abs_diff(measure(b, eye, 0.0, 0), b), 0.0);
    EXPECT_THROW(measure(irstt::test::random_tensor(3, 2, 5, rng), x, 0.0, 0), DimensionMismatch);
}

TEST(Measure, LoopOracle)
{
    Rng rng(3);
    const CTensor3 b = irstt::test::random_tensor(2, 3, 4, rng);
    const PilotMatrix x{complex_normal_matrix(4, 5, rng), PilotKind{}};
    const CTensor3 y = measure(b, x, 0.0, 0);
    double worst = 0.0;
    for (Index p = 0; p < 2; ++p)
        for (Index k = 0; k < 3; ++k)
            for (Index t = 0; t < 5; ++t) {
                cplx acc{0.0, 0.0};
                for (Index m = 0; m < 4; ++m)
                    acc += b(p, k, m) * x.X(m, t);
                worst = std::max(worst, std::abs(y(p, k, t) - acc));
            }
    EXPECT_LT(worst, 1e-13);
}

TEST(Measure, Linearity)
{
    Rng rng(4);
    const CTensor3 b1 = irstt::test::random_tensor(2, 3, 4, rng);
    const CTensor3 b2 = irstt::test::random_tensor(2, 3, 4, rng);
    const PilotMatrix x{complex_normal_matrix(4, 6, rng), PilotKind{}};
    const cplx alpha{0.3, -1.2};
    const cplx beta{-2.0, 0.5};
    CTensor3 lhs_in = b1;
    lhs_in *= alpha;
    CTensor3 tmp = b2;
    tmp *= beta;
    lhs_in += tmp;
    const CTensor3 lhs = measure(lhs_in, x, 0.0, 0);
    CTensor3 rhs = measure(b1, x, 0.0, 0);
    rhs *= alpha;
    CTensor3 r2 = measure(b2, x, 0.0, 0);
    r2 *= beta;
    rhs += r2;
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12 * rhs.frobenius_norm());
}

TEST(Measure, NoiseVariance)
{
    const double var = 1e-4;
    const CTensor3 zero(10, 10, 1);
    const PilotMatrix x{CMatrix::Ones(1, 1000), PilotKind{}};
    const CTensor3 w = measure(zero, x, var, 17);
    const double n = static_cast<double>(w.size());
    // |w|^2 / var is Exp(1): standard error of the mean is var / sqrt(n).
    EXPECT_NEAR(w.squared_norm() / n, var, 3.0 * var / std::sqrt(n));
    const CTensor3 again = measure(zero, x, var, 17);
    EXPECT_EQ(max_abs_diff(w, again), 0.0);
}
