#include "helpers.hpp"
#include "irstt/errors.hpp"
#include "irstt/linalg.hpp"

#include <gtest/gtest.h>

using namespace irstt;
using irstt::test::random_tensor;
using irstt::test::rel_diff;

TEST(Pinv, Identity)
{
    EXPECT_LT(rel_diff(pinv(CMatrix::Identity(5, 5)), CMatrix::Identity(5, 5)), 1e-15);
}

TEST(Pinv, DiagonalWithExactZero)
{
    CMatrix a = CMatrix::Zero(2, 2);
    a(0, 0) = 2.0;
    const Pseudoinverse p = pinv_detail(a);
    EXPECT_EQ(p.rank, 1);
    EXPECT_TRUE(p.truncated());
    EXPECT_NEAR(std::abs(p.matrix(0, 0) - 0.5), 0.0, 1e-15);
    EXPECT_EQ(p.matrix(1, 1), cplx(0.0, 0.0));
    EXPECT_EQ(p.matrix(0, 1), cplx(0.0, 0.0));
    EXPECT_EQ(p.matrix(1, 0), cplx(0.0, 0.0));
}

TEST(Pinv, PenroseIdentities)
{
    Rng rng(21);
    const CMatrix a = complex_normal_matrix(10, 6, rng);
    const CMatrix p = pinv(a);
    EXPECT_LT(rel_diff(p * a, CMatrix::Identity(6, 6)), 1e-10);
    EXPECT_LT(rel_diff(a * p * a, a), 1e-10);
    EXPECT_LT(rel_diff(p * a * p, p), 1e-10);
    EXPECT_LT(rel_diff((a * p).adjoint(), a * p), 1e-10);
    EXPECT_LT(rel_diff((p * a).adjoint(), p * a), 1e-10);
}

TEST(Pinv, InvolutionOnWellConditioned)
{
    Rng rng(22);
    const CMatrix a = complex_normal_matrix(7, 4, rng);
    EXPECT_LT(rel_diff(pinv(pinv(a)), a), 1e-9);
}

TEST(RankProject, FullRankIsNoOp)
{
    Rng rng(23);
    const CMatrix a = complex_normal_matrix(5, 4, rng);
    EXPECT_LT(rel_diff(rank_project(a, 4), a), 1e-12);
}

TEST(RankProject, ExactRankOne)
{
    Rng rng(24);
    const CMatrix a = complex_normal_matrix(5, 1, rng) * complex_normal_matrix(1, 4, rng);
    EXPECT_LT(rel_diff(rank_project(a, 1), a), 1e-12);
}

TEST(RankProject, EckartYoungError)
{
    Rng rng(25);
    const CMatrix a = complex_normal_matrix(5, 4, rng);
    const Eigen::VectorXd s = singular_values(a);
    const double expected = std::sqrt(s(2) * s(2) + s(3) * s(3));
    EXPECT_NEAR((a - rank_project(a, 2)).norm(), expected, 1e-10);
    EXPECT_THROW(rank_project(a, 0), RankOutOfRange);
    EXPECT_THROW(rank_project(a, 5), RankOutOfRange);
}

TEST(TtSvd, ExactRankRoundTrip)
{
    Rng rng(26);
    // A = [H, S, G] with N = 3: TT ranks are at most (3, 3).
    const Index n = 3, lp = 4, k = 5, um = 4;
    const CMatrix h = complex_normal_matrix(lp, n, rng);
    const CMatrix g = complex_normal_matrix(n, um, rng);
    CTensor3 a(lp, k, um);
    for (Index b = 0; b < k; ++b) {
        Eigen::VectorXcd s(n);
        for (Index i = 0; i < n; ++i)
            s(i) = std::polar(1.0, 0.7 * static_cast<double>(i * 3 + b * 5));
        a.set_slice(b, h * s.asDiagonal() * g);
    }
    const TtCores3 c = tt_svd3(a, n, n);
    CTensor3 diff = c.reconstruct();
    diff -= a;
    EXPECT_LT(diff.frobenius_norm(), 1e-10 * a.frobenius_norm());
}

TEST(TtSvd, SeparableTensor)
{
    Rng rng(27);
    const CMatrix u = complex_normal_matrix(3, 1, rng);
    const CMatrix v = complex_normal_matrix(4, 1, rng);
    const CMatrix w = complex_normal_matrix(2, 1, rng);
    CTensor3 a(3, 4, 2);
    for (Index i = 0; i < 3; ++i)
        for (Index j = 0; j < 4; ++j)
            for (Index k = 0; k < 2; ++k)
                a(i, j, k) = u(i, 0) * v(j, 0) * w(k, 0);
    const TtCores3 c = tt_svd3(a, 1, 1);
    CTensor3 diff = c.reconstruct();
    diff -= a;
    EXPECT_LT(diff.frobenius_norm(), 1e-12 * a.frobenius_norm());
}

TEST(TtSvd, QuasiOptimality)
{
    Rng rng(28);
    const CTensor3 a = random_tensor(4, 4, 4, rng);
    const TtCores3 c = tt_svd3(a, 1, 1);
    CTensor3 diff = c.reconstruct();
    diff -= a;
    const double err = diff.frobenius_norm();
    // Best truncation error of each unfolding at rank 1.
    auto tail = [](const CMatrix& m) {
        const Eigen::VectorXd s = singular_values(m);
        return std::sqrt(s.tail(s.size() - 1).squaredNorm());
    };
    const double e1 = tail(unfold(a, 1));
    const double e2 = tail(unfold(a, 2));
    EXPECT_GE(err, std::max(e1, e2) * (1.0 - 1e-12));
    EXPECT_LE(err, std::sqrt(2.0) * std::max(e1, e2) * (1.0 + 1e-12));
    EXPECT_LE(err, std::sqrt(e1 * e1 + e2 * e2) * (1.0 + 1e-12));
}

TEST(TtSvd, FullRanksAreLossless)
{
    Rng rng(29);
    const CTensor3 a = random_tensor(3, 4, 5, rng);
    const TtCores3 c = tt_svd3(a, 3, 5);
    CTensor3 diff = c.reconstruct();
    diff -= a;
    EXPECT_LT(diff.frobenius_norm(), 1e-12 * a.frobenius_norm());
}

TEST(TtSvd, RankOutOfRange)
{
    Rng rng(30);
    const CTensor3 a = random_tensor(3, 4, 5, rng);
    EXPECT_THROW(tt_svd3(a, 0, 1), RankOutOfRange);
    EXPECT_THROW(tt_svd3(a, 4, 1), RankOutOfRange);
    EXPECT_THROW(tt_svd3(a, 2, 6), RankOutOfRange);
}
