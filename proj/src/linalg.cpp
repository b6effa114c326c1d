#include "irstt/linalg.hpp"

#include "irstt/errors.hpp"

#include <string>

namespace irstt {

namespace {

using Svd = Eigen::BDCSVD<CMatrix>;

Svd thin_svd(const CMatrix& a)
{
    if (a.size() == 0) {
        throw DimensionMismatch("SVD of an empty matrix");
    }
    Svd svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalFailure("SVD did not converge");
    }
    return svd;
}

} // namespace

Pseudoinverse pinv_detail(const CMatrix& a, double tol)
{
    const Svd svd = thin_svd(a);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double cutoff = tol * (sv.size() > 0 ? sv(0) : 0.0);

    Pseudoinverse out;
    out.full_rank = sv.size();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff && sv(i) > 0.0) {
            inv(i) = 1.0 / sv(i);
            ++out.rank;
        }
    }
    out.matrix = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    return out;
}

CMatrix pinv(const CMatrix& a, double tol)
{
    return pinv_detail(a, tol).matrix;
}

Eigen::VectorXd singular_values(const CMatrix& a)
{
    if (a.size() == 0) {
        throw DimensionMismatch("singular values of an empty matrix");
    }
    Svd svd(a);
    if (svd.info() != Eigen::Success) {
        throw NumericalFailure("SVD did not converge");
    }
    return svd.singularValues();
}

CMatrix rank_project(const CMatrix& a, Index r)
{
    const Index full = std::min(a.rows(), a.cols());
    if (r < 1 || r > full) {
        throw RankOutOfRange("rank_project: rank " + std::to_string(r) + " outside [1, " +
                             std::to_string(full) + "]");
    }
    const Svd svd = thin_svd(a);
    return svd.matrixU().leftCols(r) * svd.singularValues().head(r).asDiagonal() *
           svd.matrixV().leftCols(r).adjoint();
}

CTensor3 TtCores3::reconstruct() const
{
    const Index d1 = first.rows();
    const Index d2 = middle.dim(1);
    const Index d3 = last.cols();
    // (d1 x r1) * R(middle) -> d1 x (d2*r2), then fold against last.
    const CMatrix left = first * right_unfold(middle);
    CTensor3 out(d1, d2, d3);
    const Index r2 = middle.dim(2);
    for (Index s2 = 0; s2 < d2; ++s2) {
        CMatrix block(d1, r2);
        for (Index b = 0; b < r2; ++b) {
            block.col(b) = left.col(s2 + d2 * b);
        }
        out.set_slice(s2, block * last);
    }
    return out;
}

TtCores3 tt_svd3(const CTensor3& a, Index r1, Index r2)
{
    const Index d1 = a.dim(0), d2 = a.dim(1), d3 = a.dim(2);
    if (r1 < 1 || r1 > std::min(d1, d2 * d3)) {
        throw RankOutOfRange("tt_svd3: r1 = " + std::to_string(r1) + " out of range");
    }
    if (r2 < 1 || r2 > std::min(d1 * d2, d3)) {
        throw RankOutOfRange("tt_svd3: r2 = " + std::to_string(r2) + " out of range");
    }

    TtCores3 cores;
    const Svd svd1 = thin_svd(unfold(a, 1));
    if (svd1.singularValues().size() < r1) {
        throw RankOutOfRange("tt_svd3: r1 exceeds the first unfolding rank bound");
    }
    cores.first = svd1.matrixU().leftCols(r1);
    const CMatrix rest = svd1.singularValues().head(r1).asDiagonal() *
                         svd1.matrixV().leftCols(r1).adjoint(); // r1 x (d2*d3)
    const CTensor3 residual = fold(rest, 1, {r1, d2, d3});

    const CMatrix m2 = unfold(residual, 2); // (r1*d2) x d3
    if (r2 > std::min(m2.rows(), m2.cols())) {
        throw RankOutOfRange("tt_svd3: r2 exceeds the second unfolding rank bound");
    }
    const Svd svd2 = thin_svd(m2);
    cores.middle = from_left_unfold(svd2.matrixU().leftCols(r2), r1, d2, r2);
    cores.last = svd2.singularValues().head(r2).asDiagonal() * svd2.matrixV().leftCols(r2).adjoint();
    return cores;
}

} // namespace irstt
