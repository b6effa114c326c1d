#pragma once

#include "irstt/tensor.hpp"

namespace irstt {

inline constexpr double kDefaultPinvTol = 1e-12;

struct Pseudoinverse
{
    CMatrix matrix;
    Index rank = 0;      // singular values kept
    Index full_rank = 0; // min(rows, cols)

    bool truncated() const noexcept { return rank < full_rank; }
};

// Moore-Penrose pseudoinverse via SVD. Singular values below tol * sigma_max
// are treated as zero.
Pseudoinverse pinv_detail(const CMatrix& a, double tol = kDefaultPinvTol);
CMatrix pinv(const CMatrix& a, double tol = kDefaultPinvTol);

Eigen::VectorXd singular_values(const CMatrix& a);

// Best rank-r approximation (truncated SVD).
CMatrix rank_project(const CMatrix& a, Index r);

// Cores of an order-3 tensor train: A(s1,s2,s3) = first(s1,:) middle(:,s2,:) last(:,s3).
struct TtCores3
{
    CMatrix first;   // d1 x r1
    CTensor3 middle; // r1 x d2 x r2
    CMatrix last;    // r2 x d3

    CTensor3 reconstruct() const;
};

// Sequential truncated-SVD construction of an order-3 tensor train.
TtCores3 tt_svd3(const CTensor3& a, Index r1, Index r2);

} // namespace irstt
