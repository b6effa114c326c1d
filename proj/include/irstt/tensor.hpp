#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace irstt {

using cplx = std::complex<double>;
using Index = Eigen::Index;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Dense order-3 complex tensor.
//
// Entries are stored row-major over (s1, s2, s3): the last mode is contiguous.
// std::complex<double> guarantees interleaved (re, im) storage, so the whole
// tensor is one contiguous buffer of 2*d1*d2*d3 doubles.
//
// Mode indices in this library are 0-based: mode 0, 1, 2 correspond to the
// first, second and third mode in the usual 1-based notation.
class CTensor3
{
public:
    CTensor3() = default;
    CTensor3(Index d1, Index d2, Index d3);
    CTensor3(Index d1, Index d2, Index d3, std::vector<cplx> entries);

    static CTensor3 constant(Index d1, Index d2, Index d3, cplx value);

    Index dim(int mode) const { return dims_[static_cast<std::size_t>(mode)]; }
    const std::array<Index, 3>& dims() const noexcept { return dims_; }
    Index size() const noexcept { return static_cast<Index>(data_.size()); }
    bool empty() const noexcept { return data_.empty(); }

    cplx& operator()(Index i, Index j, Index k)
    {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }
    const cplx& operator()(Index i, Index j, Index k) const
    {
        return data_[static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k)];
    }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }

    // Lateral slice A(:, k, :) as a d1 x d3 matrix.
    CMatrix slice(Index k) const;
    void set_slice(Index k, const CMatrix& m);

    double squared_norm() const;
    double frobenius_norm() const;
    bool all_finite() const;

    CTensor3 conj() const;

    CTensor3& operator+=(const CTensor3& other);
    CTensor3& operator-=(const CTensor3& other);
    CTensor3& operator*=(cplx alpha);

    friend CTensor3 operator+(CTensor3 a, const CTensor3& b) { return a += b; }
    friend CTensor3 operator-(CTensor3 a, const CTensor3& b) { return a -= b; }
    friend CTensor3 operator*(cplx alpha, CTensor3 a) { return a *= alpha; }

    bool operator==(const CTensor3& other) const = default;

private:
    std::array<Index, 3> dims_{0, 0, 0};
    std::vector<cplx> data_;
};

// Largest entrywise modulus of a - b. Shapes must agree.
double max_abs_diff(const CTensor3& a, const CTensor3& b);

// Matrix <-> tensor with one unit mode. as_tensor places the unit mode at
// `unit_mode` (default: the middle, giving rows x 1 x cols).
CTensor3 as_tensor(const CMatrix& m, int unit_mode = 1);
// Squeezes the first unit mode; throws DimensionMismatch when there is none.
CMatrix as_matrix(const CTensor3& t);

// A x_i^j B: sums mode i of A against mode j of B. The result lists A's
// remaining modes followed by B's remaining modes; when that would give four
// modes the last unit mode is dropped, and when it gives fewer than three
// trailing unit modes are appended.
CTensor3 contract(const CTensor3& a, int mode_a, const CTensor3& b, int mode_b);

// A x_{i1,i2}^{j1,j2} B: contracts two mode pairs at once. Entry (a, b) sums
// A(..a..) B(..b..) over both shared indices.
CMatrix contract_pair(const CTensor3& a, std::array<int, 2> modes_a,
                      const CTensor3& b, std::array<int, 2> modes_b);

// split = 1: d1 x (d2*d3) with column s2 + d2*s3.
// split = 2: (d1*d2) x d3 with row s1 + d1*s2.
CMatrix unfold(const CTensor3& a, int split);
// Inverse of unfold for the given target dims.
CTensor3 fold(const CMatrix& m, int split, std::array<Index, 3> dims);

// Standard Kronecker product: (A kron B)(i*rb + k, j*cb + l) = A(i,j) B(k,l).
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Unfoldings of a TT core F of dims r0 x n x r1.
//
// left_unfold stacks the slices F(:,s,:) vertically: row a + r0*s, column b.
// right_unfold places slice index fastest: row a, column s + n*b. Together with
// kron above these give unfold(B,1) = H R(S) (G kron I_K) and
// unfold(B,2) = (I_K kron H) L(S) G for B = [H, S, G].
CMatrix left_unfold(const CTensor3& f);
CMatrix right_unfold(const CTensor3& f);
CTensor3 from_left_unfold(const CMatrix& m, Index r0, Index n, Index r1);

} // namespace irstt
