#include "irstt/tensor.hpp"

#include "irstt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace irstt {

namespace {

void check_dims(Index d1, Index d2, Index d3)
{
    if (d1 < 1 || d2 < 1 || d3 < 1) {
        throw DimensionMismatch("tensor dims must be positive, got " + std::to_string(d1) + "x" +
                                std::to_string(d2) + "x" + std::to_string(d3));
    }
}

void check_same_dims(const CTensor3& a, const CTensor3& b, const char* what)
{
    if (a.dims() != b.dims()) {
        throw DimensionMismatch(std::string(what) + ": tensor shapes differ");
    }
}

void check_mode(int mode)
{
    if (mode < 0 || mode > 2) {
        throw DimensionMismatch("mode index out of range: " + std::to_string(mode));
    }
}

std::array<Index, 3> strides(const CTensor3& t)
{
    return {t.dim(1) * t.dim(2), t.dim(2), 1};
}

// The two modes of an order-3 tensor that are not `mode`, in order.
std::array<int, 2> others(int mode)
{
    switch (mode) {
    case 0:
        return {1, 2};
    case 1:
        return {0, 2};
    default:
        return {0, 1};
    }
}

} // namespace

CTensor3::CTensor3(Index d1, Index d2, Index d3)
    : dims_{d1, d2, d3}
{
    check_dims(d1, d2, d3);
    data_.assign(static_cast<std::size_t>(d1 * d2 * d3), cplx{0.0, 0.0});
}

CTensor3::CTensor3(Index d1, Index d2, Index d3, std::vector<cplx> entries)
    : dims_{d1, d2, d3}, data_(std::move(entries))
{
    check_dims(d1, d2, d3);
    if (static_cast<Index>(data_.size()) != d1 * d2 * d3) {
        throw DimensionMismatch("entry count does not match tensor dims");
    }
    if (!all_finite()) {
        throw NumericalFailure("tensor entries must be finite");
    }
}

CTensor3 CTensor3::constant(Index d1, Index d2, Index d3, cplx value)
{
    CTensor3 t(d1, d2, d3);
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

CMatrix CTensor3::slice(Index k) const
{
    CMatrix m(dims_[0], dims_[2]);
    for (Index i = 0; i < dims_[0]; ++i) {
        for (Index j = 0; j < dims_[2]; ++j) {
            m(i, j) = (*this)(i, k, j);
        }
    }
    return m;
}

void CTensor3::set_slice(Index k, const CMatrix& m)
{
    if (m.rows() != dims_[0] || m.cols() != dims_[2]) {
        throw DimensionMismatch("set_slice: matrix shape does not match tensor slice");
    }
    for (Index i = 0; i < dims_[0]; ++i) {
        for (Index j = 0; j < dims_[2]; ++j) {
            (*this)(i, k, j) = m(i, j);
        }
    }
}

double CTensor3::squared_norm() const
{
    double s = 0.0;
    for (const auto& z : data_) {
        s += std::norm(z);
    }
    return s;
}

double CTensor3::frobenius_norm() const
{
    return std::sqrt(squared_norm());
}

bool CTensor3::all_finite() const
{
    return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
        return std::isfinite(z.real()) && std::isfinite(z.imag());
    });
}

CTensor3 CTensor3::conj() const
{
    CTensor3 out = *this;
    for (auto& z : out.data_) {
        z = std::conj(z);
    }
    return out;
}

CTensor3& CTensor3::operator+=(const CTensor3& other)
{
    check_same_dims(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

CTensor3& CTensor3::operator-=(const CTensor3& other)
{
    check_same_dims(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= other.data_[i];
    }
    return *this;
}

CTensor3& CTensor3::operator*=(cplx alpha)
{
    for (auto& z : data_) {
        z *= alpha;
    }
    return *this;
}

double max_abs_diff(const CTensor3& a, const CTensor3& b)
{
    check_same_dims(a, b, "max_abs_diff");
    double m = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a.data()[static_cast<std::size_t>(i)] -
                                 b.data()[static_cast<std::size_t>(i)]));
    }
    return m;
}

CTensor3 as_tensor(const CMatrix& m, int unit_mode)
{
    check_mode(unit_mode);
    std::array<Index, 3> d{};
    switch (unit_mode) {
    case 0:
        d = {1, m.rows(), m.cols()};
        break;
    case 1:
        d = {m.rows(), 1, m.cols()};
        break;
    default:
        d = {m.rows(), m.cols(), 1};
        break;
    }
    CTensor3 t(d[0], d[1], d[2]);
    // Row-major order is unchanged by inserting a unit mode.
    Index idx = 0;
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            t.data()[static_cast<std::size_t>(idx++)] = m(i, j);
        }
    }
    return t;
}

CMatrix as_matrix(const CTensor3& t)
{
    for (int mode = 0; mode < 3; ++mode) {
        if (t.dim(mode) == 1) {
            const auto keep = others(mode);
            CMatrix m(t.dim(keep[0]), t.dim(keep[1]));
            Index idx = 0;
            for (Index i = 0; i < m.rows(); ++i) {
                for (Index j = 0; j < m.cols(); ++j) {
                    m(i, j) = t.data()[static_cast<std::size_t>(idx++)];
                }
            }
            return m;
        }
    }
    throw DimensionMismatch("as_matrix: tensor has no unit mode");
}

CTensor3 contract(const CTensor3& a, int mode_a, const CTensor3& b, int mode_b)
{
    check_mode(mode_a);
    check_mode(mode_b);
    const Index n = a.dim(mode_a);
    if (n != b.dim(mode_b)) {
        throw DimensionMismatch("contract: mode " + std::to_string(mode_a) + " of A has length " +
                                std::to_string(n) + " but mode " + std::to_string(mode_b) +
                                " of B has length " + std::to_string(b.dim(mode_b)));
    }
    const auto ra = others(mode_a);
    const auto rb = others(mode_b);
    const auto sa = strides(a);
    const auto sb = strides(b);

    std::vector<Index> shape{a.dim(ra[0]), a.dim(ra[1]), b.dim(rb[0]), b.dim(rb[1])};
    // Dropping unit modes leaves the row-major linear order intact.
    auto last_unit = std::find(shape.rbegin(), shape.rend(), Index{1});
    if (last_unit == shape.rend()) {
        throw DimensionMismatch("contract: result has four non-unit modes and is not an order-3 tensor");
    }
    shape.erase(std::next(last_unit).base());

    CTensor3 out(shape[0], shape[1], shape[2]);
    const cplx* pa = a.data().data();
    const cplx* pb = b.data().data();
    cplx* po = out.data().data();
    Index idx = 0;
    for (Index i0 = 0; i0 < a.dim(ra[0]); ++i0) {
        for (Index i1 = 0; i1 < a.dim(ra[1]); ++i1) {
            const Index offa = i0 * sa[static_cast<std::size_t>(ra[0])] +
                               i1 * sa[static_cast<std::size_t>(ra[1])];
            for (Index j0 = 0; j0 < b.dim(rb[0]); ++j0) {
                for (Index j1 = 0; j1 < b.dim(rb[1]); ++j1) {
                    const Index offb = j0 * sb[static_cast<std::size_t>(rb[0])] +
                                       j1 * sb[static_cast<std::size_t>(rb[1])];
                    cplx acc{0.0, 0.0};
                    for (Index k = 0; k < n; ++k) {
                        acc += pa[offa + k * sa[static_cast<std::size_t>(mode_a)]] *
                               pb[offb + k * sb[static_cast<std::size_t>(mode_b)]];
                    }
                    po[idx++] = acc;
                }
            }
        }
    }
    return out;
}

CMatrix contract_pair(const CTensor3& a, std::array<int, 2> modes_a,
                      const CTensor3& b, std::array<int, 2> modes_b)
{
    for (int m : modes_a) {
        check_mode(m);
    }
    for (int m : modes_b) {
        check_mode(m);
    }
    if (modes_a[0] == modes_a[1] || modes_b[0] == modes_b[1]) {
        throw DimensionMismatch("contract_pair: contracted modes must be distinct");
    }
    for (std::size_t q = 0; q < 2; ++q) {
        if (a.dim(modes_a[q]) != b.dim(modes_b[q])) {
            throw DimensionMismatch("contract_pair: contracted mode lengths differ");
        }
    }
    const int free_a = 3 - modes_a[0] - modes_a[1];
    const int free_b = 3 - modes_b[0] - modes_b[1];
    const auto sa = strides(a);
    const auto sb = strides(b);
    const Index n0 = a.dim(modes_a[0]);
    const Index n1 = a.dim(modes_a[1]);

    CMatrix out(a.dim(free_a), b.dim(free_b));
    const cplx* pa = a.data().data();
    const cplx* pb = b.data().data();
    for (Index i = 0; i < out.rows(); ++i) {
        for (Index j = 0; j < out.cols(); ++j) {
            cplx acc{0.0, 0.0};
            for (Index k = 0; k < n0; ++k) {
                for (Index l = 0; l < n1; ++l) {
                    acc += pa[i * sa[static_cast<std::size_t>(free_a)] +
                              k * sa[static_cast<std::size_t>(modes_a[0])] +
                              l * sa[static_cast<std::size_t>(modes_a[1])]] *
                           pb[j * sb[static_cast<std::size_t>(free_b)] +
                              k * sb[static_cast<std::size_t>(modes_b[0])] +
                              l * sb[static_cast<std::size_t>(modes_b[1])]];
                }
            }
            out(i, j) = acc;
        }
    }
    return out;
}

CMatrix unfold(const CTensor3& a, int split)
{
    const Index d1 = a.dim(0), d2 = a.dim(1), d3 = a.dim(2);
    if (split == 1) {
        CMatrix m(d1, d2 * d3);
        for (Index s1 = 0; s1 < d1; ++s1) {
            for (Index s2 = 0; s2 < d2; ++s2) {
                for (Index s3 = 0; s3 < d3; ++s3) {
                    m(s1, s2 + d2 * s3) = a(s1, s2, s3);
                }
            }
        }
        return m;
    }
    if (split == 2) {
        CMatrix m(d1 * d2, d3);
        for (Index s1 = 0; s1 < d1; ++s1) {
            for (Index s2 = 0; s2 < d2; ++s2) {
                for (Index s3 = 0; s3 < d3; ++s3) {
                    m(s1 + d1 * s2, s3) = a(s1, s2, s3);
                }
            }
        }
        return m;
    }
    throw DimensionMismatch("unfold: split must be 1 or 2");
}

CTensor3 fold(const CMatrix& m, int split, std::array<Index, 3> dims)
{
    const Index d1 = dims[0], d2 = dims[1], d3 = dims[2];
    CTensor3 a(d1, d2, d3);
    if (split == 1) {
        if (m.rows() != d1 || m.cols() != d2 * d3) {
            throw DimensionMismatch("fold: matrix shape does not match split-1 unfolding");
        }
        for (Index s1 = 0; s1 < d1; ++s1) {
            for (Index s2 = 0; s2 < d2; ++s2) {
                for (Index s3 = 0; s3 < d3; ++s3) {
                    a(s1, s2, s3) = m(s1, s2 + d2 * s3);
                }
            }
        }
        return a;
    }
    if (split == 2) {
        if (m.rows() != d1 * d2 || m.cols() != d3) {
            throw DimensionMismatch("fold: matrix shape does not match split-2 unfolding");
        }
        for (Index s1 = 0; s1 < d1; ++s1) {
            for (Index s2 = 0; s2 < d2; ++s2) {
                for (Index s3 = 0; s3 < d3; ++s3) {
                    a(s1, s2, s3) = m(s1 + d1 * s2, s3);
                }
            }
        }
        return a;
    }
    throw DimensionMismatch("fold: split must be 1 or 2");
}

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix left_unfold(const CTensor3& f)
{
    return unfold(f, 2);
}

CMatrix right_unfold(const CTensor3& f)
{
    return unfold(f, 1);
}

CTensor3 from_left_unfold(const CMatrix& m, Index r0, Index n, Index r1)
{
    return fold(m, 2, {r0, n, r1});
}

} // namespace irstt
