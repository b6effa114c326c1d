#pragma once

#include "irstt/rng.hpp"
#include "irstt/tensor.hpp"

#include <cmath>

namespace irstt::test {

inline CTensor3 random_tensor(Index d1, Index d2, Index d3, Rng& rng)
{
    CTensor3 t(d1, d2, d3);
    for (auto& z : t.data()) {
        z = complex_normal(rng);
    }
    return t;
}

inline double max_abs(const CMatrix& a, const CMatrix& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

inline double rel_diff(const CMatrix& a, const CMatrix& b)
{
    return (a - b).norm() / std::max(b.norm(), 1e-300);
}

} // namespace irstt::test
