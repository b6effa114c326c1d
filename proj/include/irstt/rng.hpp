#pragma once

#include "irstt/tensor.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace irstt {

using Rng = std::mt19937_64;

// Named-stream seed derivation: the sub-seed depends on the master seed, a
// role label and a list of indices, so new streams never shift existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view role,
                          std::initializer_list<std::uint64_t> indices = {});

// Circularly-symmetric complex normal with E|z|^2 = variance
// (real and imaginary parts independent N(0, variance/2)).
cplx complex_normal(Rng& rng, double variance = 1.0);

CMatrix complex_normal_matrix(Index rows, Index cols, Rng& rng, double variance = 1.0);

} // namespace irstt
