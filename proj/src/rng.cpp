#include "irstt/rng.hpp"

#include <cmath>

namespace irstt {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view role,
                          std::initializer_list<std::uint64_t> indices)
{
    std::uint64_t h = splitmix64(master ^ splitmix64(fnv1a(role)));
    for (std::uint64_t i : indices) {
        h = splitmix64(h ^ splitmix64(i + 0x632be59bd9b4e019ULL));
    }
    return h;
}

cplx complex_normal(Rng& rng, double variance)
{
    if (variance <= 0.0) {
        return {0.0, 0.0};
    }
    std::normal_distribution<double> dist(0.0, std::sqrt(variance / 2.0));
    const double re = dist(rng);
    const double im = dist(rng);
    return {re, im};
}

CMatrix complex_normal_matrix(Index rows, Index cols, Rng& rng, double variance)
{
    if (variance <= 0.0) {
        return CMatrix::Zero(rows, cols);
    }
    std::normal_distribution<double> dist(0.0, std::sqrt(variance / 2.0));
    CMatrix m(rows, cols);
    // Row-by-row draw order keeps the stream layout independent of Eigen's storage.
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) {
            const double re = dist(rng);
            const double im = dist(rng);
            m(i, j) = cplx{re, im};
        }
    }
    return m;
}

} // namespace irstt
