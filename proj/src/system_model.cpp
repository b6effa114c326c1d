#include "irstt/system_model.hpp"

#include "irstt/errors.hpp"
#include "irstt/rng.hpp"

#include <cmath>
#include <numbers>

namespace irstt {

Index SystemConfig::chain_dim(Index d) const
{
    if (d == 0) {
        return um();
    }
    if (d == D + 1) {
        return lp();
    }
    if (d < 0 || d > D) {
        throw ConfigError("chain_dim: hop index out of range");
    }
    return irs_sizes.at(static_cast<std::size_t>(d - 1));
}

void SystemConfig::validate() const
{
    auto positive = [](Index v, const char* name) {
        if (v < 1) {
            throw ConfigError(std::string(name) + " must be >= 1");
        }
    };
    positive(L, "L");
    positive(P, "P");
    positive(U, "U");
    positive(M, "M");
    positive(K, "K");
    positive(T, "T");
    positive(D, "D");
    if (static_cast<Index>(irs_sizes.size()) != D) {
        throw ConfigError("irs_sizes must list one size per hop");
    }
    for (Index n : irs_sizes) {
        positive(n, "N");
    }
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
        throw ConfigError("noise_var must be finite and >= 0");
    }
}

std::string to_string(PhasePolicy p)
{
    return p == PhasePolicy::RandomUniform ? "random-uniform" : "all-on-zero-phase";
}

PhasePolicy parse_phase_policy(const std::string& s)
{
    if (s == "random-uniform") {
        return PhasePolicy::RandomUniform;
    }
    if (s == "all-on-zero-phase") {
        return PhasePolicy::AllOnZeroPhase;
    }
    throw ConfigError("unknown phase policy '" + s + "'");
}

PhaseTensor::PhaseTensor(CMatrix coefficients)
    : coeffs_(std::move(coefficients)),
      tensor_(coeffs_.rows(), coeffs_.cols(), coeffs_.rows())
{
    for (Index k = 0; k < coeffs_.cols(); ++k) {
        for (Index n = 0; n < coeffs_.rows(); ++n) {
            tensor_(n, k, n) = coeffs_(n, k);
        }
    }
}

void TTChannel::check_shapes() const
{
    const Index D = channels.hops();
    if (D < 1 || static_cast<Index>(phases.size()) != D) {
        throw DimensionMismatch("TT channel needs D >= 1 hops and one phase tensor per hop");
    }
    const auto& f = channels.factors;
    if (f[0].cols() != config.um()) {
        throw DimensionMismatch("B_0 must have UM columns");
    }
    if (f[static_cast<std::size_t>(D)].rows() != config.lp()) {
        throw DimensionMismatch("B_D must have LP rows");
    }
    for (Index d = 1; d <= D; ++d) {
        const Index n = phase(d).elements();
        if (f[static_cast<std::size_t>(d - 1)].rows() != n || f[static_cast<std::size_t>(d)].cols() != n) {
            throw DimensionMismatch("channel factors do not chain through IRS " + std::to_string(d));
        }
        if (phase(d).blocks() != config.K) {
            throw DimensionMismatch("phase tensor block count differs from K");
        }
    }
}

ChannelSet gen_channels(const SystemConfig& config, std::uint64_t seed)
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

PhaseSchedule gen_phase_schedule(const SystemConfig& config, std::uint64_t seed, PhasePolicy policy)
{
    config.validate();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, two_pi);
    PhaseSchedule sched;
    for (Index d = 1; d <= config.D; ++d) {
        const Index n = config.chain_dim(d);
        Eigen::MatrixXd amp = Eigen::MatrixXd::Ones(n, config.K);
        Eigen::MatrixXd ph(n, config.K);
        for (Index k = 0; k < config.K; ++k) {
            for (Index i = 0; i < n; ++i) {
                // [0, 2pi) mapped onto (0, 2pi]
                ph(i, k) = policy == PhasePolicy::RandomUniform ? two_pi - unif(rng) : two_pi;
            }
        }
        sched.amplitude.push_back(std::move(amp));
        sched.phase.push_back(std::move(ph));
    }
    return sched;
}

PhaseTensor build_phase_tensor(const PhaseSchedule& schedule, Index hop)
{
    if (hop < 1 || hop > schedule.hops()) {
        throw DimensionMismatch("build_phase_tensor: hop " + std::to_string(hop) + " out of range");
    }
    const auto& amp = schedule.amplitude[static_cast<std::size_t>(hop - 1)];
    const auto& ph = schedule.phase[static_cast<std::size_t>(hop - 1)];
    CMatrix coeffs(amp.rows(), amp.cols());
    for (Index k = 0; k < amp.cols(); ++k) {
        for (Index n = 0; n < amp.rows(); ++n) {
            coeffs(n, k) = amp(n, k) == 0.0 ? cplx{0.0, 0.0} : amp(n, k) * std::polar(1.0, ph(n, k));
        }
    }
    return PhaseTensor(std::move(coeffs));
}

CMatrix cascade_block(const std::vector<CMatrix>& factors, const std::vector<PhaseTensor>& phases,
                      Index k)
{
    CMatrix acc = factors.front();
    for (std::size_t d = 1; d < factors.size(); ++d) {
        if (phases[d - 1].elements() != acc.rows() || factors[d].cols() != acc.rows()) {
            throw DimensionMismatch("cascade_block: factor shapes do not chain");
        }
        acc = factors[d] * (phases[d - 1].diagonal(k).asDiagonal() * acc);
    }
    return acc;
}

CTensor3 build_ground_truth(const TTChannel& tt)
{
    tt.check_shapes();
    const SystemConfig& c = tt.config;
    CTensor3 b(c.lp(), c.K, c.um());
    for (Index k = 0; k < c.K; ++k) {
        b.set_slice(k, cascade_block(tt.channels.factors, tt.phases, k));
    }
    return b;
}

PilotKind PilotKind::parse(const std::string& s)
{
    PilotKind kind;
    auto order_of = [&](std::size_t prefix) {
        const std::string digits = s.substr(prefix);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            throw ConfigError("pilot kind '" + s + "' needs a numeric order");
        }
        return std::stoi(digits);
    };
    if (s == "gaussian" || s == "complex-gaussian") {
        kind.family = Family::ComplexGaussian;
    } else if (s == "bernoulli") {
        kind.family = Family::Bernoulli;
    } else if (s == "dft") {
        kind.family = Family::Dft;
    } else if (s.rfind("psk", 0) == 0) {
        kind.family = Family::Psk;
        kind.order = order_of(3);
        if (kind.order < 2) {
            throw ConfigError("psk order must be >= 2");
        }
    } else if (s.rfind("qam", 0) == 0) {
        kind.family = Family::Qam;
        kind.order = order_of(3);
        const int side = static_cast<int>(std::lround(std::sqrt(kind.order)));
        if (kind.order < 4 || side * side != kind.order) {
            throw ConfigError("qam order must be a perfect square >= 4");
        }
    } else {
        throw ConfigError("unknown pilot kind '" + s + "'");
    }
    return kind;
}

std::string PilotKind::name() const
{
    switch (family) {
    case Family::ComplexGaussian:
        return "gaussian";
    case Family::Bernoulli:
        return "bernoulli";
    case Family::Psk:
        return "psk" + std::to_string(order);
    case Family::Qam:
        return "qam" + std::to_string(order);
    case Family::Dft:
        return "dft";
    }
    return "unknown";
}

PilotMatrix gen_pilots(const SystemConfig& config, PilotKind kind, std::uint64_t seed)
{
    const Index um = config.um();
    const Index t = config.T;
    PilotMatrix out{CMatrix(um, t), kind};
    Rng rng(seed);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    switch (kind.family) {
    case PilotKind::Family::ComplexGaussian:
        out.X = complex_normal_matrix(um, t, rng);
        break;
    case PilotKind::Family::Bernoulli: {
        std::bernoulli_distribution coin(0.5);
        for (Index i = 0; i < um; ++i) {
            for (Index j = 0; j < t; ++j) {
                out.X(i, j) = coin(rng) ? 1.0 : -1.0;
            }
        }
        break;
    }
    case PilotKind::Family::Psk: {
        std::uniform_int_distribution<int> sym(0, kind.order - 1);
        for (Index i = 0; i < um; ++i) {
            for (Index j = 0; j < t; ++j) {
                out.X(i, j) = std::polar(1.0, two_pi * sym(rng) / kind.order);
            }
        }
        break;
    }
    case PilotKind::Family::Qam: {
        const int side = static_cast<int>(std::lround(std::sqrt(kind.order)));
        // Levels +-1, +-3, ...; average power of the square constellation is 2(M-1)/3.
        const double scale = 1.0 / std::sqrt(2.0 * (kind.order - 1) / 3.0);
        std::uniform_int_distribution<int> level(0, side - 1);
        for (Index i = 0; i < um; ++i) {
            for (Index j = 0; j < t; ++j) {
                const double re = 2.0 * level(rng) - (side - 1);
                const double im = 2.0 * level(rng) - (side - 1);
                out.X(i, j) = scale * cplx{re, im};
            }
        }
        break;
    }
    case PilotKind::Family::Dft:
        if (t < um) {
            throw ConfigError("dft pilots need T >= UM (T = " + std::to_string(t) +
                              ", UM = " + std::to_string(um) + ")");
        }
        for (Index i = 0; i < um; ++i) {
            for (Index j = 0; j < t; ++j) {
                // Reduce i*j mod T first so the angle stays exact for large T.
                const Index e = (i * j) % t;
                out.X(i, j) = std::polar(1.0, -two_pi * static_cast<double>(e) / static_cast<double>(t));
            }
        }
        break;
    }
    return out;
}

CTensor3 apply_pilots(const CTensor3& b, const CMatrix& x)
{
    if (b.dim(2) != x.rows()) {
        throw DimensionMismatch("measure: third dim of B (" + std::to_string(b.dim(2)) +
                                ") differs from pilot rows (" + std::to_string(x.rows()) + ")");
    }
    CTensor3 y(b.dim(0), b.dim(1), x.cols());
    for (Index k = 0; k < b.dim(1); ++k) {
        y.set_slice(k, b.slice(k) * x);
    }
    return y;
}

CTensor3 measure(const CTensor3& b, const PilotMatrix& x, double noise_var, std::uint64_t seed)
{
    if (!(noise_var >= 0.0)) {
        throw ConfigError("noise_var must be >= 0");
    }
    CTensor3 y = apply_pilots(b, x.X);
    if (noise_var > 0.0) {
        Rng rng(seed);
        std::normal_distribution<double> dist(0.0, std::sqrt(noise_var / 2.0));
        for (auto& z : y.data()) {
            const double re = dist(rng);
            const double im = dist(rng);
            z += cplx{re, im};
        }
    }
    return y;
}

} // namespace irstt
