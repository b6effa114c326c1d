#pragma once

#include "irstt/tensor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace irstt {

// Scenario dimensions. Hop d (1..D) is IRS d with irs_sizes[d-1] elements.
// The chain of channel dimensions is N_0 = U*M, N_1..N_D, N_{D+1} = L*P.
struct SystemConfig
{
    Index L = 10; // antennas per BS
    Index P = 1;  // number of BSs
    Index U = 1;  // number of UTs
    Index M = 10; // antennas per UT
    Index K = 10; // blocks (phase configurations)
    Index T = 100; // time slots per block
    Index D = 1;   // IRS hops
    std::vector<Index> irs_sizes{10};
    double noise_var = 1e-6;

    Index um() const noexcept { return U * M; }
    Index lp() const noexcept { return L * P; }
    // N_d for d in [0, D+1].
    Index chain_dim(Index d) const;

    // Throws ConfigError on invalid dimensions.
    void validate() const;
};

enum class PhasePolicy
{
    RandomUniform,
    AllOnZeroPhase,
};

std::string to_string(PhasePolicy p);
PhasePolicy parse_phase_policy(const std::string& s);

// Per hop and per block: on/off amplitudes in {0,1} and phases in (0, 2*pi].
struct PhaseSchedule
{
    // amplitude[d-1](n, k), phase[d-1](n, k) for hop d.
    std::vector<Eigen::MatrixXd> amplitude;
    std::vector<Eigen::MatrixXd> phase;

    Index hops() const noexcept { return static_cast<Index>(amplitude.size()); }
};

// S_d of dims N_d x K x N_d with diagonal lateral slices.
class PhaseTensor
{
public:
    PhaseTensor() = default;
    // coefficients(n, k) = s_n(k) e^{j phi_n(k)}
    explicit PhaseTensor(CMatrix coefficients);

    Index elements() const noexcept { return coeffs_.rows(); }
    Index blocks() const noexcept { return coeffs_.cols(); }
    // Diagonal of S(:, k, :).
    auto diagonal(Index k) const { return coeffs_.col(k); }
    const CMatrix& coefficients() const noexcept { return coeffs_; }
    // Dense N x K x N tensor.
    const CTensor3& tensor() const noexcept { return tensor_; }

private:
    CMatrix coeffs_;
    CTensor3 tensor_;
};

// factors[d] is B_d: B_0 is N_1 x UM, B_d is N_{d+1} x N_d, B_D is LP x N_D.
// For a single hop, H = B_1 and G = B_0.
struct ChannelSet
{
    std::vector<CMatrix> factors;

    Index hops() const noexcept { return static_cast<Index>(factors.size()) - 1; }
    const CMatrix& h() const { return factors.at(1); }
    const CMatrix& g() const { return factors.at(0); }
};

struct PilotKind
{
    enum class Family
    {
        ComplexGaussian,
        Bernoulli,
        Psk,
        Qam,
        Dft,
    };

    Family family = Family::ComplexGaussian;
    int order = 0; // constellation size for PSK / QAM

    // Accepts gaussian, bernoulli, dft, pskN, qamN (e.g. psk8, qam16).
    static PilotKind parse(const std::string& s);
    std::string name() const;
};

struct PilotMatrix
{
    CMatrix X; // UM x T
    PilotKind kind;
};

// A point of the TT channel set: unknown channels plus known phases.
struct TTChannel
{
    ChannelSet channels;
    std::vector<PhaseTensor> phases; // phases[d-1] is S_d
    SystemConfig config;

    const PhaseTensor& phase(Index hop) const { return phases.at(static_cast<std::size_t>(hop - 1)); }
    // Throws DimensionMismatch unless the factor shapes chain to LP x UM.
    void check_shapes() const;
};

// Each factor iid CN(0,1), then scaled to unit Frobenius norm.
ChannelSet gen_channels(const SystemConfig& config, std::uint64_t seed);

PhaseSchedule gen_phase_schedule(const SystemConfig& config, std::uint64_t seed, PhasePolicy policy);

PhaseTensor build_phase_tensor(const PhaseSchedule& schedule, Index hop);

// Per-block cascade B_D S_D(k) B_{D-1} ... S_1(k) B_0 (LP x UM).
CMatrix cascade_block(const std::vector<CMatrix>& factors, const std::vector<PhaseTensor>& phases,
                      Index k);

// B(p,k,m) = [B_D S_D(k) ... S_1(k) B_0](p,m), evaluated block by block.
CTensor3 build_ground_truth(const TTChannel& tt);

PilotMatrix gen_pilots(const SystemConfig& config, PilotKind kind, std::uint64_t seed);

// Y = B x_3^1 X + W with W iid CN(0, noise_var).
CTensor3 measure(const CTensor3& b, const PilotMatrix& x, double noise_var, std::uint64_t seed);
// Noise-free forward operator.
CTensor3 apply_pilots(const CTensor3& b, const CMatrix& x);

} // namespace irstt
