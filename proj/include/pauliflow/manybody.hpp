#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pauliflow/scaled.hpp"
#include "pauliflow/wavepacket.hpp"

namespace pauliflow {

/// Size limits for the combinatorial paths. All are overridable from scenario files.
struct Limits {
    std::size_t permsum_max_n = 9;
    std::size_t assignment_max = 2'000'000;
    std::size_t bruteforce_norm_max_n = 5;
    /// Node threshold on log(density) relative to the row-scaling reference.
    double epsilon_node_log = -330.0;
};

/// Ordered set of orbitals. Orbital j carries spin label packets()[j].spin and
/// is nominally paired with particle coordinate j.
class ManyBodySystem {
public:
    explicit ManyBodySystem(std::vector<GaussianPacket> packets, PhysicalConstants constants = {});

    std::size_t size() const { return packets_.size(); }
    std::size_t up_count() const { return up_orbitals_.size(); }
    std::size_t down_count() const { return down_orbitals_.size(); }

    const std::vector<GaussianPacket>& packets() const { return packets_; }
    const GaussianPacket& packet(std::size_t j) const { return packets_.at(j); }
    const PhysicalConstants& constants() const { return constants_; }

    /// Orbital indices with Up (resp. Down) labels, ascending.
    const std::vector<std::size_t>& up_orbitals() const { return up_orbitals_; }
    const std::vector<std::size_t>& down_orbitals() const { return down_orbitals_; }
    const std::vector<std::size_t>& orbitals_with(Spin spin) const;

    /// Spin labels as a per-particle tuple under the nominal pairing.
    std::vector<Spin> nominal_spins() const;

private:
    std::vector<GaussianPacket> packets_;
    PhysicalConstants constants_;
    std::vector<std::size_t> up_orbitals_;
    std::vector<std::size_t> down_orbitals_;
};

struct Configuration {
    std::vector<double> positions; // m, one per particle
    double t = 0.0;                // s

    void validate(std::size_t n) const;
};

/// Which particle coordinates carry spin Up. up_set is sorted ascending, 0-based.
struct SpinAssignment {
    std::vector<std::size_t> up_set;

    std::vector<Spin> spins(std::size_t n) const;
    bool contains(std::size_t particle) const;

    friend bool operator==(const SpinAssignment&, const SpinAssignment&) = default;
};

/// The assignment that pairs particle j with orbital j.
SpinAssignment nominal_assignment(const ManyBodySystem& sys);

/// Sign of a permutation given as the image sequence of 0..n-1.
int permutation_sign(std::span<const std::size_t> image);

/// Reference amplitude by explicit antisymmetrization:
///   (1/sqrt(N!)) sum_P sgn(P) prod_k psi_P(k)(x_k) [spin(P(k)) == spins_k]
/// over permutations in lexicographic order. Throws CapacityError for
/// N > limits.permsum_max_n. Returns zero when the Up count in `spins`
/// differs from the system's.
ScaledComplex psi_permsum(const ManyBodySystem& sys, const Configuration& conf, std::span<const Spin> spins,
                          const Limits& limits = {});

/// d/dx_particle of psi_permsum, by the same permutation sum.
ScaledComplex grad_psi_permsum(const ManyBodySystem& sys, const Configuration& conf,
                               std::span<const Spin> spins, std::size_t particle, const Limits& limits = {});

/// All C(n, n_up) assignments in lexicographic order.
std::vector<SpinAssignment> enumerate_assignments(std::size_t n, std::size_t n_up, const Limits& limits = {});

/// Sign of the permutation sending sorted up-set particles to sorted Up
/// orbitals and sorted remaining particles to sorted Down orbitals.
int assignment_sign(const ManyBodySystem& sys, const SpinAssignment& assignment);

/// Amplitude of one spin assignment as sign * (1/sqrt(N!)) * det(Up block) * det(Down block).
ScaledComplex psi_assignment(const ManyBodySystem& sys, const Configuration& conf,
                             const SpinAssignment& assignment);

/// d/dx_particle of psi_assignment.
ScaledComplex grad_psi_assignment(const ManyBodySystem& sys, const Configuration& conf,
                                  const SpinAssignment& assignment, std::size_t particle);

/// Spin-summed density sum_A |Psi_A|^2 together with the currents
/// J_i = (hbar/m) sum_A Im[conj(Psi_A) d_i Psi_A] for every particle, all on one
/// log scale. `reference_log` is 2 * sum_p max_u log|psi_u(x_p)|, the scale
/// used for node detection.
struct SpinSummedFlux {
    double log_scale = 0.0;
    double density = 0.0;
    std::vector<double> currents;
    double reference_log = 0.0;

    ScaledReal scaled_density() const { return {density, log_scale}; }
    ScaledReal scaled_current(std::size_t i) const { return {currents.at(i), log_scale}; }
    /// log(density) - reference_log; -inf at exact nodes.
    double relative_log_density() const;
};

SpinSummedFlux spin_summed_flux(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits = {});

ScaledReal density_spin_summed(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits = {});

/// Current for particle i on the same scale as density_spin_summed.
ScaledReal current_i(const ManyBodySystem& sys, const Configuration& conf, std::size_t i,
                     const Limits& limits = {});

/// det(S_up) * det(S_down) with S the orbital overlap matrix within each spin block.
double integrated_norm_det(const ManyBodySystem& sys);

/// (1/N!) sum_{P,P'} sgn(P) sgn(P') prod_k <psi_P(k)|psi_P'(k)> [same spin].
/// Throws CapacityError for N > limits.bruteforce_norm_max_n.
double integrated_norm_bruteforce(const ManyBodySystem& sys, const Limits& limits = {});

} // namespace pauliflow
