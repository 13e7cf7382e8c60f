#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "pauliflow/manybody.hpp"

namespace pauliflow {

/// Seeded generator whose draws are identical on every platform
/// (std::uniform_real_distribution is implementation defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi);
    /// Uniform in {0, ..., n-1}.
    std::size_t index(std::size_t n);
    bool coin() { return index(2) == 1; }

private:
    std::mt19937_64 engine_;
};

/// Random well-conditioned system: n packets with sigma near `sigma`, centres
/// within +-n sigma, wave vectors within +-2/sigma, random spins.
ManyBodySystem random_system(Rng& rng, std::size_t n, double sigma = 10e-9);

/// Particle coordinates spread over the packets' support.
Configuration random_configuration(Rng& rng, const ManyBodySystem& sys, double t = 0.0);

/// Spin-summed density and current of particle i by summing |psi_permsum|^2
/// and Im[conj(psi) d_i psi] over all 2^N spin tuples (including those with
/// zero amplitude). Values are relative to exp(log_scale).
struct TupleOracle {
    double log_scale = 0.0;
    double density = 0.0;
    double current = 0.0;
};
TupleOracle tuple_oracle(const ManyBodySystem& sys, const Configuration& conf, std::size_t i,
                         const Limits& limits = {});

struct SuiteReport {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    double max_error = 0.0;
    double tolerance = 0.0;

    bool passed() const { return failures == 0 && checks > 0; }
};

// Each suite is deterministic for a given seed.
SuiteReport oracle_equivalence_suite(std::uint64_t seed, std::size_t systems);
SuiteReport spin_summed_suite(std::uint64_t seed, std::size_t systems);
SuiteReport norm_collapse_suite(std::uint64_t seed, std::size_t systems);
SuiteReport antisymmetry_suite(std::uint64_t seed, std::size_t systems);
SuiteReport pauli_suite(std::uint64_t seed, std::size_t systems);
SuiteReport gradient_suite(std::uint64_t seed, std::size_t samples);
SuiteReport same_spin_consistency_suite(std::uint64_t seed, std::size_t systems);
SuiteReport decomposition_suite(std::uint64_t seed, std::size_t systems);

/// Every suite above with the default sample counts.
std::vector<SuiteReport> run_validation(std::uint64_t seed = 20090601);

/// One line per suite: "<name> PASS checks=... max_error=... tolerance=...".
void print_reports(std::ostream& out, const std::vector<SuiteReport>& reports);

} // namespace pauliflow
