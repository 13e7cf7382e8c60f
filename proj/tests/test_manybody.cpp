#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <vector>

#include "pauliflow/constants.hpp"
#include "pauliflow/errors.hpp"
#include "pauliflow/manybody.hpp"
#include "pauliflow/validation.hpp"
#include "support/oracles.hpp"

using namespace pauliflow;

namespace {

constexpr double kSigma = 10.0 * kNanometre;
const PhysicalConstants kElectron{};

// Plain double-precision permutation sum written directly from the definition,
// sharing nothing with the library besides eval().
std::complex<double> naive_psi(const ManyBodySystem& sys, const Configuration& conf, const std::vector<Spin>& spins)
{
    const std::size_t n = sys.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::complex<double> total = 0.0;
    do {
        std::complex<double> term = 1.0;
        for (std::size_t k = 0; k < n && term != 0.0; ++k) {
            const auto& orbital = sys.packet(perm[k]);
            term = orbital.spin == spins[k] ? term * eval(orbital, conf.positions[k], conf.t, kElectron) : 0.0;
        }
        int inversions = 0;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                inversions += perm[a] > perm[b];
            }
        }
        total += (inversions % 2 == 0 ? 1.0 : -1.0) * term;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return total / std::sqrt(std::tgamma(static_cast<double>(n) + 1.0));
}

Configuration at(std::vector<double> positions, double t = 0.0)
{
    return Configuration{std::move(positions), t};
}

double relative(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(a), std::abs(b));
}

} // namespace

TEST(ManyBody, SystemCountsSpins)
{
    const ManyBodySystem sys({{0, 0, kSigma, Spin::Down}, {0, 0, kSigma, Spin::Up}, {0, 0, kSigma, Spin::Down}});
    EXPECT_EQ(sys.up_count(), 1u);
    EXPECT_EQ(sys.down_count(), 2u);
    EXPECT_EQ(sys.up_orbitals(), std::vector<std::size_t>{1});
    EXPECT_EQ(sys.down_orbitals(), (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(nominal_assignment(sys).up_set, std::vector<std::size_t>{1});
    EXPECT_THROW(ManyBodySystem({}), DomainError);
}

TEST(ManyBody, PermutationSign)
{
    const std::vector<std::size_t> identity{0, 1, 2, 3};
    const std::vector<std::size_t> swap{1, 0, 2, 3};
    const std::vector<std::size_t> cycle{1, 2, 0, 3};
    EXPECT_EQ(permutation_sign(identity), 1);
    EXPECT_EQ(permutation_sign(swap), -1);
    EXPECT_EQ(permutation_sign(cycle), 1);
}

TEST(ManyBody, PermsumSingleParticle)
{
    const GaussianPacket packet{2 * kNanometre, 0.4 / kNanometre, kSigma, Spin::Up};
    const ManyBodySystem sys({packet});
    const auto conf = at({7 * kNanometre});
    const std::vector<Spin> up{Spin::Up};
    const std::vector<Spin> down{Spin::Down};
    const auto value = psi_permsum(sys, conf, up).to_complex();
    EXPECT_LT(std::abs(value - eval(packet, 7 * kNanometre, 0.0, kElectron)), 1e-14 * std::abs(value));
    EXPECT_TRUE(psi_permsum(sys, conf, down).is_zero());
}

TEST(ManyBody, PermsumOppositeSpinPair)
{
    const GaussianPacket a{0, 0.3 / kNanometre, kSigma, Spin::Up};
    const GaussianPacket b{15 * kNanometre, -0.2 / kNanometre, kSigma, Spin::Down};
    const ManyBodySystem sys({a, b});
    const auto conf = at({3 * kNanometre, 11 * kNanometre});
    const std::vector<Spin> spins{Spin::Up, Spin::Down};
    const auto expected = eval(a, 3 * kNanometre, 0, kElectron) * eval(b, 11 * kNanometre, 0, kElectron)
                          / std::numbers::sqrt2;
    const auto value = psi_permsum(sys, conf, spins).to_complex();
    EXPECT_LT(std::abs(value - expected), 1e-14 * std::abs(expected));
}

TEST(ManyBody, PermsumVanishesForIdenticalSameSpinOrbitals)
{
    const GaussianPacket a{4 * kNanometre, 0.1 / kNanometre, kSigma, Spin::Up};
    const ManyBodySystem sys({a, a});
    const std::vector<Spin> spins{Spin::Up, Spin::Up};
    Rng rng(3);
    for (int sample = 0; sample < 50; ++sample) {
        const auto conf = at({rng.uniform(-30, 30) * kNanometre, rng.uniform(-30, 30) * kNanometre});
        const double scale = std::abs(eval(a, conf.positions[0], 0, kElectron) * eval(a, conf.positions[1], 0, kElectron));
        const auto value = psi_permsum(sys, conf, spins);
        EXPECT_TRUE(value.is_zero() || std::exp(value.log_magnitude) <= 1e-14 * scale);
    }
}

TEST(ManyBody, PermsumMatchesNaiveSum)
{
    Rng rng(12);
    for (std::size_t n = 1; n <= 5; ++n) {
        for (int sample = 0; sample < 10; ++sample) {
            const ManyBodySystem sys = random_system(rng, n);
            const Configuration conf = random_configuration(rng, sys, rng.uniform(0, 1e-13));
            std::vector<Spin> spins = sys.nominal_spins();
            std::shuffle(spins.begin(), spins.end(), std::mt19937_64(rng.index(1000)));
            const auto naive = naive_psi(sys, conf, spins);
            const auto value = psi_permsum(sys, conf, spins);
            if (naive == 0.0) {
                EXPECT_TRUE(value.is_zero() || value.log_magnitude < -600);
                continue;
            }
            EXPECT_LT(relative_difference(value, ScaledComplex::from_complex(naive)), 1e-12) << "n=" << n;
        }
    }
}

TEST(ManyBody, PermsumSpinMismatchIsZeroAndLimitIsEnforced)
{
    const ManyBodySystem sys({{0, 0, kSigma, Spin::Up}, {9e-9, 0, kSigma, Spin::Down}});
    const std::vector<Spin> both_up{Spin::Up, Spin::Up};
    EXPECT_TRUE(psi_permsum(sys, at({0, 1e-9}), both_up).is_zero());

    std::vector<GaussianPacket> many;
    for (int j = 0; j < 10; ++j) {
        many.push_back({j * kSigma, 0, kSigma, Spin::Up});
    }
    const ManyBodySystem big(many);
    const std::vector<Spin> spins(10, Spin::Up);
    EXPECT_THROW(psi_permsum(big, at(std::vector<double>(10, 0.0)), spins), CapacityError);
    Limits relaxed;
    relaxed.permsum_max_n = 10;
    EXPECT_NO_THROW(psi_permsum(big, at(std::vector<double>(10, 0.0)), spins, relaxed));
}

TEST(ManyBody, EnumerateAssignments)
{
    EXPECT_EQ(enumerate_assignments(5, 3).size(), 10u);
    const auto all_up = enumerate_assignments(4, 4);
    ASSERT_EQ(all_up.size(), 1u);
    EXPECT_EQ(all_up[0].up_set, (std::vector<std::size_t>{0, 1, 2, 3}));
    const auto four_two = enumerate_assignments(4, 2);
    ASSERT_EQ(four_two.size(), 6u);
    EXPECT_EQ(four_two.front().up_set, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(four_two.back().up_set, (std::vector<std::size_t>{2, 3}));
    EXPECT_TRUE(std::is_sorted(four_two.begin(), four_two.end(),
                               [](const auto& a, const auto& b) { return a.up_set < b.up_set; }));
    EXPECT_EQ(enumerate_assignments(3, 0).size(), 1u);
    EXPECT_THROW(enumerate_assignments(3, 4), DomainError);

    Limits tight;
    tight.assignment_max = 9;
    EXPECT_THROW(enumerate_assignments(5, 3, tight), CapacityError);
}

TEST(ManyBody, AllUpAssignmentIsOneDeterminant)
{
    Rng rng(8);
    std::vector<GaussianPacket> packets;
    for (int j = 0; j < 4; ++j) {
        packets.push_back({rng.uniform(-20, 20) * kNanometre, rng.uniform(-0.2, 0.2) / kNanometre, kSigma, Spin::Up});
    }
    const ManyBodySystem sys(packets);
    const auto conf = random_configuration(rng, sys);
    const auto value = psi_assignment(sys, conf, SpinAssignment{{0, 1, 2, 3}});
    const auto naive = naive_psi(sys, conf, sys.nominal_spins());
    EXPECT_LT(relative_difference(value, ScaledComplex::from_complex(naive)), 1e-12);
}

TEST(ManyBody, SwappedAssignmentCarriesSign)
{
    const GaussianPacket a{0, 0.3 / kNanometre, kSigma, Spin::Up};
    const GaussianPacket b{15 * kNanometre, -0.2 / kNanometre, kSigma, Spin::Down};
    const ManyBodySystem sys({a, b});
    const auto conf = at({3 * kNanometre, 11 * kNanometre});
    const SpinAssignment second_up{{1}};
    EXPECT_EQ(assignment_sign(sys, second_up), -1);
    EXPECT_EQ(assignment_sign(sys, nominal_assignment(sys)), 1);
    const auto expected
        = -eval(a, 11 * kNanometre, 0, kElectron) * eval(b, 3 * kNanometre, 0, kElectron) / std::numbers::sqrt2;
    const auto value = psi_assignment(sys, conf, second_up).to_complex();
    EXPECT_LT(std::abs(value - expected), 1e-14 * std::abs(expected));
    const std::vector<Spin> spins{Spin::Down, Spin::Up};
    EXPECT_LT(relative_difference(psi_assignment(sys, conf, second_up), psi_permsum(sys, conf, spins)), 1e-14);
}

TEST(ManyBody, AssignmentMatchesPermsum)
{
    Rng rng(1234);
    for (int sample = 0; sample < 120; ++sample) {
        const std::size_t n = 1 + rng.index(6);
        const ManyBodySystem sys = random_system(rng, n);
        const Configuration conf = random_configuration(rng, sys, rng.uniform(0, 2e-13));
        for (const auto& assignment : enumerate_assignments(n, sys.up_count())) {
            const auto spins = assignment.spins(n);
            const auto fast = psi_assignment(sys, conf, assignment);
            const auto reference = psi_permsum(sys, conf, spins);
            EXPECT_LT(std::abs(fast.log_magnitude - reference.log_magnitude),
                      1e-10 * std::max(1.0, std::abs(reference.log_magnitude)));
            EXPECT_LT(std::abs(std::remainder(fast.phase - reference.phase, 2 * std::numbers::pi)), 1e-10);
        }
    }
}

TEST(ManyBody, GradientSingleParticleIsDdx)
{
    const GaussianPacket packet{2 * kNanometre, 0.4 / kNanometre, kSigma, Spin::Down};
    const ManyBodySystem sys({packet});
    const auto conf = at({-4 * kNanometre}, 3e-14);
    const auto value = grad_psi_assignment(sys, conf, nominal_assignment(sys), 0).to_complex();
    const auto expected = ddx(packet, -4 * kNanometre, 3e-14, kElectron);
    EXPECT_LT(std::abs(value - expected), 1e-14 * std::abs(expected));
}

TEST(ManyBody, GradientMatchesFiniteDifferences)
{
    Rng rng(55);
    for (int sample = 0; sample < 100; ++sample) {
        const std::size_t n = 1 + rng.index(5);
        const ManyBodySystem sys = random_system(rng, n);
        const Configuration conf = random_configuration(rng, sys, rng.uniform(0, 1e-13));
        const auto assignments = enumerate_assignments(n, sys.up_count());
        const auto& assignment = assignments[rng.index(assignments.size())];
        const std::size_t i = rng.index(n);
        const double h = 1e-6 * sys.packet(i).sigma;
        const auto shifted = [&](double dx) {
            Configuration moved = conf;
            moved.positions[i] += dx;
            return psi_assignment(sys, moved, assignment).to_complex();
        };
        const auto fd = (shifted(h) - shifted(-h)) / (2 * h);
        const auto analytic = grad_psi_assignment(sys, conf, assignment, i).to_complex();
        const double scale = std::abs(analytic) + std::abs(shifted(0)) / sys.packet(i).sigma;
        if (scale == 0.0) {
            continue;
        }
        EXPECT_LT(std::abs(fd - analytic) / scale, 1e-6);
    }
}

TEST(ManyBody, UpGradientIgnoresDownOrbitals)
{
    std::vector<GaussianPacket> packets{{0, 0.1 / kNanometre, kSigma, Spin::Up},
                                        {12 * kNanometre, 0, kSigma, Spin::Up},
                                        {-5 * kNanometre, 0.2 / kNanometre, kSigma, Spin::Down}};
    const auto conf = at({1 * kNanometre, 10 * kNanometre, -3 * kNanometre});
    const auto assignment = nominal_assignment(ManyBodySystem(packets));
    const auto before = grad_psi_assignment(ManyBodySystem(packets), conf, assignment, 0)
                        / psi_assignment(ManyBodySystem(packets), conf, assignment);
    packets[2].x0 += 7 * kNanometre;
    packets[2].k0 *= -3;
    const auto after = grad_psi_assignment(ManyBodySystem(packets), conf, assignment, 0)
                       / psi_assignment(ManyBodySystem(packets), conf, assignment);
    EXPECT_LT(relative_difference(before, after), 1e-13);
}

TEST(ManyBody, DensityAndCurrentSingleParticle)
{
    const GaussianPacket packet{2 * kNanometre, 0.4 / kNanometre, kSigma, Spin::Up};
    const ManyBodySystem sys({packet});
    for (double x : {-20e-9, 0.0, 2e-9, 31e-9}) {
        const auto conf = at({x});
        const double rho = std::norm(eval(packet, x, 0, kElectron));
        EXPECT_NEAR(density_spin_summed(sys, conf).value() / rho, 1.0, 1e-13);
        const double j = current_i(sys, conf, 0).value();
        EXPECT_NEAR(j / (kElectron.hbar * packet.k0 / kElectron.mass * rho), 1.0, 1e-13);
    }
}

TEST(ManyBody, AllSameSpinDensityIsSingleTerm)
{
    Rng rng(21);
    std::vector<GaussianPacket> packets;
    for (int j = 0; j < 4; ++j) {
        packets.push_back({rng.uniform(-20, 20) * kNanometre, rng.uniform(-0.2, 0.2) / kNanometre, kSigma, Spin::Down});
    }
    const ManyBodySystem sys(packets);
    const auto conf = random_configuration(rng, sys);
    const auto amplitude = psi_assignment(sys, conf, SpinAssignment{});
    const double expected_log = 2 * amplitude.log_magnitude;
    EXPECT_NEAR(density_spin_summed(sys, conf).log_abs(), expected_log, 1e-12 * std::abs(expected_log));
}

TEST(ManyBody, RealWaveFunctionCarriesNoCurrent)
{
    Rng rng(4);
    std::vector<GaussianPacket> packets;
    for (int j = 0; j < 4; ++j) {
        packets.push_back({rng.uniform(-20, 20) * kNanometre, 0.0, kSigma, j % 2 == 0 ? Spin::Up : Spin::Down});
    }
    const ManyBodySystem sys(packets);
    const auto conf = random_configuration(rng, sys);
    const auto flux = spin_summed_flux(sys, conf);
    const double scale = flux.density * kElectron.hbar / (kElectron.mass * kSigma);
    for (double j : flux.currents) {
        EXPECT_LE(std::abs(j), 1e-13 * scale);
    }
}

TEST(ManyBody, DensityAndCurrentMatchTupleSums)
{
    // Independent oracle: explicit sum over all 2^N spin tuples of the naive amplitude.
    Rng rng(909);
    for (int sample = 0; sample < 40; ++sample) {
        const std::size_t n = 1 + rng.index(5);
        const ManyBodySystem sys = random_system(rng, n);
        const Configuration conf = random_configuration(rng, sys);
        const std::size_t i = rng.index(n);
        const double h = 1e-5 * sys.packet(i).sigma;
        double rho = 0.0;
        double current = 0.0;
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
            std::vector<Spin> spins(n);
            for (std::size_t k = 0; k < n; ++k) {
                spins[k] = (mask >> k) & 1 ? Spin::Up : Spin::Down;
            }
            const auto psi = naive_psi(sys, conf, spins);
            Configuration plus = conf;
            Configuration minus = conf;
            plus.positions[i] += h;
            minus.positions[i] -= h;
            // Five-point stencil keeps the oracle's truncation error far below 1e-9.
            Configuration plus2 = conf;
            Configuration minus2 = conf;
            plus2.positions[i] += 2 * h;
            minus2.positions[i] -= 2 * h;
            const auto grad = (8.0 * (naive_psi(sys, plus, spins) - naive_psi(sys, minus, spins))
                               - (naive_psi(sys, plus2, spins) - naive_psi(sys, minus2, spins)))
                              / (12 * h);
            rho += std::norm(psi);
            current += kElectron.hbar / kElectron.mass * std::imag(std::conj(psi) * grad);
        }
        if (rho < 1e-250) {
            continue;
        }
        const double fast_rho = density_spin_summed(sys, conf).value();
        const double fast_current = current_i(sys, conf, i).value();
        EXPECT_LT(relative(fast_rho, rho), 1e-10);
        const double velocity_scale = kElectron.hbar / (kElectron.mass * sys.packet(i).sigma);
        EXPECT_LT(std::abs(fast_current - current) / (std::abs(current) + rho * velocity_scale), 1e-8);
    }
}

TEST(ManyBody, FluxMatchesLibraryTupleOracle)
{
    Rng rng(31);
    for (int sample = 0; sample < 50; ++sample) {
        const std::size_t n = 1 + rng.index(6);
        const ManyBodySystem sys = random_system(rng, n);
        const Configuration conf = random_configuration(rng, sys, rng.uniform(0, 1e-13));
        const auto flux = spin_summed_flux(sys, conf);
        for (std::size_t i = 0; i < n; ++i) {
            const auto oracle = tuple_oracle(sys, conf, i);
            const double rho_fast = flux.scaled_density().log_abs();
            const double rho_oracle = std::log(oracle.density) + oracle.log_scale;
            EXPECT_LT(std::abs(rho_fast - rho_oracle), 1e-10);
            const double v_fast = flux.currents[i] / flux.density;
            const double v_oracle = oracle.current / oracle.density;
            const double v_scale = kElectron.hbar / (kElectron.mass * sys.packet(i).sigma);
            EXPECT_LT(std::abs(v_fast - v_oracle) / (std::abs(v_oracle) + v_scale), 1e-9);
        }
    }
}

TEST(ManyBody, ScaledPathAgreesWithUnscaledDensity)
{
    // Far-separated packets: entries around exp(-200) still fit in a double,
    // so the naive sum is a valid reference.
    std::vector<GaussianPacket> packets{{0, 0.1 / kNanometre, kSigma, Spin::Up},
                                        {50 * kNanometre, 0, kSigma, Spin::Down},
                                        {100 * kNanometre, -0.1 / kNanometre, kSigma, Spin::Up}};
    const ManyBodySystem sys(packets);
    const auto conf = at({20 * kNanometre, 80 * kNanometre, 40 * kNanometre});
    double rho = 0.0;
    for (const auto& assignment : enumerate_assignments(3, 2)) {
        rho += std::norm(naive_psi(sys, conf, assignment.spins(3)));
    }
    ASSERT_GT(rho, 0.0);
    ASSERT_GT(std::log(rho), -300.0);
    EXPECT_LT(relative(density_spin_summed(sys, conf).value(), rho), 1e-12);
}

TEST(ManyBody, UnderflowingDensityStaysFinite)
{
    std::vector<GaussianPacket> packets{{0, 0, kSigma, Spin::Up}, {1000 * kNanometre, 0.1 / kNanometre, kSigma, Spin::Up}};
    const ManyBodySystem sys(packets);
    const auto conf = at({-400 * kNanometre, 1400 * kNanometre});
    const auto rho = density_spin_summed(sys, conf);
    EXPECT_TRUE(std::isfinite(rho.log_abs()));
    EXPECT_LT(rho.log_abs(), -1500.0);
    // Each particle sits 40 sigma from its packet, costing exp(-800) in density;
    // the exchange term is smaller still by exp(-10^4), and 1/2! contributes -log 2.
    const double single = std::log(std::norm(eval(packets[0], 0, 0, kElectron)));
    EXPECT_NEAR(rho.log_abs(), 2 * single - 1600.0 - std::log(2.0), 1e-9);
}

TEST(ManyBody, IntegratedNormsSimpleCases)
{
    const GaussianPacket a{0, 0, kSigma, Spin::Up};
    EXPECT_NEAR(integrated_norm_det(ManyBodySystem({a})), 1.0, 1e-15);
    EXPECT_NEAR(integrated_norm_bruteforce(ManyBodySystem({a})), 1.0, 1e-15);

    // Far apart: orthonormal to double precision.
    std::vector<GaussianPacket> far;
    for (int j = 0; j < 4; ++j) {
        far.push_back({j * 200 * kSigma, 0, kSigma, Spin::Up});
    }
    EXPECT_NEAR(integrated_norm_det(ManyBodySystem(far)), 1.0, 1e-15);

    GaussianPacket b{6 * kNanometre, 0.05 / kNanometre, kSigma, Spin::Down};
    EXPECT_NEAR(integrated_norm_det(ManyBodySystem({a, b})), 1.0, 1e-15);
    EXPECT_NEAR(integrated_norm_bruteforce(ManyBodySystem({a, b})), 1.0, 1e-15);

    b.spin = Spin::Up;
    const double s = std::norm(overlap(a, b, 0, kElectron));
    // Hand expansion of the 2x2 Gram determinant and of the four signed products.
    EXPECT_NEAR(integrated_norm_det(ManyBodySystem({a, b})), 1.0 - s, 1e-14);
    EXPECT_NEAR(integrated_norm_bruteforce(ManyBodySystem({a, b})), 1.0 - s, 1e-14);
}

TEST(ManyBody, IntegratedNormMatchesQuadrature)
{
    // Two same-spin electrons: integrate |Psi(x1, x2)|^2 on a tensor quadrature.
    const GaussianPacket a{0, 0.05 / kNanometre, kSigma, Spin::Up};
    const GaussianPacket b{12 * kNanometre, -0.03 / kNanometre, 0.8 * kSigma, Spin::Up};
    const ManyBodySystem sys({a, b});
    const std::vector<Spin> spins{Spin::Up, Spin::Up};
    const double lo = -10 * kSigma;
    const double hi = 12 * kNanometre + 10 * kSigma;
    const double norm = oracle::integrate_panels(
        [&](double x1) {
            return oracle::integrate_panels(
                [&](double x2) { return std::norm(naive_psi(sys, at({x1, x2}), spins)); }, lo, hi, 12);
        },
        lo, hi, 12);
    EXPECT_NEAR(integrated_norm_det(sys), norm, 1e-10);
}

TEST(ManyBody, IntegratedNormDetMatchesBruteforce)
{
    Rng rng(808);
    for (int sample = 0; sample < 100; ++sample) {
        const std::size_t n = 1 + rng.index(4);
        const ManyBodySystem sys = random_system(rng, n);
        const double fast = integrated_norm_det(sys);
        const double slow = integrated_norm_bruteforce(sys);
        EXPECT_LT(std::abs(fast - slow), 1e-10 * std::max(std::abs(slow), 1e-300)) << "n=" << n;
    }
    std::vector<GaussianPacket> six(6, GaussianPacket{0, 0, kSigma, Spin::Up});
    EXPECT_THROW(integrated_norm_bruteforce(ManyBodySystem(six)), CapacityError);
}

TEST(ManyBody, ConfigurationValidation)
{
    const ManyBodySystem sys({{0, 0, kSigma, Spin::Up}});
    EXPECT_THROW(density_spin_summed(sys, at({0, 1})), DomainError);
    EXPECT_THROW(density_spin_summed(sys, at({NAN})), DomainError);
    EXPECT_THROW(density_spin_summed(sys, at({0}, -1.0)), DomainError);
    EXPECT_THROW(current_i(sys, at({0}), 1), DomainError);
}
