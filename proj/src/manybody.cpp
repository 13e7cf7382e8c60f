#include "pauliflow/manybody.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "pauliflow/determinant.hpp"
#include "pauliflow/errors.hpp"
#include "manybody_detail.hpp"

namespace pauliflow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_inverse_sqrt_factorial(std::size_t n)
{
    return -0.5 * std::lgamma(static_cast<double>(n) + 1.0);
}

// M(p, u) = psi_u(x_p, t)
ScaledMatrix orbital_values(const ManyBodySystem& sys, const Configuration& conf)
{
    const std::size_t n = sys.size();
    ScaledMatrix values(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t u = 0; u < n; ++u) {
            values(p, u) = eval_scaled(sys.packet(u), conf.positions[p], conf.t, sys.constants());
        }
    }
    return values;
}

ScaledMatrix orbital_derivatives(const ManyBodySystem& sys, const Configuration& conf)
{
    const std::size_t n = sys.size();
    ScaledMatrix values(n);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t u = 0; u < n; ++u) {
            values(p, u) = ddx_scaled(sys.packet(u), conf.positions[p], conf.t, sys.constants());
        }
    }
    return values;
}

// Determinant of values restricted to (rows x cols). If `replaced` is set, the
// row belonging to that particle is taken from `replacement` instead.
ScaledDeterminant block_determinant(const ScaledMatrix& values, std::span<const std::size_t> rows,
                                    std::span<const std::size_t> cols, std::optional<std::size_t> replaced = {},
                                    const ScaledMatrix* replacement = nullptr)
{
    ScaledMatrix block(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const ScaledMatrix& source = (replaced && rows[r] == *replaced) ? *replacement : values;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            block(r, c) = source(rows[r], cols[c]);
        }
    }
    return determinant(block);
}

std::vector<std::size_t> complement(std::span<const std::size_t> subset, std::size_t n)
{
    std::vector<std::size_t> rest;
    rest.reserve(n - subset.size());
    std::size_t next = 0;
    for (std::size_t p = 0; p < n; ++p) {
        if (next < subset.size() && subset[next] == p) {
            ++next;
        } else {
            rest.push_back(p);
        }
    }
    return rest;
}

void check_assignment(const ManyBodySystem& sys, const SpinAssignment& assignment)
{
    if (assignment.up_set.size() != sys.up_count()) {
        throw DomainError("spin assignment size " + std::to_string(assignment.up_set.size())
                          + " does not match the number of Up orbitals " + std::to_string(sys.up_count()));
    }
    for (std::size_t r = 0; r < assignment.up_set.size(); ++r) {
        if (assignment.up_set[r] >= sys.size() || (r > 0 && assignment.up_set[r] <= assignment.up_set[r - 1])) {
            throw DomainError("spin assignment must be strictly ascending particle indices");
        }
    }
}

void check_particle(const ManyBodySystem& sys, std::size_t particle)
{
    if (particle >= sys.size()) {
        throw DomainError("particle index " + std::to_string(particle) + " out of range");
    }
}

template <typename TermFn>
ScaledComplex permutation_sum(const ManyBodySystem& sys, const Configuration& conf, std::span<const Spin> spins,
                              const Limits& limits, TermFn&& term_value)
{
    const std::size_t n = sys.size();
    if (n > limits.permsum_max_n) {
        throw CapacityError("permutation sum limited to N <= " + std::to_string(limits.permsum_max_n) + ", got N = "
                            + std::to_string(n));
    }
    conf.validate(n);
    if (spins.size() != n) {
        throw DomainError("spin tuple length does not match particle count");
    }
    const auto up_labels = static_cast<std::size_t>(std::count(spins.begin(), spins.end(), Spin::Up));
    if (up_labels != sys.up_count()) {
        return ScaledComplex::zero();
    }

    std::vector<std::size_t> image(n);
    std::iota(image.begin(), image.end(), std::size_t{0});
    std::vector<ScaledComplex> terms;
    do {
        bool allowed = true;
        for (std::size_t k = 0; k < n && allowed; ++k) {
            allowed = sys.packet(image[k]).spin == spins[k];
        }
        if (!allowed) {
            continue;
        }
        ScaledComplex term = ScaledComplex::one();
        for (std::size_t k = 0; k < n; ++k) {
            term *= term_value(k, image[k]);
        }
        if (permutation_sign(image) < 0) {
            term = -term;
        }
        terms.push_back(term);
    } while (std::next_permutation(image.begin(), image.end()));

    ScaledComplex total = sum(terms);
    if (!total.is_zero()) {
        total.log_magnitude += log_inverse_sqrt_factorial(n);
    }
    return total;
}

struct FluxWork {
    SpinSummedFlux flux;
    std::vector<double> assignment_log_density;
    std::size_t nominal_index = 0;
};

FluxWork flux_impl(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits,
                   std::span<const std::size_t> differentiate)
{
    const std::size_t n = sys.size();
    conf.validate(n);
    const auto assignments = enumerate_assignments(n, sys.up_count(), limits);
    const ScaledMatrix values = orbital_values(sys, conf);
    std::optional<ScaledMatrix> derivatives;
    if (!differentiate.empty()) {
        derivatives = orbital_derivatives(sys, conf);
    }

    double reference = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        double row_max = kNegInf;
        for (std::size_t u = 0; u < n; ++u) {
            row_max = std::max(row_max, values(p, u).log_magnitude);
        }
        reference += 2.0 * row_max;
    }

    const SpinAssignment nominal = nominal_assignment(sys);
    const double normalization = log_inverse_sqrt_factorial(n);

    FluxWork work;
    work.assignment_log_density.reserve(assignments.size());
    std::vector<ScaledComplex> amplitudes;
    amplitudes.reserve(assignments.size());
    // gradients[a * n + i]
    std::vector<ScaledComplex> gradients(differentiate.empty() ? 0 : assignments.size() * n);

    for (std::size_t a = 0; a < assignments.size(); ++a) {
        const SpinAssignment& assignment = assignments[a];
        if (assignment == nominal) {
            work.nominal_index = a;
        }
        const std::vector<std::size_t> down_rows = complement(assignment.up_set, n);
        const ScaledComplex up_det = block_determinant(values, assignment.up_set, sys.up_orbitals()).value;
        const ScaledComplex down_det = block_determinant(values, down_rows, sys.down_orbitals()).value;

        ScaledComplex prefactor = ScaledComplex::from_polar_log(normalization, 0.0);
        if (assignment_sign(sys, assignment) < 0) {
            prefactor = -prefactor;
        }
        const ScaledComplex amplitude = prefactor * up_det * down_det;
        amplitudes.push_back(amplitude);
        work.assignment_log_density.push_back(2.0 * amplitude.log_magnitude);

        for (std::size_t i : differentiate) {
            ScaledComplex gradient;
            if (assignment.contains(i)) {
                gradient = prefactor * down_det
                    * block_determinant(values, assignment.up_set, sys.up_orbitals(), i, &*derivatives).value;
            } else {
                gradient = prefactor * up_det
                    * block_determinant(values, down_rows, sys.down_orbitals(), i, &*derivatives).value;
            }
            gradients[a * n + i] = gradient;
        }
    }

    SpinSummedFlux& flux = work.flux;
    flux.reference_log = reference;
    flux.currents.assign(n, 0.0);
    double log_scale = kNegInf;
    for (double l : work.assignment_log_density) {
        log_scale = std::max(log_scale, l);
    }
    if (log_scale == kNegInf) {
        flux.log_scale = 0.0;
        flux.density = 0.0;
        return work;
    }
    flux.log_scale = log_scale;
    for (double l : work.assignment_log_density) {
        flux.density += std::exp(l - log_scale);
    }
    const double hbar_over_m = sys.constants().hbar / sys.constants().mass;
    for (std::size_t i : differentiate) {
        double current = 0.0;
        for (std::size_t a = 0; a < amplitudes.size(); ++a) {
            const ScaledComplex& amplitude = amplitudes[a];
            const ScaledComplex& gradient = gradients[a * n + i];
            if (amplitude.is_zero() || gradient.is_zero()) {
                continue;
            }
            current += std::exp(amplitude.log_magnitude + gradient.log_magnitude - log_scale)
                * std::sin(gradient.phase - amplitude.phase);
        }
        flux.currents[i] = hbar_over_m * current;
    }
    return work;
}

} // namespace

ManyBodySystem::ManyBodySystem(std::vector<GaussianPacket> packets, PhysicalConstants constants)
    : packets_(std::move(packets)), constants_(constants)
{
    if (packets_.empty()) {
        throw DomainError("a many-body system needs at least one orbital");
    }
    constants_.validate();
    for (std::size_t j = 0; j < packets_.size(); ++j) {
        packets_[j].validate();
        (packets_[j].spin == Spin::Up ? up_orbitals_ : down_orbitals_).push_back(j);
    }
}

const std::vector<std::size_t>& ManyBodySystem::orbitals_with(Spin spin) const
{
    return spin == Spin::Up ? up_orbitals_ : down_orbitals_;
}

std::vector<Spin> ManyBodySystem::nominal_spins() const
{
    std::vector<Spin> spins;
    spins.reserve(packets_.size());
    for (const auto& packet : packets_) {
        spins.push_back(packet.spin);
    }
    return spins;
}

void Configuration::validate(std::size_t n) const
{
    if (positions.size() != n) {
        throw DomainError("configuration has " + std::to_string(positions.size()) + " positions for "
                          + std::to_string(n) + " particles");
    }
    for (double x : positions) {
        if (!std::isfinite(x)) {
            throw DomainError("configuration positions must be finite");
        }
    }
    if (!std::isfinite(t) || t < 0.0) {
        throw DomainError("configuration time must be finite and non-negative");
    }
}

std::vector<Spin> SpinAssignment::spins(std::size_t n) const
{
    std::vector<Spin> labels(n, Spin::Down);
    for (std::size_t p : up_set) {
        labels.at(p) = Spin::Up;
    }
    return labels;
}

bool SpinAssignment::contains(std::size_t particle) const
{
    return std::binary_search(up_set.begin(), up_set.end(), particle);
}

SpinAssignment nominal_assignment(const ManyBodySystem& sys)
{
    return {sys.up_orbitals()};
}

int permutation_sign(std::span<const std::size_t> image)
{
    std::size_t inversions = 0;
    for (std::size_t i = 0; i < image.size(); ++i) {
        for (std::size_t j = i + 1; j < image.size(); ++j) {
            inversions += image[i] > image[j] ? 1 : 0;
        }
    }
    return inversions % 2 == 0 ? 1 : -1;
}

ScaledComplex psi_permsum(const ManyBodySystem& sys, const Configuration& conf, std::span<const Spin> spins,
                          const Limits& limits)
{
    std::optional<ScaledMatrix> values;
    return permutation_sum(sys, conf, spins, limits, [&](std::size_t k, std::size_t orbital) {
        if (!values) {
            values = orbital_values(sys, conf);
        }
        return (*values)(k, orbital);
    });
}

ScaledComplex grad_psi_permsum(const ManyBodySystem& sys, const Configuration& conf, std::span<const Spin> spins,
                               std::size_t particle, const Limits& limits)
{
    check_particle(sys, particle);
    std::optional<ScaledMatrix> values;
    std::optional<ScaledMatrix> derivatives;
    return permutation_sum(sys, conf, spins, limits, [&](std::size_t k, std::size_t orbital) {
        if (!values) {
            values = orbital_values(sys, conf);
            derivatives = orbital_derivatives(sys, conf);
        }
        return k == particle ? (*derivatives)(k, orbital) : (*values)(k, orbital);
    });
}

std::vector<SpinAssignment> enumerate_assignments(std::size_t n, std::size_t n_up, const Limits& limits)
{
    if (n_up > n) {
        throw DomainError("Up count exceeds particle count");
    }
    // C(n, n_up) with early exit once the limit is passed.
    const std::size_t k = std::min(n_up, n - n_up);
    double count = 1.0;
    for (std::size_t r = 1; r <= k; ++r) {
        count = count * static_cast<double>(n - k + r) / static_cast<double>(r);
        if (count > static_cast<double>(limits.assignment_max)) {
            throw CapacityError("C(" + std::to_string(n) + ", " + std::to_string(n_up)
                                + ") spin assignments exceed the limit of " + std::to_string(limits.assignment_max));
        }
    }

    std::vector<SpinAssignment> assignments;
    assignments.reserve(static_cast<std::size_t>(std::llround(count)));
    std::vector<std::size_t> subset(n_up);
    std::iota(subset.begin(), subset.end(), std::size_t{0});
    while (true) {
        assignments.push_back({subset});
        // advance to the next combination in lexicographic order
        std::size_t pos = n_up;
        while (pos > 0 && subset[pos - 1] == n - n_up + pos - 1) {
            --pos;
        }
        if (pos == 0) {
            break;
        }
        ++subset[pos - 1];
        for (std::size_t r = pos; r < n_up; ++r) {
            subset[r] = subset[r - 1] + 1;
        }
    }
    return assignments;
}

int assignment_sign(const ManyBodySystem& sys, const SpinAssignment& assignment)
{
    check_assignment(sys, assignment);
    const std::size_t n = sys.size();
    const std::vector<std::size_t> down_rows = complement(assignment.up_set, n);
    std::vector<std::size_t> image(n);
    for (std::size_t r = 0; r < assignment.up_set.size(); ++r) {
        image[assignment.up_set[r]] = sys.up_orbitals()[r];
    }
    for (std::size_t r = 0; r < down_rows.size(); ++r) {
        image[down_rows[r]] = sys.down_orbitals()[r];
    }
    return permutation_sign(image);
}

ScaledComplex psi_assignment(const ManyBodySystem& sys, const Configuration& conf, const SpinAssignment& assignment)
{
    check_assignment(sys, assignment);
    conf.validate(sys.size());
    const ScaledMatrix values = orbital_values(sys, conf);
    const std::vector<std::size_t> down_rows = complement(assignment.up_set, sys.size());
    ScaledComplex amplitude = block_determinant(values, assignment.up_set, sys.up_orbitals()).value
        * block_determinant(values, down_rows, sys.down_orbitals()).value;
    amplitude *= ScaledComplex::from_polar_log(log_inverse_sqrt_factorial(sys.size()), 0.0);
    return assignment_sign(sys, assignment) < 0 ? -amplitude : amplitude;
}

ScaledComplex grad_psi_assignment(const ManyBodySystem& sys, const Configuration& conf,
                                  const SpinAssignment& assignment, std::size_t particle)
{
    check_assignment(sys, assignment);
    check_particle(sys, particle);
    conf.validate(sys.size());
    const ScaledMatrix values = orbital_values(sys, conf);
    const ScaledMatrix derivatives = orbital_derivatives(sys, conf);
    const std::vector<std::size_t> down_rows = complement(assignment.up_set, sys.size());
    const bool in_up = assignment.contains(particle);
    const auto up = block_determinant(values, assignment.up_set, sys.up_orbitals(),
                                      in_up ? std::optional(particle) : std::nullopt, &derivatives);
    const auto down = block_determinant(values, down_rows, sys.down_orbitals(),
                                        in_up ? std::nullopt : std::optional(particle), &derivatives);
    ScaledComplex gradient = up.value * down.value;
    gradient *= ScaledComplex::from_polar_log(log_inverse_sqrt_factorial(sys.size()), 0.0);
    return assignment_sign(sys, assignment) < 0 ? -gradient : gradient;
}

double SpinSummedFlux::relative_log_density() const
{
    if (density <= 0.0) {
        return kNegInf;
    }
    return std::log(density) + log_scale - reference_log;
}

SpinSummedFlux spin_summed_flux(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits)
{
    std::vector<std::size_t> all(sys.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return flux_impl(sys, conf, limits, all).flux;
}

ScaledReal density_spin_summed(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits)
{
    return flux_impl(sys, conf, limits, {}).flux.scaled_density();
}

ScaledReal current_i(const ManyBodySystem& sys, const Configuration& conf, std::size_t i, const Limits& limits)
{
    check_particle(sys, i);
    const std::size_t particles[] = {i};
    return flux_impl(sys, conf, limits, particles).flux.scaled_current(i);
}

namespace detail {

// Exposed to the bohm module through manybody_detail.hpp.
SpinSummedFlux flux_for(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits,
                        std::span<const std::size_t> differentiate, std::vector<double>* assignment_log_density,
                        std::size_t* nominal_index)
{
    FluxWork work = flux_impl(sys, conf, limits, differentiate);
    if (assignment_log_density != nullptr) {
        *assignment_log_density = std::move(work.assignment_log_density);
    }
    if (nominal_index != nullptr) {
        *nominal_index = work.nominal_index;
    }
    return std::move(work.flux);
}

ScaledDeterminant block_determinant_for(const ManyBodySystem& sys, const Configuration& conf,
                                        std::span<const std::size_t> particles, std::span<const std::size_t> orbitals,
                                        std::optional<std::size_t> differentiated)
{
    // Only the requested block is evaluated, so the result never depends on
    // orbitals or coordinates outside it.
    const std::size_t n = sys.size();
    ScaledMatrix values(n);
    std::optional<ScaledMatrix> derivatives;
    if (differentiated) {
        derivatives.emplace(n);
    }
    for (std::size_t p : particles) {
        for (std::size_t u : orbitals) {
            values(p, u) = eval_scaled(sys.packet(u), conf.positions[p], conf.t, sys.constants());
            if (differentiated && p == *differentiated) {
                (*derivatives)(p, u) = ddx_scaled(sys.packet(u), conf.positions[p], conf.t, sys.constants());
            }
        }
    }
    return block_determinant(values, particles, orbitals, differentiated, derivatives ? &*derivatives : nullptr);
}

} // namespace detail

double integrated_norm_det(const ManyBodySystem& sys)
{
    double norm = 1.0;
    for (Spin spin : {Spin::Up, Spin::Down}) {
        const auto& orbitals = sys.orbitals_with(spin);
        ScaledMatrix gram(orbitals.size());
        for (std::size_t r = 0; r < orbitals.size(); ++r) {
            for (std::size_t c = 0; c < orbitals.size(); ++c) {
                gram(r, c) = ScaledComplex::from_complex(
                    overlap(sys.packet(orbitals[r]), sys.packet(orbitals[c]), 0.0, sys.constants()));
            }
        }
        norm *= determinant(gram).value.to_complex().real();
    }
    return norm;
}

double integrated_norm_bruteforce(const ManyBodySystem& sys, const Limits& limits)
{
    const std::size_t n = sys.size();
    if (n > limits.bruteforce_norm_max_n) {
        throw CapacityError("brute-force norm limited to N <= " + std::to_string(limits.bruteforce_norm_max_n));
    }
    std::vector<std::complex<double>> gram(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (sys.packet(j).spin == sys.packet(k).spin) {
                gram[j * n + k] = overlap(sys.packet(j), sys.packet(k), 0.0, sys.constants());
            }
        }
    }

    std::vector<std::size_t> left(n);
    std::iota(left.begin(), left.end(), std::size_t{0});
    std::complex<double> total{0.0, 0.0};
    do {
        const int left_sign = permutation_sign(left);
        std::vector<std::size_t> right(n);
        std::iota(right.begin(), right.end(), std::size_t{0});
        do {
            std::complex<double> term = static_cast<double>(left_sign * permutation_sign(right));
            for (std::size_t k = 0; k < n; ++k) {
                term *= gram[left[k] * n + right[k]];
            }
            total += term;
        } while (std::next_permutation(right.begin(), right.end()));
    } while (std::next_permutation(left.begin(), left.end()));

    return total.real() / std::tgamma(static_cast<double>(n) + 1.0);
}

} // namespace pauliflow
