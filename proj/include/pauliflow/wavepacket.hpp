#pragma once

#include <complex>
#include <string_view>

#include "pauliflow/constants.hpp"
#include "pauliflow/scaled.hpp"

namespace pauliflow {

enum class Spin { Up, Down };

std::string_view to_string(Spin spin);

struct PhysicalConstants {
    double hbar = kHbar;
    double mass = kElectronMass;

    void validate() const;
};

/// One-dimensional minimum-uncertainty Gaussian orbital.
///
///   psi(x, 0) = (2 pi sigma^2)^(-1/4) exp(-(x - x0)^2 / (4 sigma^2) + i k0 (x - x0))
///
/// sigma is the standard deviation of |psi|^2. All quantities are SI.
struct GaussianPacket {
    double x0 = 0.0;    // m
    double k0 = 0.0;    // 1/m
    double sigma = 1.0; // m
    Spin spin = Spin::Up;

    /// Throws DomainError unless sigma > 0 and every field is finite.
    void validate() const;

    friend bool operator==(const GaussianPacket&, const GaussianPacket&) = default;
};

/// Centre of |psi(x, t)|^2 under free evolution: x0 + hbar k0 t / m.
double center_at(const GaussianPacket& packet, double t, const PhysicalConstants& c);

/// Standard deviation of |psi(x, t)|^2: sigma sqrt(1 + (hbar t / (2 m sigma^2))^2).
double width_at(const GaussianPacket& packet, double t, const PhysicalConstants& c);

/// Group velocity hbar k0 / m.
double group_velocity(const GaussianPacket& packet, const PhysicalConstants& c);

/// log psi(x, t) as a complex number (real part = log|psi|, imaginary = phase).
std::complex<double> log_eval(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c);

/// d/dx log psi(x, t).
std::complex<double> log_derivative(const GaussianPacket& packet, double x, double t,
                                    const PhysicalConstants& c);

std::complex<double> eval(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c);
std::complex<double> ddx(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c);

/// Underflow-safe versions of eval/ddx.
ScaledComplex eval_scaled(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c);
ScaledComplex ddx_scaled(const GaussianPacket& packet, double x, double t, const PhysicalConstants& c);

/// <a|b> at time t. Both packets evolve under the same free Hamiltonian, so
/// the inner product is time independent and evaluated from the t = 0 forms.
/// Spin labels are ignored.
std::complex<double> overlap(const GaussianPacket& a, const GaussianPacket& b, double t,
                             const PhysicalConstants& c);

} // namespace pauliflow
