#pragma once

#include <complex>
#include <limits>
#include <span>

namespace pauliflow {

/// Complex number stored as (log|z|, arg z).
///
/// Products of Gaussian orbitals evaluated far from their centres routinely
/// fall below the smallest normal double; keeping the logarithm of the
/// magnitude lets determinants and permutation sums of such values stay exact
/// up to rounding. Zero is represented by log_magnitude == -inf.
struct ScaledComplex {
    double log_magnitude = -std::numeric_limits<double>::infinity();
    double phase = 0.0;

    /// Largest |log_magnitude| for which to_complex() is allowed.
    static constexpr double kConvertibleLog = 600.0;

    static ScaledComplex zero() { return {}; }
    static ScaledComplex one() { return {0.0, 0.0}; }
    static ScaledComplex from_complex(std::complex<double> z);
    static ScaledComplex from_log(std::complex<double> log_z);
    static ScaledComplex from_polar_log(double log_magnitude, double phase);

    bool is_zero() const { return log_magnitude == -std::numeric_limits<double>::infinity(); }

    /// Plain complex value. Throws std::range_error when |log_magnitude| >= 600.
    std::complex<double> to_complex() const;

    /// z * exp(-log_reference), evaluated without forming z. Underflows to 0
    /// gracefully when z is far below the reference.
    std::complex<double> scaled(double log_reference) const;

    ScaledComplex conj() const { return {log_magnitude, -phase}; }
    ScaledComplex operator-() const;

    ScaledComplex& operator*=(const ScaledComplex& other);
    ScaledComplex& operator/=(const ScaledComplex& other);
    ScaledComplex& operator*=(std::complex<double> factor);
    ScaledComplex& operator*=(double factor);

    friend ScaledComplex operator*(ScaledComplex a, const ScaledComplex& b) { return a *= b; }
    friend ScaledComplex operator/(ScaledComplex a, const ScaledComplex& b) { return a /= b; }
    friend ScaledComplex operator*(ScaledComplex a, std::complex<double> b) { return a *= b; }
    friend ScaledComplex operator*(ScaledComplex a, double b) { return a *= b; }
    friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b);
    friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) { return a + (-b); }
};

/// Sum in the given order with a single common reference magnitude.
ScaledComplex sum(std::span<const ScaledComplex> terms);

/// |a - b| / |b|, computed in the log domain. Returns 0 when both are zero and
/// +inf when only b is zero.
double relative_difference(const ScaledComplex& a, const ScaledComplex& b);

/// Non-negative or signed real value stored as mantissa * exp(log_scale).
/// Densities and currents that share a log_scale can be divided exactly.
struct ScaledReal {
    double mantissa = 0.0;
    double log_scale = 0.0;

    double value() const;
    /// log|value|, -inf for zero.
    double log_abs() const;
};

/// Wrap an angle into (-pi, pi].
double wrap_phase(double phase);

} // namespace pauliflow
