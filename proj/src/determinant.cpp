#include "pauliflow/determinant.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace pauliflow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

} // namespace

ScaledDeterminant determinant(const ScaledMatrix& matrix)
{
    const std::size_t n = matrix.size();
    if (n == 0) {
        return {ScaledComplex::one(), 0.0};
    }

    std::vector<double> row_scale(n, kNegInf);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            row_scale[i] = std::max(row_scale[i], matrix(i, j).log_magnitude);
        }
    }
    double row_reference = 0.0;
    for (double s : row_scale) {
        row_reference += s;
    }
    if (row_reference == kNegInf) {
        return {ScaledComplex::zero(), kNegInf};
    }

    std::vector<double> col_scale(n, kNegInf);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            col_scale[j] = std::max(col_scale[j], matrix(i, j).log_magnitude - row_scale[i]);
        }
    }
    double log_scale = row_reference;
    for (double s : col_scale) {
        if (s == kNegInf) {
            return {ScaledComplex::zero(), row_reference};
        }
        log_scale += s;
    }

    std::vector<std::complex<double>> a(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a[i * n + j] = matrix(i, j).scaled(row_scale[i] + col_scale[j]);
        }
    }

    const double tolerance = 8.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    double log_abs = 0.0;
    double phase = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot_row = k;
        double pivot_abs = std::abs(a[k * n + k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double candidate = std::abs(a[i * n + k]);
            if (candidate > pivot_abs) {
                pivot_abs = candidate;
                pivot_row = i;
            }
        }
        if (pivot_abs <= tolerance) {
            return {ScaledComplex::zero(), row_reference};
        }
        if (pivot_row != k) {
            std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(k * n),
                             a.begin() + static_cast<std::ptrdiff_t>((k + 1) * n),
                             a.begin() + static_cast<std::ptrdiff_t>(pivot_row * n));
            phase += std::numbers::pi;
        }
        const std::complex<double> pivot = a[k * n + k];
        log_abs += std::log(pivot_abs);
        phase += std::arg(pivot);
        for (std::size_t i = k + 1; i < n; ++i) {
            const std::complex<double> factor = a[i * n + k] / pivot;
            if (factor == 0.0) {
                continue;
            }
            for (std::size_t j = k + 1; j < n; ++j) {
                a[i * n + j] -= factor * a[k * n + j];
            }
        }
    }

    return {ScaledComplex::from_polar_log(log_scale + log_abs, phase), row_reference};
}

} // namespace pauliflow
