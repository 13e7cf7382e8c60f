#pragma once

#include <cstddef>
#include <vector>

#include "pauliflow/scaled.hpp"

namespace pauliflow {

/// Dense row-major square matrix of log-scaled entries.
class ScaledMatrix {
public:
    ScaledMatrix() = default;
    explicit ScaledMatrix(std::size_t n) : n_(n), data_(n * n) {}

    std::size_t size() const { return n_; }

    ScaledComplex& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
    const ScaledComplex& operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }

private:
    std::size_t n_ = 0;
    std::vector<ScaledComplex> data_;
};

struct ScaledDeterminant {
    ScaledComplex value;
    /// Sum over rows of log(max_j |a_ij|): the natural magnitude of the
    /// determinant, used as reference for node detection. -inf if a row is zero.
    double row_reference = 0.0;
};

/// Determinant by partial-pivoting LU after extracting the largest magnitude
/// of each row and then of each column into the log scale. A pivot below
/// n * 8 * epsilon of the equilibrated matrix is treated as an exact zero
/// (numerically rank deficient), which makes repeated same-spin orbitals or
/// coincident coordinates report a vanishing determinant.
ScaledDeterminant determinant(const ScaledMatrix& matrix);

} // namespace pauliflow
