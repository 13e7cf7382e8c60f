#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pauliflow/determinant.hpp"
#include "pauliflow/manybody.hpp"

namespace pauliflow::detail {

SpinSummedFlux flux_for(const ManyBodySystem& sys, const Configuration& conf, const Limits& limits,
                        std::span<const std::size_t> differentiate, std::vector<double>* assignment_log_density,
                        std::size_t* nominal_index);

/// Determinant over (particles x orbitals), optionally with the row of one
/// particle replaced by orbital derivatives.
ScaledDeterminant block_determinant_for(const ManyBodySystem& sys, const Configuration& conf,
                                        std::span<const std::size_t> particles, std::span<const std::size_t> orbitals,
                                        std::optional<std::size_t> differentiated);

} // namespace pauliflow::detail
