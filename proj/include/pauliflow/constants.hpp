#pragma once

namespace pauliflow {

inline constexpr double kHbar = 1.054571817e-34;         // J s
inline constexpr double kElectronMass = 9.1093837015e-31; // kg

inline constexpr double kNanometre = 1e-9;
inline constexpr double kFemtosecond = 1e-15;

} // namespace pauliflow
