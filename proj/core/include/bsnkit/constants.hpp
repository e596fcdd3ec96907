#pragma once

// Magnetics run in CGS-Gaussian (Oe, emu, erg); circuits run in SI (V, A, ohm, F).
// The only crossing point is the spin-torque field, see spin_torque_field().

namespace bsnkit::constants {

inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kBoltzmannErg = 1.380649e-16;   // erg/K
inline constexpr double kGyromagnetic = 1.76e7;         // rad s^-1 Oe^-1
inline constexpr double kHbarErg = 1.054571817e-27;     // erg s
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kThermalVoltage300K = 0.025852;  // V, k_B T/q at 300 K

}  // namespace bsnkit::constants
