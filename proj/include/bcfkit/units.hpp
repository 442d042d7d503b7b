// units.hpp — frequencies in cm^-1, temperatures in K, time in the conjugate unit of cm^-1

#pragma once

#include <numbers>

namespace bcfkit::units {

inline constexpr double kBoltzmannInvCmPerKelvin = 0.6950348;
inline constexpr double kSpeedOfLightCmPerFs = 2.99792458e-5;

// One internal time unit (phase = ω[cm^-1]·t) in femtoseconds, 1/(2πc) ≈ 5308.8375 fs.
inline constexpr double kFsPerTimeUnit = 1.0 / (2.0 * std::numbers::pi * kSpeedOfLightCmPerFs);

constexpr double kelvin_to_invcm(double kelvin) { return kBoltzmannInvCmPerKelvin * kelvin; }
constexpr double time_to_fs(double t) { return t * kFsPerTimeUnit; }
constexpr double fs_to_time(double fs) { return fs / kFsPerTimeUnit; }

} // namespace bcfkit::units
