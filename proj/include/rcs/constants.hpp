#pragma once

#include <cmath>
#include <numbers>

namespace rcs {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s, exact
inline constexpr double kPi = std::numbers::pi;

/// Power-like quantity (RCS in m^2) to dB.
inline double power_to_db(double p) { return 10.0 * std::log10(p); }
inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }
/// Amplitude-like quantity (|S11|, sqrt(sigma)) to dB.
inline double amplitude_to_db(double a) { return 20.0 * std::log10(a); }
inline double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

/// Two-way delay to one-way range for a monostatic measurement.
inline constexpr double delay_to_range(double t) { return kSpeedOfLight * t / 2.0; }
inline constexpr double range_to_delay(double r) { return 2.0 * r / kSpeedOfLight; }

}  // namespace rcs
