#pragma once

#include <numbers>

namespace rydcav::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kNs = 1e-9;
inline constexpr double kUs = 1e-6;
inline constexpr double kMHz = 1e6;
inline constexpr double kGHz = 1e9;

/// Hz -> rad/s.
constexpr double angular(double hz) { return kTwoPi * hz; }
/// rad/s -> Hz.
constexpr double hertz(double omega) { return omega / kTwoPi; }

}  // namespace rydcav::units
