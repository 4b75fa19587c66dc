#pragma once

#include <numbers>

namespace omnoise {

// All frequencies and rates are stored internally as angular quantities
// (rad/s). Config files and the CLI speak ordinary Hz; conversion happens
// once on ingestion.
inline constexpr double two_pi = 2.0 * std::numbers::pi;

constexpr double hz_to_rad(double f_hz) { return two_pi * f_hz; }
constexpr double rad_to_hz(double w_rad) { return w_rad / two_pi; }

}  // namespace omnoise
