#pragma once

#include <cmath>
#include <numbers>

namespace tordiff {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double pi = std::numbers::pi;

/// Reduce an angle to [0, 2pi).
inline double wrap_angle(double theta) {
    double w = std::fmod(theta, two_pi);
    if (w < 0.0) w += two_pi;
    if (w >= two_pi) w = 0.0;  // fmod can land exactly on 2pi after the add
    return w;
}

/// Reduce to [0, 1).
inline double wrap_unit(double x) {
    double w = x - std::floor(x);
    if (w >= 1.0) w = 0.0;
    return w;
}

/// Signed angular difference in (-pi, pi].
inline double angle_diff(double a, double b) {
    double d = std::fmod(a - b, two_pi);
    if (d <= -pi) d += two_pi;
    if (d > pi) d -= two_pi;
    return d;
}

/// Nearest-representative reduction to [-0.5, 0.5) on the unit lattice.
inline double wrap_half_unit(double x) {
    double w = x - std::round(x);
    if (w >= 0.5) w -= 1.0;
    return w;
}

}  // namespace tordiff
