#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "frameflow/geometry.hpp"

namespace frameflow
{

/// Period of a 4-fold symmetric frame.
inline constexpr double kQuarterTurn = std::numbers::pi / 2;

/**
 * @brief Principal representative of an angle difference modulo a quarter
 * turn, in (-pi/4, pi/4].
 *
 * This is the curvature of a frame across one edge. The interval is closed
 * on the right so that an exact tie at +/-pi/4 maps to +pi/4.
 */
inline double wrap_quarter(double delta)
{
    if (!std::isfinite(delta)) {
        throw std::invalid_argument("wrap_quarter: non-finite angle");
    }
    // std::remainder is exact and lands in [-pi/4, pi/4]
    double r = std::remainder(delta, kQuarterTurn);
    if (r <= -kQuarterTurn / 2) {
        r += kQuarterTurn;
    }
    return r;
}

/** @brief Reduce an angle into [0, pi/2). */
inline double canonicalize(double theta)
{
    double r = std::fmod(theta, kQuarterTurn);
    if (r < 0) {
        r += kQuarterTurn;
    }
    // fmod of a tiny negative value can round back up to the period
    if (r >= kQuarterTurn) {
        r = 0;
    }
    return r + 0.0;  // no negative zero
}

/**
 * @brief Frame angle in [0, pi/2) whose frame contains the given direction.
 *
 * A frame contains +/-d and its perpendicular, so aligning a frame with a
 * boundary normal or with the boundary tangent is the same constraint.
 */
inline double canonical_angle(const Vec2& direction)
{
    if (direction.x == 0 && direction.y == 0) {
        throw std::invalid_argument("canonical_angle: zero direction");
    }
    return canonicalize(std::atan2(direction.y, direction.x));
}

}  // namespace frameflow
