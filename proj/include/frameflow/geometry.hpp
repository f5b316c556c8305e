#pragma once

#include <cmath>

namespace frameflow
{

/** @brief Plain 2D vector used for positions, directions and normals */
struct Vec2 {
    double x{0};
    double y{0};

    constexpr Vec2& operator+=(const Vec2& o)
    {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr Vec2& operator*=(double s)
    {
        x *= s;
        y *= s;
        return *this;
    }
    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) { return v *= s; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

/** Rotate by -90 degrees: for a CCW boundary edge direction this is the outward normal. */
constexpr Vec2 rotate_cw(const Vec2& v) { return {v.y, -v.x}; }

/** Twice the signed area of triangle (a, b, c); positive when CCW. */
constexpr double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c)
{
    return cross(b - a, c - a);
}

}  // namespace frameflow
