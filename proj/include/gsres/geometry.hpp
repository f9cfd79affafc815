#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace gsres {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(const Vec2& o)
    {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr Vec2& operator-=(const Vec2& o)
    {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator*(double s, const Vec2& v) { return {s * v.x, s * v.y}; }
    friend constexpr Vec2 operator*(const Vec2& v, double s) { return {s * v.x, s * v.y}; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline double distance(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline double heading(const Vec2& v) { return std::atan2(v.y, v.x); }
inline Vec2 unit_from_heading(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Rotates counter-clockwise by `angle` radians.
inline Vec2 rotate(const Vec2& v, double angle)
{
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi)
        a += two_pi;
    else if (a > std::numbers::pi)
        a -= two_pi;
    return a;
}

struct Box {
    Vec2 lo;
    Vec2 hi;
};

/// Convex polygon stored counter-clockwise, with precomputed outward edge normals.
class ConvexPolygon {
public:
    ConvexPolygon() = default;
    /// Accepts either orientation; throws std::invalid_argument if the vertices
    /// are fewer than three, collinear, or not convex.
    explicit ConvexPolygon(std::vector<Vec2> vertices);

    static ConvexPolygon rectangle(Vec2 lo, Vec2 hi);

    const std::vector<Vec2>& vertices() const { return _vertices; }
    std::size_t size() const { return _vertices.size(); }

    /// Closed membership: boundary points count as inside (tolerance `eps` metres).
    bool contains(const Vec2& p, double eps = 1e-9) const;

    Vec2 centroid() const;
    double area() const;
    Box bounding_box() const;
    double diameter() const;

    /// Time until a point moving from `p` (inside) with velocity `v` leaves the
    /// polygon, plus the indices of the edges hit at that time. Infinity when v = 0.
    struct Exit {
        double time;
        std::array<std::size_t, 4> hit{};
        std::size_t hit_count = 0;
        std::span<const std::size_t> edges() const { return {hit.data(), hit_count}; }
    };
    Exit exit_time(const Vec2& p, const Vec2& v) const;

    /// Specular reflection of `v` off edge `edge`.
    Vec2 reflect(const Vec2& v, std::size_t edge) const;

    /// Travels `displacement` from `start`, reflecting off the boundary.
    Vec2 travel(const Vec2& start, const Vec2& displacement) const;

private:
    std::vector<Vec2> _vertices;
    std::vector<Vec2> _normals; // unit outward normals, one per edge i -> i+1
    std::vector<double> _offsets; // n_i . x <= offset_i inside
};

} // namespace gsres
