#include <gsres/geometry.hpp>

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace gsres {

ConvexPolygon::ConvexPolygon(std::vector<Vec2> vertices) : _vertices(std::move(vertices))
{
    const std::size_t n = _vertices.size();
    if (n < 3)
        throw std::invalid_argument("polygon needs at least 3 vertices");

    double signed_area = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        signed_area += cross(_vertices[i], _vertices[(i + 1) % n]);
    if (std::abs(signed_area) < 1e-12)
        throw std::invalid_argument("polygon vertices are collinear");
    if (signed_area < 0.0)
        std::reverse(_vertices.begin(), _vertices.end());

    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& a = _vertices[i];
        const Vec2& b = _vertices[(i + 1) % n];
        const Vec2& c = _vertices[(i + 2) % n];
        if (cross(b - a, c - b) < -1e-12)
            throw std::invalid_argument("polygon is not convex");
        const Vec2 edge = b - a;
        const double len = norm(edge);
        if (len == 0.0)
            throw std::invalid_argument("polygon has a repeated vertex");
        const Vec2 normal{edge.y / len, -edge.x / len};
        _normals.push_back(normal);
        _offsets.push_back(dot(normal, a));
    }
}

ConvexPolygon ConvexPolygon::rectangle(Vec2 lo, Vec2 hi)
{
    return ConvexPolygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

bool ConvexPolygon::contains(const Vec2& p, double eps) const
{
    for (std::size_t i = 0; i < _normals.size(); ++i)
        if (dot(_normals[i], p) - _offsets[i] > eps)
            return false;
    return true;
}

Vec2 ConvexPolygon::centroid() const
{
    const std::size_t n = _vertices.size();
    double a = 0.0;
    Vec2 c;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = _vertices[i];
        const Vec2& q = _vertices[(i + 1) % n];
        const double w = cross(p, q);
        a += w;
        c += w * (p + q);
    }
    return (1.0 / (3.0 * a)) * c;
}

double ConvexPolygon::area() const
{
    const std::size_t n = _vertices.size();
    double a = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        a += cross(_vertices[i], _vertices[(i + 1) % n]);
    return 0.5 * a;
}

Box ConvexPolygon::bounding_box() const
{
    Box b{_vertices.front(), _vertices.front()};
    for (const auto& v : _vertices) {
        b.lo.x = std::min(b.lo.x, v.x);
        b.lo.y = std::min(b.lo.y, v.y);
        b.hi.x = std::max(b.hi.x, v.x);
        b.hi.y = std::max(b.hi.y, v.y);
    }
    return b;
}

double ConvexPolygon::diameter() const
{
    double d = 0.0;
    for (const auto& a : _vertices)
        for (const auto& b : _vertices)
            d = std::max(d, distance(a, b));
    return d;
}

ConvexPolygon::Exit ConvexPolygon::exit_time(const Vec2& p, const Vec2& v) const
{
    Exit out{std::numeric_limits<double>::infinity(), {}};
    for (std::size_t i = 0; i < _normals.size(); ++i) {
        const double closing = dot(_normals[i], v);
        if (closing <= 0.0)
            continue;
        const double t = std::max(0.0, (_offsets[i] - dot(_normals[i], p)) / closing);
        if (t < out.time - 1e-12) {
            out.time = t;
            out.hit[0] = i;
            out.hit_count = 1;
        }
        else if (t <= out.time + 1e-12) {
            if (out.hit_count < out.hit.size())
                out.hit[out.hit_count++] = i;
        }
    }
    return out;
}

Vec2 ConvexPolygon::reflect(const Vec2& v, std::size_t edge) const
{
    const Vec2& n = _normals[edge];
    const double c = dot(v, n);
    if (c <= 0.0)
        return v;
    return v - (2.0 * c) * n;
}

Vec2 ConvexPolygon::travel(const Vec2& start, const Vec2& displacement) const
{
    Vec2 p = start;
    Vec2 v = displacement;
    double remaining = 1.0;
    for (int bounce = 0; bounce < 1000 && remaining > 0.0; ++bounce) {
        const Exit e = exit_time(p, v);
        if (e.time >= remaining) {
            p += remaining * v;
            break;
        }
        p += e.time * v;
        remaining -= e.time;
        for (std::size_t edge : e.edges())
            v = reflect(v, edge);
    }
    return p;
}

} // namespace gsres
