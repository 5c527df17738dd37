#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace defcon {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

// Pitch frame: origin at a corner, x along the lower sideline.
struct Pitch {
    double length = 105.0;
    double width = 68.0;
    double goalpost_half_width = 3.66;

    Vec2 goal_center_left() const { return {0.0, width / 2.0}; }
    Vec2 goal_center_right() const { return {length, width / 2.0}; }

    Vec2 goal_center(bool right) const { return right ? goal_center_right() : goal_center_left(); }

    std::pair<Vec2, Vec2> goalposts(bool right) const {
        const double gx = right ? length : 0.0;
        return {{gx, width / 2.0 - goalpost_half_width}, {gx, width / 2.0 + goalpost_half_width}};
    }
};

// sin/cos of the angle of vector d against the +x axis.
// Zero-length vectors map to angle 0, i.e. (sin, cos) = (0, 1).
inline std::pair<double, double> sincos_vs_x_axis(const Vec2& d) {
    const double n = d.norm();
    if (n < 1e-12) return {0.0, 1.0};
    return {d.y / n, d.x / n};
}

// Unsigned angle between two vectors in [0, pi]; zero-length input yields 0.
inline double angle_between(const Vec2& a, const Vec2& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na < 1e-12 || nb < 1e-12) return 0.0;
    double c = a.dot(b) / (na * nb);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
}

// sin/cos of the signed angle from vector a to vector b; degenerate inputs
// map to angle 0.
inline std::pair<double, double> sincos_between(const Vec2& a, const Vec2& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na < 1e-12 || nb < 1e-12) return {0.0, 1.0};
    const double cross = a.x * b.y - a.y * b.x;
    const double dot = a.dot(b);
    return {cross / (na * nb), dot / (na * nb)};
}

// Distance from point p to segment [a, b].
inline double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 < 1e-18) return distance(p, a);
    double t = (p - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

// Whether p projects onto segment [a, b] (endpoints inclusive).
inline bool projects_onto_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    if (len2 < 1e-18) return true;
    const double t = (p - a).dot(ab) / len2;
    return t >= 0.0 && t <= 1.0;
}

// Opponents inside a corridor of the given width around segment [a, b]:
// perpendicular distance <= width/2 with the projection inside the segment.
// A zero-length segment degenerates to a disc of radius width/2.
inline int corridor_count(const Vec2& a, const Vec2& b, std::span<const Vec2> points,
                          double width = 10.0) {
    const double half = width / 2.0;
    const Vec2 ab = b - a;
    const double len2 = ab.dot(ab);
    int count = 0;
    for (const Vec2& p : points) {
        if (len2 < 1e-18) {
            if (distance(p, a) <= half) ++count;
            continue;
        }
        const double t = (p - a).dot(ab) / len2;
        if (t < 0.0 || t > 1.0) continue;
        if (distance(p, a + ab * t) <= half) ++count;
    }
    return count;
}

inline double triangle_signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// Point-in-triangle test, boundary inclusive.
inline bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d1 = triangle_signed_area(p, a, b);
    const double d2 = triangle_signed_area(p, b, c);
    const double d3 = triangle_signed_area(p, c, a);
    const bool has_neg = (d1 < 0) || (d2 < 0) || (d3 < 0);
    const bool has_pos = (d1 > 0) || (d2 > 0) || (d3 > 0);
    return !(has_neg && has_pos);
}

// Number of points inside the triangle (apex, post1, post2).
inline int triangle_count(const Vec2& apex, const Vec2& post1, const Vec2& post2,
                          std::span<const Vec2> points) {
    int count = 0;
    for (const Vec2& p : points)
        if (point_in_triangle(p, apex, post1, post2)) ++count;
    return count;
}

// Opening angle subtended by the two goalposts at a location.
inline double goal_opening_angle(const Vec2& p, const Pitch& pitch, bool right_goal) {
    auto [p1, p2] = pitch.goalposts(right_goal);
    return angle_between(p1 - p, p2 - p);
}

}  // namespace defcon
