#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "defcon/geometry.hpp"

namespace defcon {

struct KinematicsSeries {
    std::vector<Vec2> velocity;
    std::vector<double> speed;
    std::vector<double> acceleration;
};

// Velocity by central difference over +-2 frames (one-sided at boundaries),
// acceleration by the same scheme applied to speed.
inline KinematicsSeries derive_kinematics(const std::vector<Vec2>& positions, double dt) {
    const std::size_t n = positions.size();
    if (n < 2) throw std::invalid_argument("derive_kinematics: need at least 2 samples");
    if (dt <= 0.0) throw std::invalid_argument("derive_kinematics: dt must be positive");

    KinematicsSeries out;
    out.velocity.resize(n);
    out.speed.resize(n);
    out.acceleration.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = i + 2 < n ? i + 2 : n - 1;
        const double span = static_cast<double>(hi - lo) * dt;
        out.velocity[i] = (positions[hi] - positions[lo]) * (1.0 / span);
        out.speed[i] = out.velocity[i].norm();
    }
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0;
        const std::size_t hi = i + 2 < n ? i + 2 : n - 1;
        const double span = static_cast<double>(hi - lo) * dt;
        out.acceleration[i] = (out.speed[hi] - out.speed[lo]) / span;
    }
    return out;
}

}  // namespace defcon
