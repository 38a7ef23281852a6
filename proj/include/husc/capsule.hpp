#pragma once

#include <Eigen/Core>

namespace husc {

// Segment with a radius, the body-approximation primitive.
struct Capsule {
    Eigen::Vector3d a{0, 0, 0};
    Eigen::Vector3d b{0, 0, 0};
    double radius = 0;
};

inline double point_segment_distance(const Eigen::Vector3d& p,
                                     const Eigen::Vector3d& a,
                                     const Eigen::Vector3d& b) {
    const Eigen::Vector3d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 0.0) return (p - a).norm();
    double t = (p - a).dot(ab) / len2;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return (p - (a + t * ab)).norm();
}

// Strict containment: points exactly on the surface do not count.
inline bool capsule_contains(const Capsule& c, const Eigen::Vector3d& p) {
    return point_segment_distance(p, c.a, c.b) < c.radius;
}

}  // namespace husc
