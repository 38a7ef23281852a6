#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace husc {

// Oriented support plane: n.x + d = 0 with |n| = 1 and n pointing into the
// scene's "up" half-space (n.(0,-1,0) >= 0, image y pointing down).
struct Plane {
    Eigen::Vector3d normal{0, -1, 0};
    double d = 0;
    std::vector<int> inlier_indices;
    double rms_residual = 0;

    double signed_distance(const Eigen::Vector3d& p) const { return normal.dot(p) + d; }
};

constexpr double kDefaultPlaneThreshold = 0.02;  // meters, Kinect-class depth noise
constexpr int kDefaultRansacIterations = 1000;

// Total least squares: centroid plus smallest principal direction of the
// covariance. Throws DegenerateGeometry on < 3 points or collinear input.
Plane fit_plane_lsq(const std::vector<Eigen::Vector3d>& points);

// Hypothesize from 3-point samples, score by inlier count (ties keep the
// earlier iteration), refit by least squares on the winning inliers.
// Deterministic per seed. Throws EstimationFailure when no hypothesis gains
// support beyond its own minimal sample.
Plane fit_plane_ransac(const std::vector<Eigen::Vector3d>& points, double threshold,
                       int iterations, uint64_t seed);

void save_plane_json(const Plane& plane, const std::string& path);
Plane load_plane_json(const std::string& path);

}  // namespace husc
