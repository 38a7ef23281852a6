#pragma once

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "husc/image.hpp"

namespace husc {

// Points with z below this are treated as behind the camera.
constexpr double kMinDepth = 1e-6;

// Pinhole intrinsics, no distortion. Pixel centers sit at integer
// coordinates; continuous image coordinates everywhere.
struct Camera {
    double fx = 0, fy = 0;
    double cx = 0, cy = 0;
    int width = 0, height = 0;

    void validate() const;
};

// (u, v, z): continuous pixel coordinate plus depth. Throws on z <= kMinDepth.
Eigen::Vector3d project(const Camera& cam, const Eigen::Vector3d& point);

struct PointCloud {
    std::vector<Eigen::Vector3d> points;
    std::vector<Eigen::Vector2i> pixels;  // source pixel (x, y) per point

    std::size_t size() const { return points.size(); }
};

using PixelPredicate = std::function<bool(int x, int y)>;

// Lifts every valid-depth pixel (depth > 0, passing the optional mask) back
// to camera space. Depth map dimensions must match the camera.
PointCloud back_project(const Camera& cam, const Image<float>& depth,
                        const PixelPredicate& mask = nullptr);

void save_camera_json(const Camera& cam, const std::string& path);
Camera load_camera_json(const std::string& path);

}  // namespace husc
