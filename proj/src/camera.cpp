#include "husc/camera.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "husc/error.hpp"

namespace husc {

void Camera::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
        throw InvalidArgument("Camera: focal lengths must be positive");
    if (width < 1 || height < 1)
        throw InvalidArgument("Camera: image size must be at least 1x1");
    if (!std::isfinite(fx) || !std::isfinite(fy) || !std::isfinite(cx) || !std::isfinite(cy))
        throw InvalidArgument("Camera: non-finite intrinsics");
}

Eigen::Vector3d project(const Camera& cam, const Eigen::Vector3d& point) {
    if (!(point.z() > kMinDepth))
        throw InvalidArgument("project: point behind camera (z <= 1e-6 m)");
    return {cam.fx * point.x() / point.z() + cam.cx,
            cam.fy * point.y() / point.z() + cam.cy,
            point.z()};
}

PointCloud back_project(const Camera& cam, const Image<float>& depth,
                        const PixelPredicate& mask) {
    cam.validate();
    if (depth.width != cam.width || depth.height != cam.height || depth.channels != 1)
        throw InvalidArgument("back_project: depth map dimensions do not match camera");

    PointCloud cloud;
    for (int y = 0; y < depth.height; ++y) {
        for (int x = 0; x < depth.width; ++x) {
            const double z = depth.at(x, y);
            if (!(z > 0.0)) continue;  // 0 (or negative/NaN) marks invalid depth
            if (mask && !mask(x, y)) continue;
            cloud.points.emplace_back((x - cam.cx) * z / cam.fx,
                                      (y - cam.cy) * z / cam.fy, z);
            cloud.pixels.emplace_back(x, y);
        }
    }
    return cloud;
}

void save_camera_json(const Camera& cam, const std::string& path) {
    nlohmann::json j{{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx},
                     {"cy", cam.cy}, {"width", cam.width}, {"height", cam.height}};
    std::ofstream out(path);
    if (!out) throw IoError("save_camera_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

Camera load_camera_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_camera_json: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_camera_json: parse error in " + path + ": " + e.what());
    }
    Camera cam;
    try {
        cam.fx = j.at("fx").get<double>();
        cam.fy = j.at("fy").get<double>();
        cam.cx = j.at("cx").get<double>();
        cam.cy = j.at("cy").get<double>();
        cam.width = j.at("width").get<int>();
        cam.height = j.at("height").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_camera_json: missing field in " + path + ": " + e.what());
    }
    cam.validate();
    return cam;
}

}  // namespace husc
