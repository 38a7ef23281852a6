#pragma once

// Shared helpers for the test suites: cameras, seeded poses, scratch dirs.

#include <filesystem>
#include <string>

#include "husc/body_model.hpp"
#include "husc/camera.hpp"
#include "husc/rng.hpp"

namespace test_support {

inline husc::Camera square_camera(int size, double focal) {
    husc::Camera cam;
    cam.width = cam.height = size;
    cam.fx = cam.fy = focal;
    cam.cx = cam.cy = (size - 1) / 2.0;
    return cam;
}

// Upright body facing the camera at desk-test distance.
inline husc::BodyParams standing_params(double z = 2.2) {
    husc::BodyParams params;
    params.pose[0] = Eigen::Vector3d(M_PI, 0, 0);  // model +Y up -> camera -y
    params.translation = Eigen::Vector3d(0, 0.15, z);
    return params;
}

// Seeded random articulation around the standing pose.
inline husc::BodyParams articulated_params(uint64_t seed, double sigma = 0.15,
                                           double z = 2.2) {
    husc::BodyParams params = standing_params(z);
    husc::Rng rng(husc::derive_seed(seed, "articulate"));
    for (int j = 1; j < husc::kJointCount; ++j)
        params.pose[j] = Eigen::Vector3d(rng.uniform(-sigma, sigma), rng.uniform(-sigma, sigma),
                                         rng.uniform(-sigma, sigma));
    params.translation += Eigen::Vector3d(rng.uniform(-0.1, 0.1), rng.uniform(-0.05, 0.05),
                                          rng.uniform(-0.2, 0.2));
    return params;
}

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("husc_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                        std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace test_support
