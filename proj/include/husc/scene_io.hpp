#pragma once

#include <map>
#include <set>
#include <string>

#include "husc/camera.hpp"
#include "husc/image.hpp"

namespace husc {

// One background frame: RGB, metric depth (0 = invalid, NYU convention),
// semantic labels with a legend, and the camera that produced them.
struct SceneFrame {
    ImageU8 rgb;
    Image<float> depth;
    ImageU8 labels;
    std::map<int, std::string> legend;
    Camera camera;

    void validate() const;
};

// Semantic class names treated as support surfaces (lowercase, exact match).
struct FloorClassSet {
    std::set<std::string> names;
};

FloorClassSet default_floor_classes();  // floor, rug, floor mat, yoga mat

// Depth is read from 16-bit PNG millimeters or PFM meters, by extension.
SceneFrame load_scene(const std::string& rgb_path, const std::string& depth_path,
                      const std::string& labels_path, const std::string& legend_path,
                      const std::string& camera_path);

void save_scene(const SceneFrame& frame, const std::string& rgb_path,
                const std::string& depth_path, const std::string& labels_path,
                const std::string& legend_path, const std::string& camera_path);

// 255 where the pixel's class is a floor class and its depth is valid.
ImageU8 floor_mask(const SceneFrame& frame, const FloorClassSet& floor_classes);

}  // namespace husc
