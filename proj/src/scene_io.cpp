#include "husc/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "husc/error.hpp"
#include "husc/pfm.hpp"
#include "husc/png_io.hpp"

namespace husc {

namespace {

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void SceneFrame::validate() const {
    camera.validate();
    const int w = camera.width, h = camera.height;
    if (rgb.width != w || rgb.height != h || rgb.channels != 3)
        throw InvalidArgument("SceneFrame: rgb layer does not match camera dimensions");
    if (depth.width != w || depth.height != h || depth.channels != 1)
        throw InvalidArgument("SceneFrame: depth layer does not match camera dimensions");
    if (labels.width != w || labels.height != h || labels.channels != 1)
        throw InvalidArgument("SceneFrame: labels layer does not match camera dimensions");
    for (float z : depth.data)
        if (!(z >= 0.f) || !std::isfinite(z))
            throw InvalidArgument("SceneFrame: depth must be finite and >= 0");
    for (uint8_t id : labels.data)
        if (!legend.count(id))
            throw InvalidArgument("SceneFrame: label id " + std::to_string(id) +
                                  " missing from legend");
}

FloorClassSet default_floor_classes() {
    return FloorClassSet{{"floor", "rug", "floor mat", "yoga mat"}};
}

SceneFrame load_scene(const std::string& rgb_path, const std::string& depth_path,
                      const std::string& labels_path, const std::string& legend_path,
                      const std::string& camera_path) {
    SceneFrame frame;
    frame.camera = load_camera_json(camera_path);
    frame.rgb = read_png_rgb8(rgb_path);

    if (has_suffix(depth_path, ".pfm")) {
        frame.depth = read_pfm(depth_path);
        if (frame.depth.channels != 1)
            throw IoError("load_scene: depth PFM must be single channel: " + depth_path);
    } else {
        const ImageU16 mm = read_png_gray16(depth_path);
        frame.depth = Image<float>(mm.width, mm.height, 1);
        for (std::size_t i = 0; i < mm.data.size(); ++i)
            frame.depth.data[i] = static_cast<float>(mm.data[i] / 1000.0);
    }

    frame.labels = read_png_gray8(labels_path);

    std::ifstream in(legend_path);
    if (!in) throw IoError("load_scene: cannot open legend " + legend_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_scene: legend parse error in " + legend_path + ": " + e.what());
    }
    for (const auto& [key, value] : j.items())
        frame.legend[std::stoi(key)] = value.get<std::string>();

    frame.validate();
    return frame;
}

void save_scene(const SceneFrame& frame, const std::string& rgb_path,
                const std::string& depth_path, const std::string& labels_path,
                const std::string& legend_path, const std::string& camera_path) {
    frame.validate();
    write_png_rgb8(frame.rgb, rgb_path);

    if (has_suffix(depth_path, ".pfm")) {
        write_pfm(frame.depth, depth_path);
    } else {
        ImageU16 mm(frame.depth.width, frame.depth.height, 1);
        for (std::size_t i = 0; i < mm.data.size(); ++i) {
            const double v = std::lround(static_cast<double>(frame.depth.data[i]) * 1000.0);
            mm.data[i] = static_cast<uint16_t>(std::clamp(v, 0.0, 65535.0));
        }
        write_png_gray16(mm, depth_path);
    }

    write_png_gray8(frame.labels, labels_path);

    nlohmann::json legend = nlohmann::json::object();
    for (const auto& [id, name] : frame.legend) legend[std::to_string(id)] = name;
    std::ofstream out(legend_path);
    if (!out) throw IoError("save_scene: cannot open " + legend_path);
    out << legend.dump(2) << "\n";

    save_camera_json(frame.camera, camera_path);
}

ImageU8 floor_mask(const SceneFrame& frame, const FloorClassSet& floor_classes) {
    if (floor_classes.names.empty())
        throw InvalidArgument("floor_mask: floor class set must be non-empty");

    // Resolve class ids once; matching is exact on lowercase names.
    std::set<int> floor_ids;
    for (const auto& [id, name] : frame.legend) {
        std::string lower = name;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (floor_classes.names.count(lower)) floor_ids.insert(id);
    }

    ImageU8 mask(frame.labels.width, frame.labels.height, 1, 0);
    for (int y = 0; y < mask.height; ++y)
        for (int x = 0; x < mask.width; ++x)
            if (floor_ids.count(frame.labels.at(x, y)) && frame.depth.at(x, y) > 0.f)
                mask.at(x, y) = 255;
    return mask;
}

}  // namespace husc
