#include "husc/compositor.hpp"

#include <filesystem>
#include <fstream>

#include "husc/error.hpp"
#include "husc/pfm.hpp"
#include "husc/png_io.hpp"

namespace husc {

CompositeBundle composite(const SceneFrame& frame, const ImageU8& person_rgb,
                          const RasterMap& person_raster, const DensePoseMap& dense_pose,
                          const BodyParams& params) {
    frame.validate();
    const int w = frame.camera.width, h = frame.camera.height;
    if (person_rgb.width != w || person_rgb.height != h || person_rgb.channels != 3)
        throw InvalidArgument("composite: person rgb does not match frame dimensions");
    if (person_raster.width != w || person_raster.height != h)
        throw InvalidArgument("composite: person raster does not match frame dimensions");
    if (dense_pose.width != w || dense_pose.height != h)
        throw InvalidArgument("composite: dense pose does not match frame dimensions");

    CompositeBundle bundle;
    bundle.rgb = frame.rgb;
    bundle.person_mask = ImageU8(w, h, 1, 0);
    bundle.depth = frame.depth;
    bundle.dense_pose = dense_pose;
    bundle.body_params = params;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!person_raster.covered(x, y)) continue;
            ++bundle.covered_pixels;
            const float model_z = person_raster.depth[person_raster.idx(x, y)];
            const float scene_z = frame.depth.at(x, y);
            const bool scene_valid = scene_z > 0.f;
            if (!scene_valid || model_z < scene_z) {
                for (int c = 0; c < 3; ++c) bundle.rgb.at(x, y, c) = person_rgb.at(x, y, c);
                bundle.person_mask.at(x, y) = 255;
                bundle.depth.at(x, y) = model_z;
                if (!scene_valid) ++bundle.missing_scene_depth_pixels;
            } else {
                ++bundle.occluded_pixels;
            }
        }
    }
    bundle.occlusion_fraction =
        bundle.covered_pixels > 0
            ? static_cast<double>(bundle.occluded_pixels) / bundle.covered_pixels
            : 0.0;
    return bundle;
}

void export_bundle(const CompositeBundle& bundle, const std::string& out_dir,
                   const nlohmann::json& provenance) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("export_bundle: cannot create " + out_dir + ": " + ec.message());

    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    write_png_rgb8(bundle.rgb, path("composite_rgb.png"));
    write_png_gray8(bundle.person_mask, path("person_mask.png"));
    write_pfm(bundle.depth, path("depth.pfm"));
    save_dense_pose(bundle.dense_pose, path("dense_pose.pfm"), path("dense_pose.json"));
    save_body_params(bundle.body_params, path("body_params.json"));

    nlohmann::json manifest{
        {"format", "husc-bundle-v1"},
        {"files",
         {{"rgb", "composite_rgb.png"},
          {"person_mask", "person_mask.png"},
          {"depth", "depth.pfm"},
          {"dense_pose", "dense_pose.pfm"},
          {"dense_pose_header", "dense_pose.json"},
          {"body_params", "body_params.json"}}},
        {"occlusion_fraction", bundle.occlusion_fraction},
        {"stats",
         {{"covered_pixels", bundle.covered_pixels},
          {"occluded_pixels", bundle.occluded_pixels},
          {"missing_scene_depth_pixels", bundle.missing_scene_depth_pixels}}},
        {"provenance", provenance},
    };
    std::ofstream out(path("manifest.json"));
    if (!out) throw IoError("export_bundle: cannot open " + path("manifest.json"));
    out << manifest.dump(2) << "\n";
}

}  // namespace husc
