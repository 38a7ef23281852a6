#pragma once

#include <string>

#include <json.hpp>

#include "husc/body_model.hpp"
#include "husc/correspondence.hpp"
#include "husc/image.hpp"
#include "husc/raster.hpp"
#include "husc/scene_io.hpp"

namespace husc {

// Composite plus the pseudo-ground-truth layers it implies.
struct CompositeBundle {
    ImageU8 rgb;
    ImageU8 person_mask;       // 255 where the person is visible
    Image<float> depth;        // fused, meters
    DensePoseMap dense_pose;
    BodyParams body_params;
    double occlusion_fraction = 0.0;

    // statistics carried into the manifest
    int covered_pixels = 0;
    int occluded_pixels = 0;
    int missing_scene_depth_pixels = 0;  // visible person over invalid scene depth
};

// Strict per-pixel depth ordering: the person wins where the model is
// nearer than the scene (invalid scene depth treated as infinitely far).
CompositeBundle composite(const SceneFrame& frame, const ImageU8& person_rgb,
                          const RasterMap& person_raster, const DensePoseMap& dense_pose,
                          const BodyParams& params);

// Writes rgb/mask PNGs, depth PFM, dense-pose PFM+JSON, params JSON and a
// "husc-bundle-v1" manifest referencing every file by relative path.
// `provenance` is embedded verbatim (seed, placement record, asset hash).
void export_bundle(const CompositeBundle& bundle, const std::string& out_dir,
                   const nlohmann::json& provenance = nlohmann::json::object());

}  // namespace husc
