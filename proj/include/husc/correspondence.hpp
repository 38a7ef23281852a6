#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "husc/camera.hpp"
#include "husc/image.hpp"
#include "husc/raster.hpp"

namespace husc {

// Per-pixel 2D offsets into a source image, gather-style: the value at p
// points at where the information for p lives. Invalid pixels carry (0,0).
struct DisplacementField {
    int width = 0, height = 0;
    std::vector<Eigen::Vector2f> offset;
    std::vector<uint8_t> valid;

    DisplacementField() = default;
    DisplacementField(int w, int h)
        : width(w), height(h),
          offset(static_cast<std::size_t>(w) * h, Eigen::Vector2f::Zero()),
          valid(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

// Per-pixel (part id, local chart coordinates) of the visible body surface.
// Part -1 marks empty pixels.
struct DensePoseMap {
    int width = 0, height = 0;
    std::vector<int16_t> part;
    std::vector<Eigen::Vector2f> uv;

    DensePoseMap() = default;
    DensePoseMap(int w, int h)
        : width(w), height(h),
          part(static_cast<std::size_t>(w) * h, -1),
          uv(static_cast<std::size_t>(w) * h, Eigen::Vector2f::Zero()) {}

    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

using MultiChannelMap = Image<float>;

// Offset from each target-covered pixel to the projection of the matching
// source surface point (same topology, barycentric transfer). Pixels whose
// source point falls behind the camera are invalid; source-side visibility
// is not required.
DisplacementField body_displacement_field(const Camera& cam, const PosedMesh& source,
                                          const PosedMesh& target,
                                          const RasterMap& target_raster);

// Part of the barycentric-dominant vertex plus interpolated chart coords.
DensePoseMap dense_pose_map(const RasterMap& raster, const PosedMesh& mesh);

// Gather warp: output(p) = bilinear sample of map at p + offset(p) on valid
// pixels, `fill` elsewhere. Out-of-bounds samples clamp to the edge.
MultiChannelMap warp(const MultiChannelMap& map, const DisplacementField& field, float fill);

// Nearest-neighbor validity, bilinear offsets scaled by the size ratio.
DisplacementField rescale_field(const DisplacementField& field, int new_width, int new_height);

// Adds an externally supplied correction on the base field's valid pixels
// (invalid correction pixels contribute nothing).
DisplacementField add_correction(const DisplacementField& base,
                                 const DisplacementField& correction);

// Multi-channel PFM (dx, dy, valid) plus a JSON header naming the channels.
void save_field(const DisplacementField& field, const std::string& pfm_path,
                const std::string& json_path);
DisplacementField load_field(const std::string& pfm_path);

// Multi-channel PFM (part, u, v), part -1 on empty pixels.
void save_dense_pose(const DensePoseMap& map, const std::string& pfm_path,
                     const std::string& json_path);
DensePoseMap load_dense_pose(const std::string& pfm_path);

}  // namespace husc
