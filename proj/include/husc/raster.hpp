#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "husc/body_model.hpp"
#include "husc/camera.hpp"
#include "husc/image.hpp"

namespace husc {

// Per-pixel visibility: owning face, perspective-correct barycentric
// weights, interpolated depth. Face -1 marks uncovered pixels.
struct RasterMap {
    int width = 0, height = 0;
    std::vector<int32_t> face;
    std::vector<std::array<float, 3>> bary;
    std::vector<float> depth;

    RasterMap() = default;
    RasterMap(int w, int h)
        : width(w), height(h),
          face(static_cast<std::size_t>(w) * h, -1),
          bary(static_cast<std::size_t>(w) * h, {0.f, 0.f, 0.f}),
          depth(static_cast<std::size_t>(w) * h, 0.f) {}

    std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool covered(int x, int y) const { return face[idx(x, y)] >= 0; }
};

// Z-buffered coverage at pixel centers (integer coordinates), top-left fill
// rule, nearest face wins, ties within 1e-9 broken by lower face index.
// Faces with any vertex behind the camera are culled whole.
RasterMap rasterize(const Camera& cam, const PosedMesh& mesh);

// 255 where a face owns the pixel, 0 elsewhere.
ImageU8 silhouette(const RasterMap& raster);

// Barycentric interpolation of per-vertex colors over the covered pixels;
// `fill` elsewhere. Channel count follows the color array.
Image<float> shade_vertex_colors(const RasterMap& raster, const PosedMesh& mesh,
                                 const std::vector<std::array<float, 3>>& colors,
                                 float fill = 0.f);

}  // namespace husc
