#include "husc/raster.hpp"

#include <algorithm>
#include <cmath>

#include "husc/error.hpp"

namespace husc {

namespace {

constexpr double kDepthTie = 1e-9;

double edge(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

// Top-left fill rule in y-down raster coordinates. With positive edge
// orientation the interior lies right of the travel direction, so a top edge
// runs rightward and a left edge runs upward; only those own their pixels.
bool top_left(double ax, double ay, double bx, double by) {
    if (ay == by) return bx > ax;
    return by < ay;
}

}  // namespace

RasterMap rasterize(const Camera& cam, const PosedMesh& mesh) {
    cam.validate();
    if (mesh.faces.empty()) throw InvalidArgument("rasterize: mesh has no faces");
    for (const auto& v : mesh.vertices)
        if (!v.allFinite()) throw InvalidArgument("rasterize: non-finite vertex");

    const int n = static_cast<int>(mesh.vertices.size());
    std::vector<double> px(n), py(n), pz(n);
    for (int i = 0; i < n; ++i) {
        const auto& v = mesh.vertices[i];
        pz[i] = v.z();
        if (v.z() > kMinDepth) {
            px[i] = cam.fx * v.x() / v.z() + cam.cx;
            py[i] = cam.fy * v.y() / v.z() + cam.cy;
        }
    }

    RasterMap out(cam.width, cam.height);
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& face = mesh.faces[f];
        int i0 = face[0], i1 = face[1], i2 = face[2];
        if (pz[i0] <= kMinDepth || pz[i1] <= kMinDepth || pz[i2] <= kMinDepth)
            continue;  // behind-camera culling, whole face

        double area = edge(px[i0], py[i0], px[i1], py[i1], px[i2], py[i2]);
        if (area == 0.0) continue;
        if (area < 0.0) {  // normalize winding so edge functions are >= 0 inside
            std::swap(i1, i2);
            area = -area;
        }

        // clamp in double first: near-camera vertices can project far outside int range
        const int x0 = static_cast<int>(
            std::clamp(std::ceil(std::min({px[i0], px[i1], px[i2]})), 0.0, double(cam.width)));
        const int x1 = static_cast<int>(std::clamp(
            std::floor(std::max({px[i0], px[i1], px[i2]})), -1.0, double(cam.width - 1)));
        const int y0 = static_cast<int>(
            std::clamp(std::ceil(std::min({py[i0], py[i1], py[i2]})), 0.0, double(cam.height)));
        const int y1 = static_cast<int>(std::clamp(
            std::floor(std::max({py[i0], py[i1], py[i2]})), -1.0, double(cam.height - 1)));
        if (x0 > x1 || y0 > y1) continue;

        const bool tl0 = top_left(px[i1], py[i1], px[i2], py[i2]);
        const bool tl1 = top_left(px[i2], py[i2], px[i0], py[i0]);
        const bool tl2 = top_left(px[i0], py[i0], px[i1], py[i1]);

        const double inv_z0 = 1.0 / pz[i0], inv_z1 = 1.0 / pz[i1], inv_z2 = 1.0 / pz[i2];

        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double w0 = edge(px[i1], py[i1], px[i2], py[i2], x, y);
                const double w1 = edge(px[i2], py[i2], px[i0], py[i0], x, y);
                const double w2 = edge(px[i0], py[i0], px[i1], py[i1], x, y);
                if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
                if ((w0 == 0.0 && !tl0) || (w1 == 0.0 && !tl1) || (w2 == 0.0 && !tl2)) continue;

                // Perspective-correct interpolation via 1/z.
                const double l0 = w0 / area, l1 = w1 / area, l2 = w2 / area;
                const double denom = l0 * inv_z0 + l1 * inv_z1 + l2 * inv_z2;
                const double z = 1.0 / denom;

                const std::size_t at = out.idx(x, y);
                const bool take =
                    out.face[at] < 0 || z < out.depth[at] - kDepthTie ||
                    (std::abs(z - out.depth[at]) <= kDepthTie &&
                     static_cast<int32_t>(f) < out.face[at]);
                if (!take) continue;

                double b0 = l0 * inv_z0 / denom;
                double b1 = l1 * inv_z1 / denom;
                double b2 = l2 * inv_z2 / denom;
                const double sum = b0 + b1 + b2;
                b0 /= sum;
                b1 /= sum;
                b2 /= sum;

                out.face[at] = static_cast<int32_t>(f);
                out.depth[at] = static_cast<float>(z);
                // Store in the face's original vertex order.
                if (i1 == face[1]) {
                    out.bary[at] = {static_cast<float>(b0), static_cast<float>(b1),
                                    static_cast<float>(b2)};
                } else {  // winding was flipped
                    out.bary[at] = {static_cast<float>(b0), static_cast<float>(b2),
                                    static_cast<float>(b1)};
                }
            }
        }
    }
    return out;
}

ImageU8 silhouette(const RasterMap& raster) {
    ImageU8 mask(raster.width, raster.height, 1, 0);
    for (int y = 0; y < raster.height; ++y)
        for (int x = 0; x < raster.width; ++x)
            if (raster.covered(x, y)) mask.at(x, y) = 255;
    return mask;
}

Image<float> shade_vertex_colors(const RasterMap& raster, const PosedMesh& mesh,
                                 const std::vector<std::array<float, 3>>& colors,
                                 float fill) {
    if (colors.size() != mesh.vertices.size())
        throw InvalidArgument("shade_vertex_colors: one color per vertex required");
    Image<float> out(raster.width, raster.height, 3, fill);
    for (int y = 0; y < raster.height; ++y) {
        for (int x = 0; x < raster.width; ++x) {
            const std::size_t at = raster.idx(x, y);
            const int32_t f = raster.face[at];
            if (f < 0) continue;
            const auto& face = mesh.faces[f];
            const auto& b = raster.bary[at];
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = b[0] * colors[face[0]][c] + b[1] * colors[face[1]][c] +
                                  b[2] * colors[face[2]][c];
        }
    }
    return out;
}

}  // namespace husc
