#include "husc/correspondence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "husc/error.hpp"
#include "husc/pfm.hpp"

namespace husc {

DisplacementField body_displacement_field(const Camera& cam, const PosedMesh& source,
                                          const PosedMesh& target,
                                          const RasterMap& target_raster) {
    if (source.vertices.size() != target.vertices.size() || source.faces != target.faces)
        throw InvalidArgument("body_displacement_field: source and target topology differ");
    if (target_raster.width != cam.width || target_raster.height != cam.height)
        throw InvalidArgument("body_displacement_field: raster does not match camera");

    DisplacementField field(cam.width, cam.height);
    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            const std::size_t at = target_raster.idx(x, y);
            const int32_t f = target_raster.face[at];
            if (f < 0) continue;
            const auto& face = target.faces[f];
            const auto& b = target_raster.bary[at];
            const Eigen::Vector3d src_point =
                static_cast<double>(b[0]) * source.vertices[face[0]] +
                static_cast<double>(b[1]) * source.vertices[face[1]] +
                static_cast<double>(b[2]) * source.vertices[face[2]];
            if (!(src_point.z() > kMinDepth)) continue;  // behind camera: stays invalid
            const double u = cam.fx * src_point.x() / src_point.z() + cam.cx;
            const double v = cam.fy * src_point.y() / src_point.z() + cam.cy;
            field.offset[at] = Eigen::Vector2f(static_cast<float>(u - x),
                                               static_cast<float>(v - y));
            field.valid[at] = 1;
        }
    }
    return field;
}

DensePoseMap dense_pose_map(const RasterMap& raster, const PosedMesh& mesh) {
    DensePoseMap map(raster.width, raster.height);
    for (int y = 0; y < raster.height; ++y) {
        for (int x = 0; x < raster.width; ++x) {
            const std::size_t at = raster.idx(x, y);
            const int32_t f = raster.face[at];
            if (f < 0) continue;
            const auto& face = mesh.faces[f];
            const auto& b = raster.bary[at];
            int dominant = 0;
            if (b[1] > b[dominant]) dominant = 1;
            if (b[2] > b[dominant]) dominant = 2;
            map.part[at] = static_cast<int16_t>(mesh.per_vertex_part[face[dominant]]);
            Eigen::Vector2d uv = Eigen::Vector2d::Zero();
            for (int k = 0; k < 3; ++k)
                uv += static_cast<double>(b[k]) * mesh.per_vertex_uv[face[k]];
            map.uv[at] = uv.cast<float>();
        }
    }
    return map;
}

namespace {

float sample_bilinear_clamped(const MultiChannelMap& map, double x, double y, int c) {
    x = std::clamp(x, 0.0, static_cast<double>(map.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(map.height - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, map.width - 1);
    const int y1 = std::min(y0 + 1, map.height - 1);
    const double fx = x - x0, fy = y - y0;
    const double top = (1.0 - fx) * map.at(x0, y0, c) + fx * map.at(x1, y0, c);
    const double bot = (1.0 - fx) * map.at(x0, y1, c) + fx * map.at(x1, y1, c);
    return static_cast<float>((1.0 - fy) * top + fy * bot);
}

}  // namespace

MultiChannelMap warp(const MultiChannelMap& map, const DisplacementField& field, float fill) {
    if (map.width != field.width || map.height != field.height)
        throw InvalidArgument("warp: field and map dimensions differ");

    MultiChannelMap out(map.width, map.height, map.channels, fill);
    for (int y = 0; y < map.height; ++y) {
        for (int x = 0; x < map.width; ++x) {
            const std::size_t at = field.idx(x, y);
            if (!field.valid[at]) continue;
            const double sx = x + field.offset[at].x();
            const double sy = y + field.offset[at].y();
            for (int c = 0; c < map.channels; ++c)
                out.at(x, y, c) = sample_bilinear_clamped(map, sx, sy, c);
        }
    }
    return out;
}

DisplacementField rescale_field(const DisplacementField& field, int new_width, int new_height) {
    if (new_width < 1 || new_height < 1)
        throw InvalidArgument("rescale_field: target size must be positive");

    DisplacementField out(new_width, new_height);
    const double sx = static_cast<double>(field.width) / new_width;
    const double sy = static_cast<double>(field.height) / new_height;
    const double gain_x = static_cast<double>(new_width) / field.width;
    const double gain_y = static_cast<double>(new_height) / field.height;

    for (int y = 0; y < new_height; ++y) {
        for (int x = 0; x < new_width; ++x) {
            // Pixel-area mapping: output center lands at (x+0.5)*sx - 0.5.
            const double src_x = (x + 0.5) * sx - 0.5;
            const double src_y = (y + 0.5) * sy - 0.5;
            const int nx = std::clamp(static_cast<int>(std::lround(src_x)), 0, field.width - 1);
            const int ny = std::clamp(static_cast<int>(std::lround(src_y)), 0, field.height - 1);
            const std::size_t at = out.idx(x, y);
            if (!field.valid[field.idx(nx, ny)]) continue;

            const double cx = std::clamp(src_x, 0.0, static_cast<double>(field.width - 1));
            const double cy = std::clamp(src_y, 0.0, static_cast<double>(field.height - 1));
            const int x0 = static_cast<int>(std::floor(cx));
            const int y0 = static_cast<int>(std::floor(cy));
            const int x1 = std::min(x0 + 1, field.width - 1);
            const int y1 = std::min(y0 + 1, field.height - 1);
            const double fx = cx - x0, fy = cy - y0;
            Eigen::Vector2d o =
                (1.0 - fy) * ((1.0 - fx) * field.offset[field.idx(x0, y0)].cast<double>() +
                              fx * field.offset[field.idx(x1, y0)].cast<double>()) +
                fy * ((1.0 - fx) * field.offset[field.idx(x0, y1)].cast<double>() +
                      fx * field.offset[field.idx(x1, y1)].cast<double>());
            out.offset[at] = Eigen::Vector2f(static_cast<float>(o.x() * gain_x),
                                             static_cast<float>(o.y() * gain_y));
            out.valid[at] = 1;
        }
    }
    return out;
}

DisplacementField add_correction(const DisplacementField& base,
                                 const DisplacementField& correction) {
    if (base.width != correction.width || base.height != correction.height)
        throw InvalidArgument("add_correction: field dimensions differ");
    DisplacementField out = base;
    for (std::size_t i = 0; i < out.offset.size(); ++i)
        if (out.valid[i] && correction.valid[i]) out.offset[i] += correction.offset[i];
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

void write_channel_header(const std::string& json_path, int width, int height,
                          const std::vector<std::string>& channels) {
    nlohmann::json j{{"width", width}, {"height", height}, {"channels", channels}};
    std::ofstream out(json_path);
    if (!out) throw IoError("cannot open " + json_path);
    out << j.dump(2) << "\n";
}

}  // namespace

void save_field(const DisplacementField& field, const std::string& pfm_path,
                const std::string& json_path) {
    Image<float> img(field.width, field.height, 3);
    for (int y = 0; y < field.height; ++y)
        for (int x = 0; x < field.width; ++x) {
            const std::size_t at = field.idx(x, y);
            img.at(x, y, 0) = field.offset[at].x();
            img.at(x, y, 1) = field.offset[at].y();
            img.at(x, y, 2) = field.valid[at] ? 1.f : 0.f;
        }
    write_pfm(img, pfm_path);
    write_channel_header(json_path, field.width, field.height, {"dx", "dy", "valid"});
}

DisplacementField load_field(const std::string& pfm_path) {
    const Image<float> img = read_pfm(pfm_path);
    if (img.channels != 3) throw IoError("load_field: expected 3 channels in " + pfm_path);
    DisplacementField field(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const std::size_t at = field.idx(x, y);
            field.valid[at] = img.at(x, y, 2) != 0.f ? 1 : 0;
            if (field.valid[at])
                field.offset[at] = Eigen::Vector2f(img.at(x, y, 0), img.at(x, y, 1));
        }
    return field;
}

void save_dense_pose(const DensePoseMap& map, const std::string& pfm_path,
                     const std::string& json_path) {
    Image<float> img(map.width, map.height, 3);
    for (int y = 0; y < map.height; ++y)
        for (int x = 0; x < map.width; ++x) {
            const std::size_t at = map.idx(x, y);
            img.at(x, y, 0) = static_cast<float>(map.part[at]);
            img.at(x, y, 1) = map.uv[at].x();
            img.at(x, y, 2) = map.uv[at].y();
        }
    write_pfm(img, pfm_path);
    write_channel_header(json_path, map.width, map.height, {"part", "u", "v"});
}

DensePoseMap load_dense_pose(const std::string& pfm_path) {
    const Image<float> img = read_pfm(pfm_path);
    if (img.channels != 3) throw IoError("load_dense_pose: expected 3 channels in " + pfm_path);
    DensePoseMap map(img.width, img.height);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const std::size_t at = map.idx(x, y);
            map.part[at] = static_cast<int16_t>(img.at(x, y, 0));
            map.uv[at] = Eigen::Vector2f(img.at(x, y, 1), img.at(x, y, 2));
        }
    return map;
}

}  // namespace husc
