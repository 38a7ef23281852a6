#include "husc/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "husc/error.hpp"
#include "husc/rng.hpp"

namespace husc {

namespace {

constexpr int kLabelFloor = 1;
constexpr int kLabelWall = 2;
constexpr int kLabelTable = 3;
constexpr int kLabelCeiling = 4;

struct Hit {
    double t = std::numeric_limits<double>::infinity();
    int label = 0;
};

void consider(Hit& best, double t, int label) {
    if (t > 0.05 && t < best.t) {
        best.t = t;
        best.label = label;
    }
}

// Ray/AABB slab test; returns entry parameter or infinity.
double box_entry(const Eigen::Vector3d& dir, const Eigen::AlignedBox3d& box) {
    double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
        if (dir[k] == 0.0) {
            if (0.0 < box.min()[k] || 0.0 > box.max()[k])
                return std::numeric_limits<double>::infinity();
            continue;
        }
        double a = box.min()[k] / dir[k];
        double b = box.max()[k] / dir[k];
        if (a > b) std::swap(a, b);
        t0 = std::max(t0, a);
        t1 = std::min(t1, b);
    }
    return (t0 <= t1) ? std::max(t0, 0.05) : std::numeric_limits<double>::infinity();
}

RoomFixture build(uint64_t seed, bool occupied) {
    RoomFixture fixture;

    Camera cam;
    cam.width = 256;
    cam.height = 192;
    cam.fx = cam.fy = 200.0;
    cam.cx = (cam.width - 1) / 2.0;
    cam.cy = (cam.height - 1) / 2.0;

    const double floor_y = 1.2;
    const double ceiling_y = -1.3;
    const double back_z = 6.0;
    const double side_x = 2.6;

    Eigen::AlignedBox3d obstacle;
    if (occupied) {
        // Full-width solid block right behind the visible floor strip.
        obstacle = Eigen::AlignedBox3d(Eigen::Vector3d(-side_x, ceiling_y, 2.70),
                                       Eigen::Vector3d(side_x, floor_y, back_z));
    } else {
        // Desk the camera can look both over and past.
        obstacle = Eigen::AlignedBox3d(Eigen::Vector3d(-0.4, 0.45, 2.8),
                                       Eigen::Vector3d(0.7, floor_y, 3.4));
    }

    SceneFrame& frame = fixture.frame;
    frame.camera = cam;
    frame.rgb = ImageU8(cam.width, cam.height, 3);
    frame.depth = Image<float>(cam.width, cam.height, 1);
    frame.labels = ImageU8(cam.width, cam.height, 1);
    frame.legend = {{kLabelFloor, "floor"},
                    {kLabelWall, "wall"},
                    {kLabelTable, "table"},
                    {kLabelCeiling, "ceiling"}};

    Rng rng(derive_seed(seed, "room-texture"));
    const int tex_salt = static_cast<int>(rng.next_below(97));

    for (int y = 0; y < cam.height; ++y) {
        for (int x = 0; x < cam.width; ++x) {
            const Eigen::Vector3d dir((x - cam.cx) / cam.fx, (y - cam.cy) / cam.fy, 1.0);
            Hit hit;
            if (dir.y() > 0.0) consider(hit, floor_y / dir.y(), kLabelFloor);
            if (dir.y() < 0.0) consider(hit, ceiling_y / dir.y(), kLabelCeiling);
            consider(hit, back_z / dir.z(), kLabelWall);
            if (dir.x() > 0.0) consider(hit, side_x / dir.x(), kLabelWall);
            if (dir.x() < 0.0) consider(hit, -side_x / dir.x(), kLabelWall);
            consider(hit, box_entry(dir, obstacle), kLabelTable);

            frame.depth.at(x, y) = static_cast<float>(hit.t * dir.z());  // dir.z == 1
            frame.labels.at(x, y) = static_cast<uint8_t>(hit.label);

            // Flat base color with a mild deterministic weave.
            int base[3];
            switch (hit.label) {
                case kLabelFloor: base[0] = 125; base[1] = 98; base[2] = 70; break;
                case kLabelTable: base[0] = 160; base[1] = 60; base[2] = 50; break;
                case kLabelCeiling: base[0] = 210; base[1] = 210; base[2] = 205; break;
                default: base[0] = 170; base[1] = 175; base[2] = 185; break;
            }
            const int weave = ((x * 7 + y * 13 + tex_salt) % 11) - 5;
            for (int c = 0; c < 3; ++c)
                frame.rgb.at(x, y, c) = static_cast<uint8_t>(std::clamp(base[c] + 3 * weave, 0, 255));
        }
    }

    fixture.true_plane.normal = Eigen::Vector3d(0, -1, 0);
    fixture.true_plane.d = floor_y;
    fixture.obstacle = obstacle;

    frame.validate();
    return fixture;
}

}  // namespace

RoomFixture make_room_fixture(uint64_t seed) { return build(seed, false); }

RoomFixture make_occupied_room_fixture(uint64_t seed) { return build(seed, true); }

void write_scene_files(const SceneFrame& frame, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("write_scene_files: cannot create " + dir + ": " + ec.message());
    const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
    save_scene(frame, path("rgb.png"), path("depth.png"), path("labels.png"),
               path("legend.json"), path("camera.json"));
}

}  // namespace husc
