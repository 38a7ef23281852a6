#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Geometry>

#include "husc/ground_plane.hpp"
#include "husc/scene_io.hpp"

namespace husc {

// Analytically ray-cast indoor scene with known geometry, used by tests and
// the make-fixture command. Depth is exact (quantized only by the chosen
// container), labels follow the geometry.
struct RoomFixture {
    SceneFrame frame;
    Plane true_plane;                 // exact floor plane
    Eigen::AlignedBox3d obstacle;     // desk (open room) or blocking box (occupied room)
};

// Floor at y = +1.2 (camera y down), back and side walls, ceiling, and a
// desk-sized box the camera can see both over and around.
RoomFixture make_room_fixture(uint64_t seed);

// Same shell, but a full-width solid box right behind the only visible floor
// strip: every grid placement must collide.
RoomFixture make_occupied_room_fixture(uint64_t seed);

// Writes rgb.png, depth.png (16-bit mm), labels.png, legend.json,
// camera.json into the directory.
void write_scene_files(const SceneFrame& frame, const std::string& dir);

}  // namespace husc
