#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "husc/capsule.hpp"

namespace husc {

constexpr int kJointCount = 24;
constexpr int kShapeCount = 10;

// Template mesh plus skinning data for a 24-joint articulated body.
// Large arrays are float32 so the on-disk container round-trips bit-exactly.
struct BodyAssets {
    std::vector<Eigen::Vector3f> template_vertices;            // meters, model frame
    std::vector<std::array<int32_t, 3>> faces;
    std::array<int32_t, kJointCount> kinematic_parents{};      // -1 for the root (joint 0)
    std::vector<std::vector<std::pair<int32_t, float>>> joint_regressor;  // per joint: (vertex, weight)
    std::vector<float> skinning_weights;                       // [vertex][joint], rows sum to 1
    std::vector<std::vector<Eigen::Vector3f>> shape_basis;     // 10 channels of per-vertex offsets
    Eigen::Vector3f up_axis{0.f, 1.f, 0.f};

    int vertex_count() const { return static_cast<int>(template_vertices.size()); }
    float weight(int vertex, int joint) const {
        return skinning_weights[static_cast<std::size_t>(vertex) * kJointCount + joint];
    }

    void validate() const;  // throws InvalidArgument on any broken invariant
};

struct BodyParams {
    std::array<Eigen::Vector3d, kJointCount> pose;  // axis-angle, radians
    std::array<double, kShapeCount> shape{};
    Eigen::Vector3d translation{0, 0, 0};           // camera space, meters

    BodyParams() {
        for (auto& p : pose) p.setZero();  // Eigen default-constructs uninitialized
    }

    void validate() const;  // finite values, |pose_j| < 2*pi
};

struct PosedMesh {
    std::vector<Eigen::Vector3d> vertices;             // camera space, meters
    std::vector<std::array<int32_t, 3>> faces;
    std::vector<int32_t> per_vertex_part;              // in [0, kJointCount)
    std::vector<Eigen::Vector2d> per_vertex_uv;        // in [0,1]^2, per-part chart
};

// Shape offsets, joint regression on the shaped template, axis-angle forward
// kinematics down the tree, linear blend skinning, then translation.
PosedMesh pose_mesh(const BodyAssets& assets, const BodyParams& params);

// Procedural 24-joint humanoid built from capsule tubes, weight 1 on the
// owning bone's proximal joint. Deterministic per seed; stands in for any
// externally licensed model.
BodyAssets generate_desk_model(int vertex_budget, uint64_t seed);

// One capsule per kinematic bone (parent joint to child joint). Radius is the
// max distance from the segment over the bone's dominant-weight vertices,
// clamped to >= 1 cm.
std::vector<Capsule> body_capsules(const BodyAssets& assets, const BodyParams& params);

// (parent, child) joint pairs in ascending child order; one entry per bone.
std::vector<std::pair<int, int>> kinematic_bones(const BodyAssets& assets);

// Joint centers of the shaped template (before pose) plus translation-free FK
// support; exposed because placement and tests reason about joints directly.
std::vector<Eigen::Vector3d> regress_joints(const BodyAssets& assets, const BodyParams& params);

// Posed joint centers in camera space (after FK and translation).
std::vector<Eigen::Vector3d> posed_joints(const BodyAssets& assets, const BodyParams& params);

// Dominant-skinning-weight joint per vertex.
std::vector<int32_t> part_labels(const BodyAssets& assets);

// JSON container with base64-embedded little-endian arrays ("husc-body-v1").
void save_body_assets(const BodyAssets& assets, const std::string& path);
BodyAssets load_body_assets(const std::string& path);

void save_body_params(const BodyParams& params, const std::string& path);
BodyParams load_body_params(const std::string& path);

}  // namespace husc
