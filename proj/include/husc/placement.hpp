#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "husc/body_model.hpp"
#include "husc/capsule.hpp"
#include "husc/ground_plane.hpp"

namespace husc {

enum class Verdict { accepted, collision, off_support };

std::string to_string(Verdict v);

// Grid cell on the support plane: 2D index in the in-plane basis, centroid
// of its projected members, member count.
struct GridCell {
    Eigen::Vector2i cell;
    Eigen::Vector3d anchor;
    int support = 0;
};

// All occupied cells of a regular in-plane grid over the projected floor
// points, row-major by cell index. Anchors are the per-cell centroids and
// are invariant to the order of the input points.
std::vector<GridCell> floor_grid_cells(const Plane& plane,
                                       const std::vector<Eigen::Vector3d>& floor_points,
                                       double spacing);

// Anchors of cells with at least min_support members.
std::vector<Eigen::Vector3d> sample_floor_grid(const Plane& plane,
                                               const std::vector<Eigen::Vector3d>& floor_points,
                                               double spacing, int min_support);

// Minimal rotation taking `up` to `normal`; identity when parallel, a pi
// turn about a deterministic orthogonal axis when antiparallel. Both inputs
// must be unit length within 1e-6.
Eigen::Matrix3d align_up_to_normal(const Eigen::Vector3d& up, const Eigen::Vector3d& normal);

// Rewrites the root orientation (plane alignment, then yaw about the
// normal) and sets the translation so the lowest vertex touches the plane
// exactly at the anchor.
BodyParams place_body(const BodyAssets& assets, const BodyParams& params, const Plane& plane,
                      const Eigen::Vector3d& anchor, double yaw);

struct CollisionResult {
    Verdict verdict = Verdict::accepted;
    int count = 0;
};

// Counts non-floor scene points strictly inside any capsule, via a uniform
// voxel hash (cell size twice the largest radius). Matches the brute-force
// all-pairs count exactly.
CollisionResult check_collision(const std::vector<Capsule>& capsules,
                                const std::vector<Eigen::Vector3d>& scene_points,
                                const std::vector<int>& floor_mask_indices,
                                int tolerance_count);

constexpr int kDefaultCollisionTolerance = 25;

// One evaluated candidate; every grid cell yields a record so the full table
// can be audited.
struct PlacementRecord {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  // placed root orientation
    Eigen::Vector3d translation{0, 0, 0};
    Eigen::Vector2i grid_cell{0, 0};
    double yaw = 0;
    Verdict verdict = Verdict::off_support;
    int collision_count = 0;
    int support = 0;
    Eigen::Matrix3d view_adjustment = Eigen::Matrix3d::Identity();  // relative root rotation
    BodyParams params;
};

// Runs alignment, foot-contact placement and collision for every grid cell.
// Cells below min_support are reported as off_support and skip the collision
// test. yaws must be one angle per cell.
std::vector<PlacementRecord> evaluate_placements(
    const BodyAssets& assets, const BodyParams& params, const Plane& plane,
    const std::vector<GridCell>& cells, const std::vector<double>& yaws, int min_support,
    const std::vector<Eigen::Vector3d>& scene_points, const std::vector<int>& floor_mask_indices,
    int tolerance_count);

}  // namespace husc
