#include "husc/placement.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "husc/error.hpp"

namespace husc {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::accepted: return "accepted";
        case Verdict::collision: return "collision";
        default: return "off_support";
    }
}

namespace {

// Deterministic in-plane basis: seed from the canonical axis least parallel
// to the normal (ties break to the smaller index).
void plane_basis(const Eigen::Vector3d& n, Eigen::Vector3d& e1, Eigen::Vector3d& e2) {
    int arg = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(n[i]) < std::abs(n[arg])) arg = i;
    e1 = n.cross(Eigen::Vector3d::Unit(arg)).normalized();
    e2 = n.cross(e1);
}

}  // namespace

std::vector<GridCell> floor_grid_cells(const Plane& plane,
                                       const std::vector<Eigen::Vector3d>& floor_points,
                                       double spacing) {
    if (!(spacing > 0.0)) throw InvalidArgument("floor_grid_cells: spacing must be > 0");

    Eigen::Vector3d e1, e2;
    plane_basis(plane.normal, e1, e2);
    const Eigen::Vector3d origin = -plane.d * plane.normal;  // plane point nearest 0

    struct Members {
        std::vector<Eigen::Vector3d> points;
    };
    std::map<std::pair<int64_t, int64_t>, Members> cells;  // (row, col), row-major order

    for (const auto& p : floor_points) {
        const Eigen::Vector3d proj = p - plane.signed_distance(p) * plane.normal;
        const double s = (proj - origin).dot(e1);
        const double t = (proj - origin).dot(e2);
        const auto col = static_cast<int64_t>(std::floor(s / spacing));
        const auto row = static_cast<int64_t>(std::floor(t / spacing));
        cells[{row, col}].points.push_back(proj);
    }

    std::vector<GridCell> out;
    out.reserve(cells.size());
    for (auto& [key, members] : cells) {
        // Canonical summation order makes the centroid independent of the
        // input point order.
        std::sort(members.points.begin(), members.points.end(),
                  [](const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
                      if (a.x() != b.x()) return a.x() < b.x();
                      if (a.y() != b.y()) return a.y() < b.y();
                      return a.z() < b.z();
                  });
        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
        for (const auto& p : members.points) centroid += p;
        centroid /= static_cast<double>(members.points.size());

        GridCell cell;
        cell.cell = Eigen::Vector2i(static_cast<int>(key.first), static_cast<int>(key.second));
        cell.anchor = centroid;
        cell.support = static_cast<int>(members.points.size());
        out.push_back(cell);
    }
    return out;
}

std::vector<Eigen::Vector3d> sample_floor_grid(const Plane& plane,
                                               const std::vector<Eigen::Vector3d>& floor_points,
                                               double spacing, int min_support) {
    std::vector<Eigen::Vector3d> anchors;
    for (const auto& cell : floor_grid_cells(plane, floor_points, spacing))
        if (cell.support >= min_support) anchors.push_back(cell.anchor);
    return anchors;
}

Eigen::Matrix3d align_up_to_normal(const Eigen::Vector3d& up, const Eigen::Vector3d& normal) {
    if (std::abs(up.norm() - 1.0) > 1e-6 || std::abs(normal.norm() - 1.0) > 1e-6)
        throw InvalidArgument("align_up_to_normal: inputs must be unit vectors");

    const Eigen::Vector3d cross = up.cross(normal);
    const double sin_angle = cross.norm();
    const double cos_angle = up.dot(normal);

    if (sin_angle < 1e-12) {
        if (cos_angle > 0.0) return Eigen::Matrix3d::Identity();
        // Antiparallel: pi about the smallest-index canonical axis not
        // parallel to up, orthogonalized against up.
        int axis = 0;
        while (axis < 2 && std::abs(up[axis]) > 0.9) ++axis;
        const Eigen::Vector3d raw = Eigen::Vector3d::Unit(axis);
        const Eigen::Vector3d ortho = (raw - raw.dot(up) * up).normalized();
        return Eigen::AngleAxisd(M_PI, ortho).toRotationMatrix();
    }

    return Eigen::AngleAxisd(std::atan2(sin_angle, cos_angle), cross / sin_angle)
        .toRotationMatrix();
}

namespace {

Eigen::Matrix3d rodrigues_mat(const Eigen::Vector3d& w) {
    const double angle = w.norm();
    if (angle < 1e-300) return Eigen::Matrix3d::Identity();
    return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Eigen::Vector3d axis_angle_of(const Eigen::Matrix3d& r) {
    const Eigen::AngleAxisd aa(r);
    return aa.angle() * aa.axis();
}

}  // namespace

BodyParams place_body(const BodyAssets& assets, const BodyParams& params, const Plane& plane,
                      const Eigen::Vector3d& anchor, double yaw) {
    params.validate();
    if (std::abs(plane.signed_distance(anchor)) > 1e-5)
        throw InvalidArgument("place_body: anchor is not on the plane");

    const Eigen::Matrix3d r0 = rodrigues_mat(params.pose[0]);
    const Eigen::Vector3d up_world = (r0 * assets.up_axis.cast<double>()).normalized();
    const Eigen::Matrix3d align = align_up_to_normal(up_world, plane.normal);
    const Eigen::Matrix3d yaw_rot =
        Eigen::AngleAxisd(yaw, plane.normal).toRotationMatrix();
    const Eigen::Matrix3d r_new = yaw_rot * align * r0;

    BodyParams placed = params;
    placed.pose[0] = axis_angle_of(r_new);
    placed.translation = Eigen::Vector3d::Zero();

    // Foot contact: drop the body so its lowest point along the normal sits
    // exactly at the anchor.
    const PosedMesh zero_t = pose_mesh(assets, placed);
    std::size_t low = 0;
    double low_h = plane.signed_distance(zero_t.vertices[0]);
    for (std::size_t v = 1; v < zero_t.vertices.size(); ++v) {
        const double h = plane.signed_distance(zero_t.vertices[v]);
        if (h < low_h) {
            low_h = h;
            low = v;
        }
    }
    placed.translation = anchor - zero_t.vertices[low];
    return placed;
}

namespace {

// 21 bits per axis, offset to keep packed keys positive.
uint64_t pack_cell(int64_t x, int64_t y, int64_t z) {
    constexpr int64_t kOffset = 1 << 20;
    return (static_cast<uint64_t>(x + kOffset) << 42) |
           (static_cast<uint64_t>(y + kOffset) << 21) |
           static_cast<uint64_t>(z + kOffset);
}

}  // namespace

CollisionResult check_collision(const std::vector<Capsule>& capsules,
                                const std::vector<Eigen::Vector3d>& scene_points,
                                const std::vector<int>& floor_mask_indices,
                                int tolerance_count) {
    CollisionResult result;
    if (capsules.empty() || scene_points.empty()) return result;

    std::vector<char> excluded(scene_points.size(), 0);
    for (int i : floor_mask_indices)
        if (i >= 0 && static_cast<std::size_t>(i) < scene_points.size()) excluded[i] = 1;

    double max_radius = 0.0;
    for (const auto& c : capsules) {
        if (!(c.radius > 0.0)) throw InvalidArgument("check_collision: capsule radius must be > 0");
        max_radius = std::max(max_radius, c.radius);
    }
    const double cell = 2.0 * max_radius;

    std::unordered_map<uint64_t, std::vector<int>> grid;
    for (std::size_t i = 0; i < scene_points.size(); ++i) {
        if (excluded[i]) continue;
        const auto& p = scene_points[i];
        grid[pack_cell(static_cast<int64_t>(std::floor(p.x() / cell)),
                       static_cast<int64_t>(std::floor(p.y() / cell)),
                       static_cast<int64_t>(std::floor(p.z() / cell)))]
            .push_back(static_cast<int>(i));
    }

    std::vector<char> hit(scene_points.size(), 0);
    for (const auto& cap : capsules) {
        const Eigen::Vector3d lo = cap.a.cwiseMin(cap.b).array() - cap.radius;
        const Eigen::Vector3d hi = cap.a.cwiseMax(cap.b).array() + cap.radius;
        const auto cx0 = static_cast<int64_t>(std::floor(lo.x() / cell));
        const auto cx1 = static_cast<int64_t>(std::floor(hi.x() / cell));
        const auto cy0 = static_cast<int64_t>(std::floor(lo.y() / cell));
        const auto cy1 = static_cast<int64_t>(std::floor(hi.y() / cell));
        const auto cz0 = static_cast<int64_t>(std::floor(lo.z() / cell));
        const auto cz1 = static_cast<int64_t>(std::floor(hi.z() / cell));
        for (int64_t cx = cx0; cx <= cx1; ++cx)
            for (int64_t cy = cy0; cy <= cy1; ++cy)
                for (int64_t cz = cz0; cz <= cz1; ++cz) {
                    const auto it = grid.find(pack_cell(cx, cy, cz));
                    if (it == grid.end()) continue;
                    for (int idx : it->second) {
                        if (hit[idx]) continue;
                        if (capsule_contains(cap, scene_points[idx])) hit[idx] = 1;
                    }
                }
    }

    result.count = static_cast<int>(std::count(hit.begin(), hit.end(), 1));
    result.verdict = result.count > tolerance_count ? Verdict::collision : Verdict::accepted;
    return result;
}

std::vector<PlacementRecord> evaluate_placements(
    const BodyAssets& assets, const BodyParams& params, const Plane& plane,
    const std::vector<GridCell>& cells, const std::vector<double>& yaws, int min_support,
    const std::vector<Eigen::Vector3d>& scene_points, const std::vector<int>& floor_mask_indices,
    int tolerance_count) {
    if (yaws.size() != cells.size())
        throw InvalidArgument("evaluate_placements: need one yaw per cell");

    const Eigen::Matrix3d r0 = rodrigues_mat(params.pose[0]);

    std::vector<PlacementRecord> records;
    records.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
        PlacementRecord rec;
        rec.grid_cell = cells[i].cell;
        rec.support = cells[i].support;
        rec.yaw = yaws[i];

        const BodyParams placed = place_body(assets, params, plane, cells[i].anchor, yaws[i]);
        rec.params = placed;
        rec.rotation = rodrigues_mat(placed.pose[0]);
        rec.translation = placed.translation;
        rec.view_adjustment = rec.rotation * r0.transpose();

        if (cells[i].support < min_support) {
            rec.verdict = Verdict::off_support;
        } else {
            const auto capsules = body_capsules(assets, placed);
            const auto coll =
                check_collision(capsules, scene_points, floor_mask_indices, tolerance_count);
            rec.verdict = coll.verdict;
            rec.collision_count = coll.count;
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace husc
