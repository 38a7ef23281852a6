#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "husc/body_model.hpp"
#include "husc/error.hpp"
#include "husc/placement.hpp"
#include "husc/rng.hpp"
#include "support.hpp"

using namespace husc;

namespace {

Plane horizontal_plane(double y) {
    Plane plane;
    plane.normal = Eigen::Vector3d(0, -1, 0);
    plane.d = y;
    return plane;
}

double angle_to(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double c = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
    return std::acos(c);
}

// Brute-force any-capsule containment count over non-floor points.
int brute_force_count(const std::vector<Capsule>& capsules,
                      const std::vector<Eigen::Vector3d>& points,
                      const std::vector<int>& floor_indices) {
    std::vector<char> excluded(points.size(), 0);
    for (int i : floor_indices) excluded[i] = 1;
    int count = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (excluded[i]) continue;
        for (const auto& c : capsules)
            if (point_segment_distance(points[i], c.a, c.b) < c.radius) {
                ++count;
                break;
            }
    }
    return count;
}

}  // namespace

TEST_CASE("uniform floor yields one anchor per cell at the centroid") {
    const Plane plane = horizontal_plane(1.5);  // y = +1.5, n = (0,-1,0), d = 1.5

    // 16 cells: in-plane coords are s = z, t = -x; fill x in [-4,0), z in [0,4)
    std::vector<Eigen::Vector3d> points;
    for (int cz = 0; cz < 4; ++cz)
        for (int cx = 0; cx < 4; ++cx)
            for (int k = 0; k < 9; ++k)
                points.emplace_back(-cx - 0.25 - 0.05 * (k % 3), 1.5,
                                    cz + 0.25 + 0.05 * (k / 3));

    const auto anchors = sample_floor_grid(plane, points, 1.0, 1);
    CHECK(anchors.size() == 16);
    for (const auto& a : anchors) {
        CHECK(std::abs(plane.signed_distance(a)) < 1e-9);
        // each cell's nine points average to (-(cx + 0.3), 1.5, cz + 0.3)
        const double fx = -a.x() - std::floor(-a.x());
        const double fz = a.z() - std::floor(a.z());
        CHECK(fx == doctest::Approx(0.3).epsilon(1e-9));
        CHECK(fz == doctest::Approx(0.3).epsilon(1e-9));
    }
}

TEST_CASE("min_support above all counts gives an empty list") {
    const Plane plane = horizontal_plane(1.0);
    std::vector<Eigen::Vector3d> points;
    for (int i = 0; i < 50; ++i) points.emplace_back(i * 0.1, 1.0, 1.0 + (i % 5) * 0.1);
    CHECK(sample_floor_grid(plane, points, 0.5, 1000).empty());
    CHECK_THROWS_AS(sample_floor_grid(plane, points, 0.0, 1), InvalidArgument);
}

TEST_CASE("anchors are invariant to input point order") {
    const Plane plane = horizontal_plane(1.2);
    Rng rng(17);
    std::vector<Eigen::Vector3d> points;
    for (int i = 0; i < 500; ++i)
        points.emplace_back(rng.uniform(-2, 2), 1.2 + rng.uniform(-0.01, 0.01),
                            rng.uniform(0.5, 4.0));

    std::vector<Eigen::Vector3d> shuffled = points;
    for (std::size_t i = shuffled.size(); i > 1; --i)
        std::swap(shuffled[i - 1], shuffled[rng.next_below(i)]);

    const auto a = sample_floor_grid(plane, points, 0.5, 3);
    const auto b = sample_floor_grid(plane, shuffled, 0.5, 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);  // bitwise
}

TEST_CASE("align_up_to_normal") {
    SUBCASE("parallel gives the identity") {
        const Eigen::Vector3d up(0, 1, 0);
        CHECK(align_up_to_normal(up, up) == Eigen::Matrix3d::Identity());
    }

    SUBCASE("right-angle closed form") {
        const Eigen::Vector3d up(0, 1, 0), n(0, 0, 1);
        const Eigen::Matrix3d r = align_up_to_normal(up, n);
        CHECK((r * up - n).norm() < 1e-12);
    }

    SUBCASE("antiparallel uses a deterministic pi rotation") {
        const Eigen::Vector3d up(0, 1, 0);
        const Eigen::Matrix3d r = align_up_to_normal(up, -up);
        CHECK((r * up + up).norm() < 1e-12);
        CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
        CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
        // axis is the x axis (smallest index not parallel to +y): x stays put
        CHECK((r * Eigen::Vector3d::UnitX() - Eigen::Vector3d::UnitX()).norm() < 1e-12);
    }

    SUBCASE("1000 random unit pairs") {
        Rng rng(23);
        for (int i = 0; i < 1000; ++i) {
            Eigen::Vector3d up(rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian());
            Eigen::Vector3d n(rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian());
            if (up.norm() < 1e-6 || n.norm() < 1e-6) continue;
            up.normalize();
            n.normalize();
            const Eigen::Matrix3d r = align_up_to_normal(up, n);
            CHECK((r * up - n).norm() < 1e-9);
            CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-9);
            CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    SUBCASE("non-unit inputs are rejected") {
        CHECK_THROWS_AS(align_up_to_normal({0, 2, 0}, {0, 0, 1}), InvalidArgument);
        CHECK_THROWS_AS(align_up_to_normal({0, 1, 0}, {0, 0, 0.5}), InvalidArgument);
    }
}

TEST_CASE("place_body on an aligned plane keeps the root rotation and touches down") {
    const BodyAssets assets = generate_desk_model(1000, 7);
    const Plane plane = horizontal_plane(0.0);
    BodyParams base;
    base.pose[0] = Eigen::Vector3d(M_PI, 0, 0);  // up already along -y

    const BodyParams placed = place_body(assets, base, plane, Eigen::Vector3d::Zero(), 0.0);
    CHECK((placed.pose[0] - base.pose[0]).norm() < 1e-9);

    const PosedMesh mesh = pose_mesh(assets, placed);
    double min_h = 1e9;
    for (const auto& v : mesh.vertices) min_h = std::min(min_h, plane.signed_distance(v));
    CHECK(std::abs(min_h) < 1e-6);
}

TEST_CASE("yaw pi equals a rigid rotation of the yaw-0 placement about the anchor") {
    const BodyAssets assets = generate_desk_model(1000, 7);
    const Plane plane = horizontal_plane(1.0);
    const Eigen::Vector3d anchor(0.4, 1.0, 3.0);
    const BodyParams base = test_support::articulated_params(19);

    const PosedMesh mesh0 = pose_mesh(assets, place_body(assets, base, plane, anchor, 0.0));
    const PosedMesh mesh_pi = pose_mesh(assets, place_body(assets, base, plane, anchor, M_PI));

    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(M_PI, plane.normal).toRotationMatrix();
    for (std::size_t v = 0; v < mesh0.vertices.size(); ++v) {
        const Eigen::Vector3d expected = rot * (mesh0.vertices[v] - anchor) + anchor;
        CHECK((mesh_pi.vertices[v] - expected).norm() < 1e-6);
    }
}

TEST_CASE("tilted plane: transformed up axis is parallel to the normal") {
    const BodyAssets assets = generate_desk_model(800, 3);
    Plane plane;
    plane.normal = Eigen::Vector3d(std::sin(10.0 * M_PI / 180.0), -std::cos(10.0 * M_PI / 180.0), 0.0);
    plane.d = 1.1;
    const Eigen::Vector3d anchor = -plane.d * plane.normal;

    for (double yaw : {0.0, 0.7, 2.9}) {
        const BodyParams placed =
            place_body(assets, test_support::articulated_params(4), plane, anchor, yaw);
        const Eigen::Matrix3d r =
            Eigen::AngleAxisd(placed.pose[0].norm(), placed.pose[0].normalized())
                .toRotationMatrix();
        const Eigen::Vector3d up_world = r * assets.up_axis.cast<double>();
        CHECK(angle_to(up_world, plane.normal) < 1e-6);

        const PosedMesh mesh = pose_mesh(assets, placed);
        double min_h = 1e9;
        for (const auto& v : mesh.vertices) min_h = std::min(min_h, plane.signed_distance(v));
        CHECK(std::abs(min_h) < 1e-6);
    }
}

TEST_CASE("anchors off the plane are rejected") {
    const BodyAssets assets = generate_desk_model(400, 3);
    const Plane plane = horizontal_plane(1.0);
    CHECK_THROWS_AS(place_body(assets, BodyParams{}, plane, {0, 0.9, 2}, 0.0), InvalidArgument);
}

TEST_CASE("check_collision") {
    SUBCASE("empty scene accepts with zero count") {
        std::vector<Capsule> caps = {{{0, 0, 0}, {0, 1, 0}, 0.1}};
        const CollisionResult r = check_collision(caps, {}, {}, 0);
        CHECK(r.verdict == Verdict::accepted);
        CHECK(r.count == 0);
    }

    SUBCASE("point at the axis midpoint counts once") {
        std::vector<Capsule> caps = {{{0, 0, 0}, {0, 2, 0}, 0.25},
                                     {{0, 0.5, 0}, {0, 1.5, 0}, 0.5}};  // overlapping
        std::vector<Eigen::Vector3d> points = {{0, 1, 0}};
        const CollisionResult r = check_collision(caps, points, {}, 0);
        CHECK(r.count == 1);
        CHECK(r.verdict == Verdict::collision);
    }

    SUBCASE("boundary points are outside (strict containment)") {
        std::vector<Capsule> caps = {{{0, 0, 0}, {0, 1, 0}, 0.25}};
        std::vector<Eigen::Vector3d> points = {{0.25, 0.5, 0}};
        CHECK(check_collision(caps, points, {}, 0).count == 0);
    }

    SUBCASE("floor points are excluded") {
        std::vector<Capsule> caps = {{{0, 0, 0}, {0, 1, 0}, 0.3}};
        std::vector<Eigen::Vector3d> points = {{0, 0.2, 0}, {0, 0.5, 0}, {0, 0.8, 0}};
        const CollisionResult r = check_collision(caps, points, {0, 2}, 0);
        CHECK(r.count == 1);
    }

    SUBCASE("tolerance gates the verdict") {
        std::vector<Capsule> caps = {{{0, 0, 0}, {0, 1, 0}, 0.3}};
        std::vector<Eigen::Vector3d> points = {{0, 0.3, 0}, {0, 0.6, 0}};
        CHECK(check_collision(caps, points, {}, 2).verdict == Verdict::accepted);
        CHECK(check_collision(caps, points, {}, 1).verdict == Verdict::collision);
    }

    SUBCASE("voxel-hashed count equals brute force on random instances") {
        for (uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
            Rng rng(derive_seed(seed, "collision"));
            std::vector<Eigen::Vector3d> points;
            const int n = 2000 + static_cast<int>(rng.next_below(8000));
            for (int i = 0; i < n; ++i)
                points.emplace_back(rng.uniform(-2, 2), rng.uniform(-1, 2), rng.uniform(0, 5));

            std::vector<int> floor_idx;
            for (int i = 0; i < n; i += 7) floor_idx.push_back(i);

            std::vector<Capsule> caps;
            for (int c = 0; c < 23; ++c) {
                const Eigen::Vector3d a(rng.uniform(-2, 2), rng.uniform(-1, 2),
                                        rng.uniform(0, 5));
                const Eigen::Vector3d b =
                    a + Eigen::Vector3d(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                        rng.uniform(-0.5, 0.5));
                caps.push_back({a, b, rng.uniform(0.02, 0.3)});
            }

            const CollisionResult fast = check_collision(caps, points, floor_idx, 25);
            CHECK(fast.count == brute_force_count(caps, points, floor_idx));
        }
    }

    SUBCASE("count is monotone in radius") {
        Rng rng(99);
        std::vector<Eigen::Vector3d> points;
        for (int i = 0; i < 3000; ++i)
            points.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 2));
        std::vector<Capsule> caps;
        for (int c = 0; c < 8; ++c)
            caps.push_back({{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 2)},
                            {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, 2)},
                            0.1});
        const int base = check_collision(caps, points, {}, 0).count;
        for (auto& c : caps) c.radius *= 1.5;
        CHECK(check_collision(caps, points, {}, 0).count >= base);
    }
}

TEST_CASE("evaluate_placements reports every cell with a verdict") {
    const BodyAssets assets = generate_desk_model(600, 7);
    const Plane plane = horizontal_plane(1.2);

    std::vector<Eigen::Vector3d> floor_points;
    Rng rng(31);
    for (int i = 0; i < 2000; ++i)
        floor_points.emplace_back(rng.uniform(-2, 2), 1.2, rng.uniform(2, 5));

    const auto cells = floor_grid_cells(plane, floor_points, 1.0);
    REQUIRE(!cells.empty());
    const std::vector<double> yaws(cells.size(), 0.0);

    // scene cloud: the floor points themselves (excluded from collision)
    std::vector<int> floor_idx(floor_points.size());
    for (std::size_t i = 0; i < floor_idx.size(); ++i) floor_idx[i] = static_cast<int>(i);

    const auto records = evaluate_placements(assets, test_support::standing_params(), plane,
                                             cells, yaws, 10, floor_points, floor_idx, 25);
    REQUIRE(records.size() == cells.size());

    int accepted = 0;
    for (const auto& rec : records) {
        if (rec.verdict != Verdict::accepted) continue;
        ++accepted;
        CHECK(rec.collision_count <= 25);

        // rotation is orthonormal and maps the model up axis to the normal
        CHECK((rec.rotation * rec.rotation.transpose() - Eigen::Matrix3d::Identity()).norm() <
              1e-9);
        const Eigen::Vector3d up_world = rec.rotation * assets.up_axis.cast<double>();
        CHECK((up_world - plane.normal).norm() < 1e-6);

        // foot contact within a centimeter
        const PosedMesh mesh = pose_mesh(assets, rec.params);
        double min_h = 1e9;
        for (const auto& v : mesh.vertices) min_h = std::min(min_h, plane.signed_distance(v));
        CHECK(std::abs(min_h) < 0.01);
    }
    CHECK(accepted > 0);
}
