#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>

#include "husc/error.hpp"
#include "husc/ground_plane.hpp"
#include "husc/rng.hpp"
#include "support.hpp"

using namespace husc;

namespace {

struct SyntheticFloor {
    std::vector<Eigen::Vector3d> points;
    std::vector<int> true_inliers;  // indices of on-plane points
    Eigen::Vector3d normal;
    double d = 0;
};

// Tilted floor patch with Gaussian noise plus uniform outliers in a 5 m box.
SyntheticFloor make_floor(uint64_t seed, int n_inliers, int n_outliers, double noise_sigma,
                          double tilt = 0.2) {
    SyntheticFloor floor;
    Rng rng(derive_seed(seed, "floor"));

    Eigen::Vector3d n(rng.uniform(-tilt, tilt), -1.0, rng.uniform(-tilt, tilt));
    n.normalize();
    const double d = rng.uniform(1.0, 2.0);
    floor.normal = n;
    floor.d = d;

    Eigen::Vector3d e1 = n.cross(Eigen::Vector3d::UnitX()).normalized();
    Eigen::Vector3d e2 = n.cross(e1);
    const Eigen::Vector3d origin = -d * n;

    for (int i = 0; i < n_inliers; ++i) {
        const Eigen::Vector3d p = origin + rng.uniform(-1.5, 1.5) * e1 +
                                  rng.uniform(-1.5, 1.5) * e2 +
                                  noise_sigma * rng.next_gaussian() * n;
        floor.true_inliers.push_back(static_cast<int>(floor.points.size()));
        floor.points.push_back(p);
    }
    for (int i = 0; i < n_outliers; ++i)
        floor.points.emplace_back(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5),
                                  rng.uniform(0.0, 5.0));
    return floor;
}

double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    const double c = std::clamp(std::abs(a.normalized().dot(b.normalized())), 0.0, 1.0);
    return std::acos(c);
}

}  // namespace

TEST_CASE("exact horizontal plane is recovered with zero residual") {
    std::vector<Eigen::Vector3d> points;
    Rng rng(1);
    for (int i = 0; i < 100; ++i)
        points.emplace_back(rng.uniform(-2, 2), -1.5, rng.uniform(-2, 2));

    const Plane plane = fit_plane_lsq(points);
    CHECK((plane.normal - Eigen::Vector3d(0, -1, 0)).norm() < 1e-9);
    CHECK(plane.d == doctest::Approx(-1.5).epsilon(1e-9));
    CHECK(plane.rms_residual < 1e-12);
    CHECK(plane.inlier_indices.size() == points.size());
}

TEST_CASE("noisy plane: rms tracks sigma and the normal stays tight") {
    const SyntheticFloor floor = make_floor(3, 10000, 0, 0.005);
    const Plane plane = fit_plane_lsq(floor.points);
    CHECK(plane.rms_residual == doctest::Approx(0.005).epsilon(0.5));
    CHECK(angle_between(plane.normal, floor.normal) < 0.5 * M_PI / 180.0);
}

TEST_CASE("degenerate inputs are rejected") {
    CHECK_THROWS_AS(fit_plane_lsq({{0, 0, 0}, {1, 1, 1}}), DegenerateGeometry);

    std::vector<Eigen::Vector3d> collinear;
    for (int i = 0; i < 3; ++i) collinear.emplace_back(i * 0.5, i * 1.0, i * -0.25);
    CHECK_THROWS_AS(fit_plane_lsq(collinear), DegenerateGeometry);

    std::vector<Eigen::Vector3d> coincident(5, Eigen::Vector3d(1, 2, 3));
    CHECK_THROWS_AS(fit_plane_lsq(coincident), DegenerateGeometry);
}

TEST_CASE("normal orientation follows the sign convention") {
    // construction gives an upward-ish normal either way; n.y must be <= 0
    const SyntheticFloor floor = make_floor(9, 500, 0, 0.002);
    const Plane plane = fit_plane_lsq(floor.points);
    CHECK(plane.normal.y() <= 0.0);
    CHECK(plane.normal.norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ransac on pure inliers matches the least-squares fit") {
    const SyntheticFloor floor = make_floor(5, 2000, 0, 0.003);
    const Plane lsq = fit_plane_lsq(floor.points);
    const Plane ransac = fit_plane_ransac(floor.points, 0.02, 300, 42);
    CHECK((ransac.normal - lsq.normal).norm() < 1e-9);
    CHECK(ransac.d == doctest::Approx(lsq.d).epsilon(1e-9));
    CHECK(ransac.inlier_indices.size() == floor.points.size());
}

TEST_CASE("ransac survives 30% outliers") {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        const SyntheticFloor floor = make_floor(seed, 1400, 600, 0.005);
        const Plane plane = fit_plane_ransac(floor.points, 0.02, 500, seed);

        CHECK(angle_between(plane.normal, floor.normal) < 1.0 * M_PI / 180.0);

        std::vector<char> recovered(floor.points.size(), 0);
        for (int idx : plane.inlier_indices) recovered[idx] = 1;
        int hit = 0;
        for (int idx : floor.true_inliers) hit += recovered[idx];
        CHECK(static_cast<double>(hit) / floor.true_inliers.size() >= 0.95);
    }
}

TEST_CASE("uniform random points with a tiny threshold fail estimation") {
    Rng rng(123);
    std::vector<Eigen::Vector3d> points;
    for (int i = 0; i < 500; ++i)
        points.emplace_back(rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5),
                            rng.uniform(0.0, 5.0));
    CHECK_THROWS_AS(fit_plane_ransac(points, 1e-6, 200, 9), EstimationFailure);
}

TEST_CASE("published inliers respect the threshold") {
    const SyntheticFloor floor = make_floor(7, 1000, 400, 0.008);
    const double threshold = 0.02;
    const Plane plane = fit_plane_ransac(floor.points, threshold, 400, 7);
    for (int idx : plane.inlier_indices)
        CHECK(std::abs(plane.signed_distance(floor.points[idx])) <= threshold);
    CHECK(plane.rms_residual <= threshold);
}

TEST_CASE("refit never increases rms over the raw 3-point hypothesis") {
    // reproduce a raw hypothesis and compare against the least-squares refit
    const SyntheticFloor floor = make_floor(11, 300, 0, 0.01);
    Rng rng(55);
    for (int trial = 0; trial < 20; ++trial) {
        const auto pick = [&] { return floor.points[rng.next_below(floor.points.size())]; };
        const Eigen::Vector3d a = pick(), b = pick(), c = pick();
        const Eigen::Vector3d raw_n = (b - a).cross(c - a);
        if (raw_n.norm() < 1e-9) continue;
        const Eigen::Vector3d n = raw_n.normalized();
        const double d = -n.dot(a);

        std::vector<int> inliers;
        for (std::size_t i = 0; i < floor.points.size(); ++i)
            if (std::abs(n.dot(floor.points[i]) + d) <= 0.03)
                inliers.push_back(static_cast<int>(i));
        if (inliers.size() < 3) continue;

        double raw_ss = 0.0;
        std::vector<Eigen::Vector3d> subset;
        for (int idx : inliers) {
            const double r = n.dot(floor.points[idx]) + d;
            raw_ss += r * r;
            subset.push_back(floor.points[idx]);
        }
        const double raw_rms = std::sqrt(raw_ss / inliers.size());

        const Plane refit = fit_plane_lsq(subset);
        CHECK(refit.rms_residual <= raw_rms + 1e-12);
    }
}

TEST_CASE("seed determinism: identical plane and inliers") {
    const SyntheticFloor floor = make_floor(13, 800, 350, 0.006);
    const Plane a = fit_plane_ransac(floor.points, 0.02, 300, 77);
    const Plane b = fit_plane_ransac(floor.points, 0.02, 300, 77);
    CHECK(a.normal == b.normal);
    CHECK(a.d == b.d);
    CHECK(a.inlier_indices == b.inlier_indices);
    CHECK(a.rms_residual == b.rms_residual);

    const Plane c = fit_plane_ransac(floor.points, 0.02, 300, 78);
    CHECK((a.normal != c.normal || a.inlier_indices != c.inlier_indices));
}

TEST_CASE("parameter validation") {
    const SyntheticFloor floor = make_floor(2, 100, 0, 0.001);
    CHECK_THROWS_AS(fit_plane_ransac(floor.points, 0.0, 100, 1), InvalidArgument);
    CHECK_THROWS_AS(fit_plane_ransac(floor.points, 0.02, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(fit_plane_ransac({{0, 0, 0}, {1, 0, 0}}, 0.02, 10, 1), DegenerateGeometry);
}

TEST_CASE("plane json round trip") {
    test_support::TempDir dir("plane");
    Plane plane;
    plane.normal = Eigen::Vector3d(0.1, -0.99, 0.05).normalized();
    plane.d = 1.375;
    plane.rms_residual = 0.004;
    plane.inlier_indices = {1, 2, 3};
    save_plane_json(plane, dir.file("p.json"));
    const Plane back = load_plane_json(dir.file("p.json"));
    CHECK((back.normal - plane.normal).norm() < 1e-15);
    CHECK(back.d == plane.d);
    CHECK(back.rms_residual == plane.rms_residual);
}
