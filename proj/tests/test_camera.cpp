#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "husc/camera.hpp"
#include "husc/error.hpp"
#include "husc/rng.hpp"
#include "support.hpp"

using namespace husc;

TEST_CASE("optical axis projects to the principal point") {
    Camera cam{500, 500, 320, 240, 640, 480};
    const Eigen::Vector3d uvz = project(cam, {0, 0, 2});
    CHECK(uvz.x() == doctest::Approx(320).epsilon(1e-12));
    CHECK(uvz.y() == doctest::Approx(240).epsilon(1e-12));
    CHECK(uvz.z() == 2.0);
}

TEST_CASE("projection closed form") {
    Camera cam{500, 450, 320, 240, 640, 480};
    const Eigen::Vector3d uvz = project(cam, {1, 0, 2});
    CHECK(uvz.x() == doctest::Approx(570).epsilon(1e-12));
    CHECK(uvz.y() == doctest::Approx(240).epsilon(1e-12));
}

TEST_CASE("points behind the camera are rejected") {
    Camera cam{500, 500, 320, 240, 640, 480};
    CHECK_THROWS_AS(project(cam, {0, 0, 0}), InvalidArgument);
    CHECK_THROWS_AS(project(cam, {0, 0, -1}), InvalidArgument);
    CHECK_THROWS_AS(project(cam, {0, 0, 5e-7}), InvalidArgument);
}

TEST_CASE("camera invariants are validated") {
    Camera bad{0, 500, 0, 0, 10, 10};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    Camera tiny{10, 10, 0, 0, 0, 5};
    CHECK_THROWS_AS(tiny.validate(), InvalidArgument);
}

TEST_CASE("project then back_project is the identity") {
    const Camera cam = test_support::square_camera(64, 90.0);
    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        const Eigen::Vector3d p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 5));
        const Eigen::Vector3d uvz = project(cam, p);
        const Eigen::Vector3d back((uvz.x() - cam.cx) * uvz.z() / cam.fx,
                                   (uvz.y() - cam.cy) * uvz.z() / cam.fy, uvz.z());
        CHECK((back - p).norm() < 1e-9);
    }
}

TEST_CASE("projection is scale covariant") {
    const Camera cam = test_support::square_camera(64, 90.0);
    Rng rng(12);
    for (int i = 0; i < 50; ++i) {
        const Eigen::Vector3d p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 5));
        const double s = rng.uniform(0.2, 4.0);
        const Eigen::Vector3d a = project(cam, p);
        const Eigen::Vector3d b = project(cam, s * p);
        CHECK(a.x() == doctest::Approx(b.x()).epsilon(1e-9));
        CHECK(a.y() == doctest::Approx(b.y()).epsilon(1e-9));
        CHECK(b.z() == doctest::Approx(s * p.z()).epsilon(1e-12));
    }
}

TEST_CASE("back_project of a constant plane") {
    const Camera cam = test_support::square_camera(32, 40.0);
    Image<float> depth(32, 32, 1, 2.f);
    const PointCloud cloud = back_project(cam, depth);
    REQUIRE(cloud.size() == 32 * 32);
    for (const auto& p : cloud.points) CHECK(p.z() == doctest::Approx(2.0));

    // corner pixel maps to the analytic lateral offset
    const Eigen::Vector3d corner = cloud.points.front();
    CHECK(corner.x() == doctest::Approx((0 - cam.cx) * 2.0 / cam.fx).epsilon(1e-12));
    CHECK(corner.y() == doctest::Approx((0 - cam.cy) * 2.0 / cam.fy).epsilon(1e-12));
}

TEST_CASE("invalid depth is skipped; all-invalid gives an empty cloud") {
    const Camera cam = test_support::square_camera(16, 20.0);
    Image<float> depth(16, 16, 1, 0.f);
    CHECK(back_project(cam, depth).size() == 0);

    depth.at(3, 4) = 1.5f;
    const PointCloud cloud = back_project(cam, depth);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud.pixels[0] == Eigen::Vector2i(3, 4));
}

TEST_CASE("mask predicate filters pixels") {
    const Camera cam = test_support::square_camera(8, 10.0);
    Image<float> depth(8, 8, 1, 1.f);
    const PointCloud cloud =
        back_project(cam, depth, [](int x, int) { return x < 4; });
    CHECK(cloud.size() == 8 * 4);
}

TEST_CASE("depth map dimension mismatch is an error") {
    const Camera cam = test_support::square_camera(16, 20.0);
    Image<float> depth(8, 16, 1, 1.f);
    CHECK_THROWS_AS(back_project(cam, depth), InvalidArgument);
}

TEST_CASE("depth rendered from a known plane back-projects onto it") {
    const Camera cam = test_support::square_camera(48, 60.0);
    // plane with normal toward -y, 1.4 m below the camera
    const Eigen::Vector3d n = Eigen::Vector3d(0.1, -1.0, 0.05).normalized();
    const double d = 1.4;

    Image<float> depth(48, 48, 1, 0.f);
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x) {
            const Eigen::Vector3d dir((x - cam.cx) / cam.fx, (y - cam.cy) / cam.fy, 1.0);
            const double denom = n.dot(dir);
            if (denom >= -1e-9) continue;  // ray parallel or away from the plane
            const double z = d / -denom;
            if (z > 0.2 && z < 50.0) depth.at(x, y) = static_cast<float>(z);
        }

    const PointCloud cloud = back_project(cam, depth);
    REQUIRE(cloud.size() > 100);
    for (const auto& p : cloud.points) CHECK(std::abs(n.dot(p) + d) < 1e-6);
}

TEST_CASE("camera json round trip") {
    test_support::TempDir dir("camera");
    Camera cam{321.5, 300.25, 123.125, 98.5, 640, 480};
    save_camera_json(cam, dir.file("cam.json"));
    const Camera back = load_camera_json(dir.file("cam.json"));
    CHECK(back.fx == cam.fx);
    CHECK(back.fy == cam.fy);
    CHECK(back.cx == cam.cx);
    CHECK(back.cy == cam.cy);
    CHECK(back.width == cam.width);
    CHECK(back.height == cam.height);
    CHECK_THROWS_AS(load_camera_json(dir.file("nope.json")), IoError);
}
