#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "husc/compositor.hpp"
#include "husc/error.hpp"
#include "husc/pfm.hpp"
#include "husc/png_io.hpp"
#include "husc/rng.hpp"
#include "support.hpp"

using namespace husc;

namespace {

SceneFrame flat_scene(int size, float depth_m) {
    SceneFrame frame;
    frame.camera = test_support::square_camera(size, 60.0);
    frame.rgb = ImageU8(size, size, 3, 100);
    frame.depth = Image<float>(size, size, 1, depth_m);
    frame.labels = ImageU8(size, size, 1, 1);
    frame.legend = {{1, "floor"}};
    return frame;
}

// raster covering a centered square at constant depth
RasterMap square_raster(int size, int lo, int hi, float depth) {
    RasterMap raster(size, size);
    for (int y = lo; y <= hi; ++y)
        for (int x = lo; x <= hi; ++x) {
            const std::size_t at = raster.idx(x, y);
            raster.face[at] = 0;
            raster.bary[at] = {1.f, 0.f, 0.f};
            raster.depth[at] = depth;
        }
    return raster;
}

}  // namespace

TEST_CASE("person entirely nearer than the scene is fully visible") {
    const SceneFrame frame = flat_scene(32, 3.f);
    const RasterMap raster = square_raster(32, 8, 20, 2.f);
    const ImageU8 person(32, 32, 3, 200);
    const DensePoseMap dense(32, 32);

    const CompositeBundle bundle = composite(frame, person, raster, dense, BodyParams{});
    CHECK(bundle.occlusion_fraction == 0.0);
    const ImageU8 sil = silhouette(raster);
    CHECK(bundle.person_mask == sil);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            if (raster.covered(x, y)) {
                CHECK(bundle.rgb.at(x, y, 0) == 200);
                CHECK(bundle.depth.at(x, y) == 2.f);
            } else {
                CHECK(bundle.rgb.at(x, y, 0) == 100);
                CHECK(bundle.depth.at(x, y) == 3.f);
            }
        }
}

TEST_CASE("person entirely farther than the scene is fully occluded") {
    const SceneFrame frame = flat_scene(32, 2.f);
    const RasterMap raster = square_raster(32, 8, 20, 3.f);
    const ImageU8 person(32, 32, 3, 200);
    const DensePoseMap dense(32, 32);

    const CompositeBundle bundle = composite(frame, person, raster, dense, BodyParams{});
    CHECK(bundle.occlusion_fraction == 1.0);
    CHECK(bundle.rgb == frame.rgb);
    for (uint8_t v : bundle.person_mask.data) CHECK(v == 0);
}

TEST_CASE("person straddling a depth step matches the per-pixel oracle") {
    SceneFrame frame = flat_scene(48, 2.f);
    for (int y = 0; y < 48; ++y)
        for (int x = 24; x < 48; ++x) frame.depth.at(x, y) = 3.5f;  // far half
    // sprinkle some invalid scene depth: treated as infinitely far
    Rng rng(4);
    for (int i = 0; i < 60; ++i)
        frame.depth.at(static_cast<int>(rng.next_below(48)),
                       static_cast<int>(rng.next_below(48))) = 0.f;

    const RasterMap raster = square_raster(48, 10, 40, 2.5f);
    const ImageU8 person(48, 48, 3, 250);
    const DensePoseMap dense(48, 48);
    const CompositeBundle bundle = composite(frame, person, raster, dense, BodyParams{});

    int covered = 0, occluded = 0;
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x) {
            const bool cov = raster.covered(x, y);
            bool visible = false;
            if (cov) {
                ++covered;
                const float scene_z = frame.depth.at(x, y);
                visible = !(scene_z > 0.f) || 2.5f < scene_z;
                if (!visible) ++occluded;
            }
            CHECK((bundle.person_mask.at(x, y) == 255) == (cov && visible));
            CHECK(bundle.depth.at(x, y) == (cov && visible ? 2.5f : frame.depth.at(x, y)));
        }
    CHECK(bundle.covered_pixels == covered);
    CHECK(bundle.occlusion_fraction == doctest::Approx(double(occluded) / covered).epsilon(1e-12));
    CHECK(bundle.occlusion_fraction > 0.0);
    CHECK(bundle.occlusion_fraction < 1.0);
}

TEST_CASE("pass-through pixels equal the scene bit-exactly") {
    const SceneFrame frame = flat_scene(24, 2.f);
    const RasterMap raster = square_raster(24, 5, 12, 1.f);
    ImageU8 person(24, 24, 3, 0);
    const CompositeBundle bundle = composite(frame, person, raster, DensePoseMap(24, 24), BodyParams{});
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x)
            if (!bundle.person_mask.at(x, y))
                for (int c = 0; c < 3; ++c)
                    CHECK(bundle.rgb.at(x, y, c) == frame.rgb.at(x, y, c));
}

TEST_CASE("fused depth never exceeds valid scene depth") {
    SceneFrame frame = flat_scene(24, 2.f);
    const RasterMap raster = square_raster(24, 3, 20, 1.5f);
    const CompositeBundle bundle =
        composite(frame, ImageU8(24, 24, 3, 9), raster, DensePoseMap(24, 24), BodyParams{});
    for (int y = 0; y < 24; ++y)
        for (int x = 0; x < 24; ++x)
            if (frame.depth.at(x, y) > 0.f)
                CHECK(bundle.depth.at(x, y) <= frame.depth.at(x, y));
}

TEST_CASE("empty raster passes the frame through unchanged") {
    const SceneFrame frame = flat_scene(16, 2.f);
    const RasterMap empty(16, 16);
    const CompositeBundle bundle =
        composite(frame, ImageU8(16, 16, 3, 50), empty, DensePoseMap(16, 16), BodyParams{});
    CHECK(bundle.rgb == frame.rgb);
    CHECK(bundle.depth == frame.depth);
    CHECK(bundle.occlusion_fraction == 0.0);
    CHECK(bundle.covered_pixels == 0);
}

TEST_CASE("dimension mismatches are rejected") {
    const SceneFrame frame = flat_scene(16, 2.f);
    const RasterMap raster(16, 16);
    CHECK_THROWS_AS(
        composite(frame, ImageU8(8, 16, 3, 0), raster, DensePoseMap(16, 16), BodyParams{}),
        InvalidArgument);
    CHECK_THROWS_AS(
        composite(frame, ImageU8(16, 16, 3, 0), RasterMap(8, 8), DensePoseMap(16, 16), BodyParams{}),
        InvalidArgument);
}

TEST_CASE("export_bundle writes a reloadable, fully referenced set") {
    test_support::TempDir dir("bundle");
    SceneFrame frame = flat_scene(32, 3.f);
    const RasterMap raster = square_raster(32, 6, 25, 2.f);
    ImageU8 person(32, 32, 3, 0);
    Rng rng(6);
    for (auto& v : person.data) v = static_cast<uint8_t>(rng.next_below(256));

    DensePoseMap dense(32, 32);
    for (int y = 6; y <= 25; ++y)
        for (int x = 6; x <= 25; ++x) {
            dense.part[dense.idx(x, y)] = 3;
            dense.uv[dense.idx(x, y)] = Eigen::Vector2f(0.25f, 0.5f);
        }

    const BodyParams params = test_support::articulated_params(12);
    const CompositeBundle bundle = composite(frame, person, raster, dense, params);
    export_bundle(bundle, dir.path().string(), {{"seed", 5}});

    // every manifest file reference exists
    std::ifstream in(dir.file("manifest.json"));
    REQUIRE(in.good());
    nlohmann::json manifest;
    in >> manifest;
    CHECK(manifest.at("format") == "husc-bundle-v1");
    for (const auto& [key, rel] : manifest.at("files").items())
        CHECK(std::filesystem::exists(dir.path() / rel.get<std::string>()));
    CHECK(manifest.at("provenance").at("seed") == 5);

    // layers reload bit-identically
    CHECK(read_png_rgb8(dir.file("composite_rgb.png")) == bundle.rgb);
    CHECK(read_png_gray8(dir.file("person_mask.png")) == bundle.person_mask);
    CHECK(read_pfm(dir.file("depth.pfm")) == bundle.depth);
    const DensePoseMap dback = load_dense_pose(dir.file("dense_pose.pfm"));
    CHECK(dback.part == bundle.dense_pose.part);
    CHECK(dback.uv == bundle.dense_pose.uv);
    const BodyParams pback = load_body_params(dir.file("body_params.json"));
    for (int j = 0; j < kJointCount; ++j)
        CHECK((pback.pose[j] - params.pose[j]).norm() < 1e-15);
}

TEST_CASE("empty-coverage bundle still exports a valid set") {
    test_support::TempDir dir("bundle_empty");
    const SceneFrame frame = flat_scene(16, 2.f);
    const CompositeBundle bundle = composite(frame, ImageU8(16, 16, 3, 0), RasterMap(16, 16),
                                             DensePoseMap(16, 16), BodyParams{});
    export_bundle(bundle, dir.path().string());
    const ImageU8 mask = read_png_gray8(dir.file("person_mask.png"));
    for (uint8_t v : mask.data) CHECK(v == 0);
}
