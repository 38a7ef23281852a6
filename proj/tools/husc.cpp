// husc - geometric human-scene compositing pipeline.
//
// Subcommands: fit-plane, place, displace, composite, perturb, ssim,
// pipeline, make-fixture. Exit codes: 0 success, 1 I/O or usage error,
// 2 estimation failure, 3 no valid placement.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "husc/body_model.hpp"
#include "husc/camera.hpp"
#include "husc/compositor.hpp"
#include "husc/correspondence.hpp"
#include "husc/error.hpp"
#include "husc/fixture.hpp"
#include "husc/ground_plane.hpp"
#include "husc/metrics.hpp"
#include "husc/perturb.hpp"
#include "husc/placement.hpp"
#include "husc/png_io.hpp"
#include "husc/raster.hpp"
#include "husc/rng.hpp"
#include "husc/scene_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct CliConfig {
    std::string rgb, depth, labels, legend, camera;
    std::vector<std::string> floor_classes = {"floor", "rug", "floor mat", "yoga mat"};
    double ransac_threshold = husc::kDefaultPlaneThreshold;
    int ransac_iterations = husc::kDefaultRansacIterations;
    double grid_spacing = 0.5;
    int min_support = 20;
    std::string yaw_policy = "fixed";  // fixed | seeded
    double yaw = 0.0;
    int collision_tolerance = husc::kDefaultCollisionTolerance;
    uint64_t seed = 0;
    bool seed_set = false;
    std::string assets, params;
    std::string person_rgb, source_params, target_params, correction;
    std::string placements;
    int placement_index = -1;  // -1: first accepted
    std::string a, b;
    std::string out;

    void validate_numeric() const {
        if (!(ransac_threshold > 0.0)) throw husc::InvalidArgument("ransac-threshold must be > 0");
        if (ransac_iterations < 1) throw husc::InvalidArgument("ransac-iterations must be >= 1");
        if (!(grid_spacing > 0.0)) throw husc::InvalidArgument("grid-spacing must be > 0");
        if (min_support < 1) throw husc::InvalidArgument("min-support must be >= 1");
        if (collision_tolerance < 0) throw husc::InvalidArgument("collision-tolerance must be >= 0");
        if (yaw_policy != "fixed" && yaw_policy != "seeded")
            throw husc::InvalidArgument("yaw-policy must be 'fixed' or 'seeded'");
    }

    void require_seed() const {
        if (!seed_set)
            throw husc::InvalidArgument("--seed is required when a stochastic stage runs");
    }
};

// JSON config file keys mirror the kebab-case flags; explicit flags win.
void apply_config_file(CliConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw husc::IoError("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw husc::IoError("config: parse error in " + path + ": " + e.what());
    }
    for (const auto& [key, value] : j.items()) {
        if (key == "rgb") cfg.rgb = value.get<std::string>();
        else if (key == "depth") cfg.depth = value.get<std::string>();
        else if (key == "labels") cfg.labels = value.get<std::string>();
        else if (key == "legend") cfg.legend = value.get<std::string>();
        else if (key == "camera") cfg.camera = value.get<std::string>();
        else if (key == "floor-classes") cfg.floor_classes = value.get<std::vector<std::string>>();
        else if (key == "ransac-threshold") cfg.ransac_threshold = value.get<double>();
        else if (key == "ransac-iterations") cfg.ransac_iterations = value.get<int>();
        else if (key == "grid-spacing") cfg.grid_spacing = value.get<double>();
        else if (key == "min-support") cfg.min_support = value.get<int>();
        else if (key == "yaw-policy") cfg.yaw_policy = value.get<std::string>();
        else if (key == "yaw") cfg.yaw = value.get<double>();
        else if (key == "collision-tolerance") cfg.collision_tolerance = value.get<int>();
        else if (key == "seed") { cfg.seed = value.get<uint64_t>(); cfg.seed_set = true; }
        else if (key == "assets") cfg.assets = value.get<std::string>();
        else if (key == "params") cfg.params = value.get<std::string>();
        else if (key == "person-rgb") cfg.person_rgb = value.get<std::string>();
        else if (key == "source-params") cfg.source_params = value.get<std::string>();
        else if (key == "target-params") cfg.target_params = value.get<std::string>();
        else if (key == "correction") cfg.correction = value.get<std::string>();
        else if (key == "placements") cfg.placements = value.get<std::string>();
        else if (key == "placement-index") cfg.placement_index = value.get<int>();
        else throw husc::InvalidArgument("config: unknown key '" + key + "'");
    }
}

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw husc::IoError("cannot hash " + path);
    uint64_t h = 0xcbf29ce484222325ull;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
        if (!in) break;
    }
    return h;
}

std::string fnv1a_file_hex(const std::string& path) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a_file(path)));
    return hex;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw husc::IoError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

// Invocation-stable manifest: inputs, parameters and seed, but never the
// output directory, so reruns into a fresh tree match byte for byte.
json config_manifest(const CliConfig& cfg, const std::string& command) {
    json j{{"command", command}};
    json c = json::object();
    auto put = [&](const char* key, const std::string& v) {
        if (!v.empty()) c[key] = v;
    };
    put("rgb", cfg.rgb);
    put("depth", cfg.depth);
    put("labels", cfg.labels);
    put("legend", cfg.legend);
    put("camera", cfg.camera);
    put("assets", cfg.assets);
    put("params", cfg.params);
    put("person-rgb", cfg.person_rgb);
    put("source-params", cfg.source_params);
    put("target-params", cfg.target_params);
    put("correction", cfg.correction);
    put("placements", cfg.placements);
    c["floor-classes"] = cfg.floor_classes;
    c["ransac-threshold"] = cfg.ransac_threshold;
    c["ransac-iterations"] = cfg.ransac_iterations;
    c["grid-spacing"] = cfg.grid_spacing;
    c["min-support"] = cfg.min_support;
    c["yaw-policy"] = cfg.yaw_policy;
    c["yaw"] = cfg.yaw;
    c["collision-tolerance"] = cfg.collision_tolerance;
    c["placement-index"] = cfg.placement_index;
    if (cfg.seed_set) c["seed"] = cfg.seed;
    j["config"] = c;
    return j;
}

json matrix_json(const Eigen::Matrix3d& m) {
    json a = json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
    return a;
}

json vector_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json params_json(const husc::BodyParams& p) {
    json pose = json::array();
    for (const auto& w : p.pose) pose.push_back({w.x(), w.y(), w.z()});
    return {{"pose", pose}, {"shape", p.shape}, {"translation", vector_json(p.translation)}};
}

husc::BodyParams params_from_json(const json& j) {
    husc::BodyParams p;
    const auto& pose = j.at("pose");
    for (int i = 0; i < husc::kJointCount; ++i)
        p.pose[i] = Eigen::Vector3d(pose[i][0].get<double>(), pose[i][1].get<double>(),
                                    pose[i][2].get<double>());
    for (int i = 0; i < husc::kShapeCount; ++i) p.shape[i] = j.at("shape")[i].get<double>();
    p.translation = Eigen::Vector3d(j.at("translation")[0].get<double>(),
                                    j.at("translation")[1].get<double>(),
                                    j.at("translation")[2].get<double>());
    return p;
}

json plane_json(const husc::Plane& plane) {
    return {{"normal", vector_json(plane.normal)},
            {"d", plane.d},
            {"rms", plane.rms_residual},
            {"num_inliers", plane.inlier_indices.size()}};
}

json record_json(const husc::PlacementRecord& rec) {
    return {{"rotation", matrix_json(rec.rotation)},
            {"translation", vector_json(rec.translation)},
            {"cell", {rec.grid_cell.x(), rec.grid_cell.y()}},
            {"yaw", rec.yaw},
            {"verdict", husc::to_string(rec.verdict)},
            {"collision_count", rec.collision_count},
            {"support", rec.support},
            {"view_adjustment", matrix_json(rec.view_adjustment)},
            {"params", params_json(rec.params)}};
}

// Shared plumbing for plane estimation: full-scene cloud, floor point
// indices, RANSAC plane over the floor subset.
struct SceneGeometry {
    husc::SceneFrame frame;
    husc::PointCloud cloud;          // every valid-depth pixel
    std::vector<int> floor_indices;  // into cloud
    husc::Plane plane;
};

SceneGeometry estimate_scene(const CliConfig& cfg) {
    SceneGeometry geo;
    geo.frame = husc::load_scene(cfg.rgb, cfg.depth, cfg.labels, cfg.legend, cfg.camera);

    husc::FloorClassSet classes;
    classes.names.insert(cfg.floor_classes.begin(), cfg.floor_classes.end());
    const husc::ImageU8 mask = husc::floor_mask(geo.frame, classes);

    geo.cloud = husc::back_project(geo.frame.camera, geo.frame.depth);
    std::vector<Eigen::Vector3d> floor_points;
    for (std::size_t i = 0; i < geo.cloud.size(); ++i) {
        const auto& px = geo.cloud.pixels[i];
        if (mask.at(px.x(), px.y())) {
            geo.floor_indices.push_back(static_cast<int>(i));
            floor_points.push_back(geo.cloud.points[i]);
        }
    }
    if (floor_points.size() < 3)
        throw husc::EstimationFailure("no usable floor pixels in the scene");

    geo.plane = husc::fit_plane_ransac(floor_points, cfg.ransac_threshold,
                                       cfg.ransac_iterations,
                                       husc::derive_seed(cfg.seed, "fit-plane"));
    return geo;
}

int cmd_fit_plane(const CliConfig& cfg) {
    cfg.validate_numeric();
    cfg.require_seed();
    const SceneGeometry geo = estimate_scene(cfg);

    const json j = plane_json(geo.plane);
    std::cout << j.dump(2) << std::endl;
    if (!cfg.out.empty()) {
        fs::create_directories(cfg.out);
        write_json_file(j, (fs::path(cfg.out) / "plane.json").string());
        json manifest = config_manifest(cfg, "fit-plane");
        manifest["files"] = {"plane.json"};
        write_json_file(manifest, (fs::path(cfg.out) / "manifest.json").string());
    }
    return 0;
}

// Returns the record table; the caller decides what failure means.
std::vector<husc::PlacementRecord> run_placements(const CliConfig& cfg, const SceneGeometry& geo,
                                                  const husc::BodyAssets& assets,
                                                  const husc::BodyParams& params) {
    std::vector<Eigen::Vector3d> inlier_points;
    for (int idx : geo.plane.inlier_indices)
        inlier_points.push_back(geo.cloud.points[geo.floor_indices[idx]]);

    const auto cells = husc::floor_grid_cells(geo.plane, inlier_points, cfg.grid_spacing);

    std::vector<double> yaws(cells.size(), cfg.yaw);
    if (cfg.yaw_policy == "seeded") {
        const uint64_t yaw_seed = husc::derive_seed(cfg.seed, "yaw");
        for (std::size_t i = 0; i < cells.size(); ++i)
            yaws[i] = husc::Rng(husc::derive_seed(yaw_seed, static_cast<uint64_t>(i)))
                          .uniform(0.0, kTwoPi);
    }

    return husc::evaluate_placements(assets, params, geo.plane, cells, yaws, cfg.min_support,
                                     geo.cloud.points, geo.floor_indices,
                                     cfg.collision_tolerance);
}

json placements_json(const CliConfig& cfg, const SceneGeometry& geo,
                     const std::vector<husc::PlacementRecord>& records) {
    json candidates = json::array();
    for (const auto& rec : records) candidates.push_back(record_json(rec));
    return {{"format", "husc-placements-v1"},
            {"plane", plane_json(geo.plane)},
            {"grid-spacing", cfg.grid_spacing},
            {"view_adjustment_note",
             "relative rotation from the original root orientation to the placed one "
             "(plane alignment then yaw); viewpoint-dependent appearance correction is "
             "left to downstream consumers"},
            {"candidates", candidates}};
}

int cmd_place(const CliConfig& cfg) {
    cfg.validate_numeric();
    cfg.require_seed();
    const SceneGeometry geo = estimate_scene(cfg);
    const husc::BodyAssets assets = husc::load_body_assets(cfg.assets);
    const husc::BodyParams params = husc::load_body_params(cfg.params);

    const auto records = run_placements(cfg, geo, assets, params);
    const json j = placements_json(cfg, geo, records);

    int accepted = 0;
    for (const auto& rec : records)
        if (rec.verdict == husc::Verdict::accepted) ++accepted;

    if (!cfg.out.empty()) {
        fs::create_directories(cfg.out);
        write_json_file(j, (fs::path(cfg.out) / "placements.json").string());
        json manifest = config_manifest(cfg, "place");
        manifest["files"] = {"placements.json"};
        write_json_file(manifest, (fs::path(cfg.out) / "manifest.json").string());
    } else {
        std::cout << j.dump(2) << std::endl;
    }

    std::cerr << "place: " << accepted << "/" << records.size() << " candidates accepted\n";
    return accepted > 0 ? 0 : 3;
}

// Part-colored rendering used when no source appearance is supplied.
husc::ImageU8 render_person(const husc::RasterMap& raster, const husc::PosedMesh& mesh) {
    std::vector<std::array<float, 3>> colors(mesh.vertices.size());
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        const int part = mesh.per_vertex_part[v];
        const float hue = part / 24.0f;
        const auto& uv = mesh.per_vertex_uv[v];
        colors[v] = {0.25f + 0.75f * hue, 0.2f + 0.6f * static_cast<float>(uv.x()),
                     0.9f - 0.7f * hue};
    }
    const husc::Image<float> shaded = husc::shade_vertex_colors(raster, mesh, colors, 0.f);
    husc::ImageU8 out(shaded.width, shaded.height, 3, 0);
    for (std::size_t i = 0; i < shaded.data.size(); ++i)
        out.data[i] = static_cast<uint8_t>(
            std::lround(std::clamp(shaded.data[i], 0.f, 1.f) * 255.f));
    return out;
}

husc::BodyParams resolve_composite_params(const CliConfig& cfg, json* chosen_record) {
    if (!cfg.placements.empty()) {
        std::ifstream in(cfg.placements);
        if (!in) throw husc::IoError("cannot open " + cfg.placements);
        json j;
        in >> j;
        const auto& candidates = j.at("candidates");
        int index = cfg.placement_index;
        if (index < 0) {
            for (std::size_t i = 0; i < candidates.size(); ++i)
                if (candidates[i].at("verdict") == "accepted") {
                    index = static_cast<int>(i);
                    break;
                }
            if (index < 0)
                throw husc::EstimationFailure("placements file has no accepted candidate");
        }
        if (index >= static_cast<int>(candidates.size()))
            throw husc::InvalidArgument("placement-index out of range");
        if (chosen_record) *chosen_record = candidates[index];
        return params_from_json(candidates[index].at("params"));
    }
    if (cfg.params.empty())
        throw husc::InvalidArgument("composite needs --params or --placements");
    return husc::load_body_params(cfg.params);
}

int cmd_composite(const CliConfig& cfg) {
    cfg.validate_numeric();
    const husc::SceneFrame frame =
        husc::load_scene(cfg.rgb, cfg.depth, cfg.labels, cfg.legend, cfg.camera);
    const husc::BodyAssets assets = husc::load_body_assets(cfg.assets);

    json chosen_record;
    const husc::BodyParams params = resolve_composite_params(cfg, &chosen_record);

    const husc::PosedMesh mesh = husc::pose_mesh(assets, params);
    const husc::RasterMap raster = husc::rasterize(frame.camera, mesh);
    const husc::DensePoseMap dense = husc::dense_pose_map(raster, mesh);

    husc::ImageU8 person;
    if (!cfg.person_rgb.empty() && !cfg.source_params.empty()) {
        // Transfer the supplied appearance through the displacement field.
        const husc::BodyParams source_params = husc::load_body_params(cfg.source_params);
        const husc::PosedMesh source_mesh = husc::pose_mesh(assets, source_params);
        const husc::DisplacementField field =
            husc::body_displacement_field(frame.camera, source_mesh, mesh, raster);
        const husc::ImageU8 source_rgb = husc::read_png_rgb8(cfg.person_rgb);
        if (source_rgb.width != frame.camera.width || source_rgb.height != frame.camera.height)
            throw husc::InvalidArgument("person-rgb must match the camera dimensions");
        const husc::Image<float> warped = husc::warp(husc::to_unit(source_rgb), field, 0.f);
        person = husc::ImageU8(warped.width, warped.height, 3, 0);
        for (std::size_t i = 0; i < warped.data.size(); ++i)
            person.data[i] = static_cast<uint8_t>(
                std::lround(std::clamp(warped.data[i], 0.f, 1.f) * 255.f));
    } else {
        person = render_person(raster, mesh);
    }

    const husc::CompositeBundle bundle = husc::composite(frame, person, raster, dense, params);

    json provenance = json::object();
    if (cfg.seed_set) provenance["seed"] = cfg.seed;
    provenance["asset_hash"] = fnv1a_file_hex(cfg.assets);
    if (!chosen_record.is_null()) provenance["placement"] = chosen_record;
    provenance["manifest"] = config_manifest(cfg, "composite");

    if (cfg.out.empty()) throw husc::InvalidArgument("composite needs --out");
    husc::export_bundle(bundle, cfg.out, provenance);
    std::cerr << "composite: occlusion_fraction " << bundle.occlusion_fraction << "\n";
    return 0;
}

int cmd_displace(const CliConfig& cfg) {
    const husc::Camera cam = husc::load_camera_json(cfg.camera);
    const husc::BodyAssets assets = husc::load_body_assets(cfg.assets);
    const husc::BodyParams source_params = husc::load_body_params(cfg.source_params);
    const husc::BodyParams target_params = husc::load_body_params(cfg.target_params);

    const husc::PosedMesh source = husc::pose_mesh(assets, source_params);
    const husc::PosedMesh target = husc::pose_mesh(assets, target_params);
    const husc::RasterMap source_raster = husc::rasterize(cam, source);
    const husc::RasterMap target_raster = husc::rasterize(cam, target);

    husc::DisplacementField field =
        husc::body_displacement_field(cam, source, target, target_raster);
    if (!cfg.correction.empty())
        field = husc::add_correction(field, husc::load_field(cfg.correction));

    // Warp either the supplied source image or a part-colored rendering.
    husc::ImageU8 source_image;
    if (!cfg.person_rgb.empty()) {
        source_image = husc::read_png_rgb8(cfg.person_rgb);
        if (source_image.width != cam.width || source_image.height != cam.height)
            throw husc::InvalidArgument("person-rgb must match the camera dimensions");
    } else {
        source_image = render_person(source_raster, source);
    }
    const husc::Image<float> warped = husc::warp(husc::to_unit(source_image), field, 0.f);
    husc::ImageU8 warped_u8(warped.width, warped.height, 3, 0);
    for (std::size_t i = 0; i < warped.data.size(); ++i)
        warped_u8.data[i] =
            static_cast<uint8_t>(std::lround(std::clamp(warped.data[i], 0.f, 1.f) * 255.f));

    if (cfg.out.empty()) throw husc::InvalidArgument("displace needs --out");
    fs::create_directories(cfg.out);
    const auto path = [&](const char* name) { return (fs::path(cfg.out) / name).string(); };
    husc::save_field(field, path("field.pfm"), path("field.json"));
    husc::write_png_rgb8(source_image, path("source.png"));
    husc::write_png_rgb8(render_person(target_raster, target), path("target.png"));
    husc::write_png_rgb8(warped_u8, path("warped.png"));

    json manifest = config_manifest(cfg, "displace");
    manifest["files"] = {"field.pfm", "field.json", "source.png", "target.png", "warped.png"};
    write_json_file(manifest, path("manifest.json"));
    return 0;
}

int cmd_perturb(const CliConfig& cfg) {
    cfg.require_seed();
    const husc::ImageU8 image = husc::read_png_rgb8(cfg.person_rgb.empty() ? cfg.rgb : cfg.person_rgb);
    husc::ImageU8 mask;
    if (!cfg.labels.empty()) {
        mask = husc::read_png_gray8(cfg.labels);
    } else {
        throw husc::InvalidArgument("perturb needs --labels as the silhouette mask");
    }
    const husc::PerturbationParams params = husc::sample_perturbation(cfg.seed);
    if (cfg.out.empty()) throw husc::InvalidArgument("perturb needs --out");
    husc::export_harmonize_triplet(image, mask, params, cfg.out);

    json manifest = config_manifest(cfg, "perturb");
    manifest["files"] = {"perturbed.png", "mask.png", "original.png", "params.json"};
    write_json_file(manifest, (fs::path(cfg.out) / "manifest.json").string());
    return 0;
}

int cmd_ssim(const CliConfig& cfg) {
    const husc::Image<float> a = husc::to_unit(husc::read_png_rgb8(cfg.a));
    const husc::Image<float> b = husc::to_unit(husc::read_png_rgb8(cfg.b));
    const double score = husc::ssim(a, b);
    const json j{{"ssim", score},
                 {"l1_sum", husc::l1_distance(a, b, false)},
                 {"l1_mean", husc::l1_distance(a, b, true)}};
    std::cout << j.dump(2) << std::endl;
    if (!cfg.out.empty()) {
        fs::create_directories(cfg.out);
        write_json_file(j, (fs::path(cfg.out) / "metrics.json").string());
    }
    return 0;
}

int cmd_pipeline(const CliConfig& cfg) {
    cfg.validate_numeric();
    cfg.require_seed();
    if (cfg.out.empty()) throw husc::InvalidArgument("pipeline needs --out");
    fs::create_directories(cfg.out);
    const auto path = [&](const char* name) { return (fs::path(cfg.out) / name).string(); };

    const SceneGeometry geo = estimate_scene(cfg);
    write_json_file(plane_json(geo.plane), path("plane.json"));

    const husc::BodyAssets assets = husc::load_body_assets(cfg.assets);
    const husc::BodyParams base_params = husc::load_body_params(cfg.params);

    const auto records = run_placements(cfg, geo, assets, base_params);
    write_json_file(placements_json(cfg, geo, records), path("placements.json"));

    const husc::PlacementRecord* chosen = nullptr;
    for (const auto& rec : records)
        if (rec.verdict == husc::Verdict::accepted) {
            chosen = &rec;
            break;
        }
    if (!chosen) {
        std::cerr << "pipeline: no valid placement\n";
        return 3;
    }

    const husc::PosedMesh mesh = husc::pose_mesh(assets, chosen->params);
    const husc::RasterMap raster = husc::rasterize(geo.frame.camera, mesh);
    const husc::DensePoseMap dense = husc::dense_pose_map(raster, mesh);
    const husc::ImageU8 person = render_person(raster, mesh);
    const husc::CompositeBundle bundle =
        husc::composite(geo.frame, person, raster, dense, chosen->params);

    json provenance{{"seed", cfg.seed},
                    {"asset_hash", fnv1a_file_hex(cfg.assets)},
                    {"placement", record_json(*chosen)}};
    husc::export_bundle(bundle, path("bundle"), provenance);

    // Harmonization training record from the composite.
    const husc::PerturbationParams pparams =
        husc::sample_perturbation(husc::derive_seed(cfg.seed, "perturb-stage"));
    husc::export_harmonize_triplet(bundle.rgb, bundle.person_mask, pparams, path("harmonize"));

    json manifest = config_manifest(cfg, "pipeline");
    manifest["files"] = {"plane.json", "placements.json", "bundle", "harmonize"};
    manifest["occlusion_fraction"] = bundle.occlusion_fraction;
    write_json_file(manifest, path("manifest.json"));
    return 0;
}

int cmd_make_fixture(const std::string& out, uint64_t seed, bool occupied) {
    const husc::RoomFixture fixture =
        occupied ? husc::make_occupied_room_fixture(seed) : husc::make_room_fixture(seed);
    husc::write_scene_files(fixture.frame, out);

    const husc::BodyAssets assets = husc::generate_desk_model(1000, seed);
    const auto path = [&](const char* name) { return (fs::path(out) / name).string(); };
    husc::save_body_assets(assets, path("body_assets.json"));

    // Demo parameters: upright (pi about x turns model +Y into scene -y),
    // feet on the floor, mid-room.
    husc::BodyParams base;
    base.pose[0] = Eigen::Vector3d(M_PI, 0, 0);
    const Eigen::Vector3d anchor = occupied ? Eigen::Vector3d(0.0, 1.2, 2.6)
                                            : Eigen::Vector3d(0.15, 1.2, 4.5);
    const husc::BodyParams placed =
        husc::place_body(assets, base, fixture.true_plane, anchor, 0.0);
    husc::save_body_params(placed, path("body_params.json"));

    json manifest{{"command", "make-fixture"},
                  {"seed", seed},
                  {"occupied", occupied},
                  {"files",
                   {"rgb.png", "depth.png", "labels.png", "legend.json", "camera.json",
                    "body_assets.json", "body_params.json"}}};
    write_json_file(manifest, path("fixture_manifest.json"));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometric human-scene compositing pipeline"};
    app.require_subcommand(1);

    CliConfig cfg;
    std::string config_path;

    // Flags explicitly given on the command line override the config file,
    // which is applied to the defaults before parsing.
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
    if (!config_path.empty()) {
        try {
            apply_config_file(cfg, config_path);
        } catch (const husc::Error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }

    bool seed_flag = false;
    uint64_t seed_value = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (kebab-case keys)");
        sub->add_option("--seed", seed_value, "64-bit seed for all stochastic stages")
            ->each([&](const std::string&) { seed_flag = true; });
        sub->add_option("--out", cfg.out, "output directory");
    };
    auto add_scene = [&](CLI::App* sub) {
        sub->add_option("--rgb", cfg.rgb, "scene RGB PNG");
        sub->add_option("--depth", cfg.depth, "scene depth (16-bit mm PNG or PFM meters)");
        sub->add_option("--labels", cfg.labels, "scene label PNG");
        sub->add_option("--legend", cfg.legend, "label legend JSON");
        sub->add_option("--camera", cfg.camera, "camera intrinsics JSON");
    };
    auto add_plane = [&](CLI::App* sub) {
        sub->add_option("--floor-classes", cfg.floor_classes, "support-surface class names")
            ->delimiter(',');
        sub->add_option("--ransac-threshold", cfg.ransac_threshold, "inlier threshold (m)");
        sub->add_option("--ransac-iterations", cfg.ransac_iterations, "RANSAC iterations");
    };
    auto add_body = [&](CLI::App* sub) {
        sub->add_option("--assets", cfg.assets, "body assets JSON (husc-body-v1)");
        sub->add_option("--params", cfg.params, "body parameters JSON");
    };

    CLI::App* fit = app.add_subcommand("fit-plane", "estimate the support plane");
    add_common(fit);
    add_scene(fit);
    add_plane(fit);

    CLI::App* place = app.add_subcommand("place", "sample and validate body placements");
    add_common(place);
    add_scene(place);
    add_plane(place);
    add_body(place);
    place->add_option("--grid-spacing", cfg.grid_spacing, "floor grid spacing (m)");
    place->add_option("--min-support", cfg.min_support, "min floor points per cell");
    place->add_option("--yaw-policy", cfg.yaw_policy, "fixed | seeded");
    place->add_option("--yaw", cfg.yaw, "yaw angle for fixed policy (rad)");
    place->add_option("--collision-tolerance", cfg.collision_tolerance,
                      "colliding points allowed");

    CLI::App* comp = app.add_subcommand("composite", "render and depth-composite the body");
    add_common(comp);
    add_scene(comp);
    add_body(comp);
    comp->add_option("--placements", cfg.placements, "placements.json from `place`");
    comp->add_option("--placement-index", cfg.placement_index,
                     "candidate index (-1: first accepted)");
    comp->add_option("--person-rgb", cfg.person_rgb, "source appearance image");
    comp->add_option("--source-params", cfg.source_params, "source body parameters");

    CLI::App* disp = app.add_subcommand("displace", "body displacement field and warp");
    add_common(disp);
    disp->add_option("--camera", cfg.camera, "camera intrinsics JSON");
    disp->add_option("--assets", cfg.assets, "body assets JSON");
    disp->add_option("--source-params", cfg.source_params, "source body parameters");
    disp->add_option("--target-params", cfg.target_params, "target body parameters");
    disp->add_option("--correction", cfg.correction, "correction field PFM added to the body field");
    disp->add_option("--person-rgb", cfg.person_rgb, "source image to warp");

    CLI::App* pert = app.add_subcommand("perturb", "foreground statistics perturbation record");
    add_common(pert);
    pert->add_option("--rgb", cfg.rgb, "input image PNG");
    pert->add_option("--labels", cfg.labels, "silhouette mask PNG");

    CLI::App* ssim_cmd = app.add_subcommand("ssim", "SSIM and L1 between two images");
    add_common(ssim_cmd);
    ssim_cmd->add_option("--a", cfg.a, "first image")->required();
    ssim_cmd->add_option("--b", cfg.b, "second image")->required();

    CLI::App* pipe = app.add_subcommand("pipeline", "fit-plane, place, composite, perturb");
    add_common(pipe);
    add_scene(pipe);
    add_plane(pipe);
    add_body(pipe);
    pipe->add_option("--grid-spacing", cfg.grid_spacing, "floor grid spacing (m)");
    pipe->add_option("--min-support", cfg.min_support, "min floor points per cell");
    pipe->add_option("--yaw-policy", cfg.yaw_policy, "fixed | seeded");
    pipe->add_option("--yaw", cfg.yaw, "yaw angle for fixed policy (rad)");
    pipe->add_option("--collision-tolerance", cfg.collision_tolerance,
                     "colliding points allowed");

    bool fixture_occupied = false;
    CLI::App* mkfix = app.add_subcommand("make-fixture", "write a synthetic scene fixture");
    add_common(mkfix);
    mkfix->add_flag("--occupied", fixture_occupied, "fully blocked variant");

    CLI11_PARSE(app, argc, argv);

    if (seed_flag) {
        cfg.seed = seed_value;
        cfg.seed_set = true;
    }

    try {
        if (fit->parsed()) return cmd_fit_plane(cfg);
        if (place->parsed()) return cmd_place(cfg);
        if (comp->parsed()) return cmd_composite(cfg);
        if (disp->parsed()) return cmd_displace(cfg);
        if (pert->parsed()) return cmd_perturb(cfg);
        if (ssim_cmd->parsed()) return cmd_ssim(cfg);
        if (pipe->parsed()) return cmd_pipeline(cfg);
        if (mkfix->parsed()) {
            if (cfg.out.empty()) throw husc::InvalidArgument("make-fixture needs --out");
            return cmd_make_fixture(cfg.out, cfg.seed_set ? cfg.seed : 7, fixture_occupied);
        }
    } catch (const husc::EstimationFailure& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const husc::DegenerateGeometry& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const husc::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
