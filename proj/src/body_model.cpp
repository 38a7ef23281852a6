#include "husc/body_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <json.hpp>

#include "husc/error.hpp"
#include "husc/rng.hpp"

namespace husc {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Eigen::Matrix3d rodrigues(const Eigen::Vector3d& w) {
    const double angle = w.norm();
    if (angle < 1e-300) return Eigen::Matrix3d::Identity();
    return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

bool finite(const Eigen::Vector3d& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace

void BodyAssets::validate() const {
    const int n = vertex_count();
    if (n < 1) throw InvalidArgument("BodyAssets: no template vertices");
    for (const auto& v : template_vertices)
        if (!v.allFinite()) throw InvalidArgument("BodyAssets: non-finite template vertex");

    for (const auto& f : faces)
        for (int32_t idx : f)
            if (idx < 0 || idx >= n)
                throw InvalidArgument("BodyAssets: face index out of range");

    if (kinematic_parents[0] != -1)
        throw InvalidArgument("BodyAssets: joint 0 must be the root (parent -1)");
    for (int j = 1; j < kJointCount; ++j) {
        int p = kinematic_parents[j];
        if (p < 0 || p >= kJointCount)
            throw InvalidArgument("BodyAssets: parent index out of range");
        int steps = 0;
        int walk = j;
        while (walk != 0) {
            walk = kinematic_parents[walk];
            if (walk < 0 || ++steps > kJointCount)
                throw InvalidArgument("BodyAssets: kinematic parents do not form a tree rooted at 0");
        }
    }

    if (skinning_weights.size() != static_cast<std::size_t>(n) * kJointCount)
        throw InvalidArgument("BodyAssets: skinning weight matrix has wrong size");
    for (int v = 0; v < n; ++v) {
        double sum = 0.0;
        for (int j = 0; j < kJointCount; ++j) {
            const float w = weight(v, j);
            if (!(w >= 0.f)) throw InvalidArgument("BodyAssets: negative skinning weight");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-6)
            throw InvalidArgument("BodyAssets: skinning weights of vertex " + std::to_string(v) +
                                  " sum to " + std::to_string(sum));
    }

    if (joint_regressor.size() != kJointCount)
        throw InvalidArgument("BodyAssets: joint regressor must have 24 rows");
    for (const auto& row : joint_regressor)
        for (const auto& [idx, w] : row) {
            if (idx < 0 || idx >= n) throw InvalidArgument("BodyAssets: regressor vertex out of range");
            if (!std::isfinite(w)) throw InvalidArgument("BodyAssets: non-finite regressor weight");
        }

    if (shape_basis.size() != kShapeCount)
        throw InvalidArgument("BodyAssets: shape basis must have exactly 10 channels");
    for (const auto& channel : shape_basis)
        if (channel.size() != static_cast<std::size_t>(n))
            throw InvalidArgument("BodyAssets: shape channel size mismatch");

    if (std::abs(up_axis.norm() - 1.f) > 1e-6f)
        throw InvalidArgument("BodyAssets: up_axis must be unit length");
}

void BodyParams::validate() const {
    for (const auto& p : pose) {
        if (!finite(p)) throw InvalidArgument("BodyParams: non-finite pose");
        if (!(p.norm() < kTwoPi))
            throw InvalidArgument("BodyParams: axis-angle norm must be < 2*pi");
    }
    for (double s : shape)
        if (!std::isfinite(s)) throw InvalidArgument("BodyParams: non-finite shape");
    if (!finite(translation)) throw InvalidArgument("BodyParams: non-finite translation");
}

std::vector<std::pair<int, int>> kinematic_bones(const BodyAssets& assets) {
    std::vector<std::pair<int, int>> bones;
    for (int c = 1; c < kJointCount; ++c)
        bones.emplace_back(assets.kinematic_parents[c], c);
    return bones;
}

namespace {

std::vector<Eigen::Vector3d> shaped_template(const BodyAssets& assets, const BodyParams& params) {
    const int n = assets.vertex_count();
    std::vector<Eigen::Vector3d> shaped(n);
    for (int v = 0; v < n; ++v) shaped[v] = assets.template_vertices[v].cast<double>();
    for (int k = 0; k < kShapeCount; ++k) {
        if (params.shape[k] == 0.0) continue;
        const double beta = params.shape[k];
        const auto& channel = assets.shape_basis[k];
        for (int v = 0; v < n; ++v) shaped[v] += beta * channel[v].cast<double>();
    }
    return shaped;
}

std::vector<Eigen::Vector3d> regress(const BodyAssets& assets,
                                     const std::vector<Eigen::Vector3d>& verts) {
    std::vector<Eigen::Vector3d> joints(kJointCount, Eigen::Vector3d::Zero());
    for (int j = 0; j < kJointCount; ++j)
        for (const auto& [idx, w] : assets.joint_regressor[j])
            joints[j] += static_cast<double>(w) * verts[idx];
    return joints;
}

// Cumulative joint transforms: each joint rotates about its own rest
// location, composed parent to child.
std::vector<Eigen::Isometry3d> forward_kinematics(const BodyAssets& assets,
                                                  const BodyParams& params,
                                                  const std::vector<Eigen::Vector3d>& rest_joints) {
    std::vector<Eigen::Isometry3d> world(kJointCount);
    for (int j = 0; j < kJointCount; ++j) {
        Eigen::Isometry3d local = Eigen::Isometry3d::Identity();
        local.linear() = rodrigues(params.pose[j]);
        local.translation() = rest_joints[j] - local.linear() * rest_joints[j];
        world[j] = (j == 0) ? local : world[assets.kinematic_parents[j]] * local;
    }
    return world;
}

// Per-part chart: template vertices projected onto the part's two leading
// principal axes, min-max normalized to [0,1]^2.
std::vector<Eigen::Vector2d> part_uv_chart(const BodyAssets& assets,
                                           const std::vector<int32_t>& parts) {
    const int n = assets.vertex_count();
    std::vector<Eigen::Vector2d> uv(n, Eigen::Vector2d(0.5, 0.5));

    for (int part = 0; part < kJointCount; ++part) {
        std::vector<int> members;
        for (int v = 0; v < n; ++v)
            if (parts[v] == part) members.push_back(v);
        if (members.empty()) continue;

        Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
        for (int v : members) centroid += assets.template_vertices[v].cast<double>();
        centroid /= static_cast<double>(members.size());

        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (int v : members) {
            const Eigen::Vector3d d = assets.template_vertices[v].cast<double>() - centroid;
            cov += d * d.transpose();
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);

        // Eigen sorts eigenvalues ascending; fix each axis sign so the
        // largest-magnitude component is positive.
        std::array<Eigen::Vector3d, 2> axes = {eig.eigenvectors().col(2), eig.eigenvectors().col(1)};
        for (auto& axis : axes) {
            int arg = 0;
            for (int i = 1; i < 3; ++i)
                if (std::abs(axis[i]) > std::abs(axis[arg])) arg = i;
            if (axis[arg] < 0.0) axis = -axis;
        }

        std::vector<Eigen::Vector2d> raw(members.size());
        Eigen::Vector2d lo(1e300, 1e300), hi(-1e300, -1e300);
        for (std::size_t m = 0; m < members.size(); ++m) {
            const Eigen::Vector3d d =
                assets.template_vertices[members[m]].cast<double>() - centroid;
            raw[m] = {d.dot(axes[0]), d.dot(axes[1])};
            lo = lo.cwiseMin(raw[m]);
            hi = hi.cwiseMax(raw[m]);
        }
        for (std::size_t m = 0; m < members.size(); ++m) {
            Eigen::Vector2d p;
            for (int k = 0; k < 2; ++k)
                p[k] = (hi[k] > lo[k]) ? (raw[m][k] - lo[k]) / (hi[k] - lo[k]) : 0.5;
            uv[members[m]] = p;
        }
    }
    return uv;
}

}  // namespace

std::vector<int32_t> part_labels(const BodyAssets& assets) {
    const int n = assets.vertex_count();
    std::vector<int32_t> parts(n, 0);
    for (int v = 0; v < n; ++v) {
        int arg = 0;
        float best = assets.weight(v, 0);
        for (int j = 1; j < kJointCount; ++j) {
            const float w = assets.weight(v, j);
            if (w > best) {
                best = w;
                arg = j;
            }
        }
        parts[v] = arg;
    }
    return parts;
}

std::vector<Eigen::Vector3d> regress_joints(const BodyAssets& assets, const BodyParams& params) {
    return regress(assets, shaped_template(assets, params));
}

std::vector<Eigen::Vector3d> posed_joints(const BodyAssets& assets, const BodyParams& params) {
    const auto rest = regress_joints(assets, params);
    const auto world = forward_kinematics(assets, params, rest);
    std::vector<Eigen::Vector3d> joints(kJointCount);
    for (int j = 0; j < kJointCount; ++j) joints[j] = world[j] * rest[j] + params.translation;
    return joints;
}

PosedMesh pose_mesh(const BodyAssets& assets, const BodyParams& params) {
    assets.validate();
    params.validate();

    const auto shaped = shaped_template(assets, params);
    const auto rest_joints = regress(assets, shaped);
    const auto world = forward_kinematics(assets, params, rest_joints);

    const int n = assets.vertex_count();
    PosedMesh mesh;
    mesh.vertices.resize(n);
    mesh.faces = assets.faces;
    mesh.per_vertex_part = part_labels(assets);
    mesh.per_vertex_uv = part_uv_chart(assets, mesh.per_vertex_part);

    for (int v = 0; v < n; ++v) {
        Eigen::Vector3d blended = Eigen::Vector3d::Zero();
        for (int j = 0; j < kJointCount; ++j) {
            const float w = assets.weight(v, j);
            if (w == 0.f) continue;
            blended += static_cast<double>(w) * (world[j] * shaped[v]);
        }
        mesh.vertices[v] = blended + params.translation;
    }
    return mesh;
}

std::vector<Capsule> body_capsules(const BodyAssets& assets, const BodyParams& params) {
    const PosedMesh mesh = pose_mesh(assets, params);
    const auto joints = posed_joints(assets, params);
    const auto parts = mesh.per_vertex_part;

    std::vector<Capsule> capsules;
    for (const auto& [parent, child] : kinematic_bones(assets)) {
        Capsule c;
        c.a = joints[parent];
        c.b = joints[child];
        double radius = 0.0;
        for (int v = 0; v < assets.vertex_count(); ++v) {
            if (parts[v] != parent) continue;
            radius = std::max(radius, point_segment_distance(mesh.vertices[v], c.a, c.b));
        }
        c.radius = std::max(radius, 0.01);
        capsules.push_back(c);
    }
    return capsules;
}

// ---------------------------------------------------------------------------
// Procedural desk-scale humanoid
// ---------------------------------------------------------------------------

namespace {

// T-pose joint layout, Y up, origin at the pelvis.
const double kJointPos[kJointCount][3] = {
    {0.0, 0.0, 0.0},        // 0 pelvis
    {0.09, -0.06, 0.0},     // 1 left hip
    {-0.09, -0.06, 0.0},    // 2 right hip
    {0.0, 0.11, 0.0},       // 3 spine1
    {0.10, -0.50, 0.0},     // 4 left knee
    {-0.10, -0.50, 0.0},    // 5 right knee
    {0.0, 0.24, 0.0},       // 6 spine2
    {0.105, -0.90, 0.0},    // 7 left ankle
    {-0.105, -0.90, 0.0},   // 8 right ankle
    {0.0, 0.36, 0.0},       // 9 chest
    {0.11, -0.95, 0.12},    // 10 left foot
    {-0.11, -0.95, 0.12},   // 11 right foot
    {0.0, 0.50, 0.0},       // 12 neck
    {0.07, 0.44, 0.0},      // 13 left collar
    {-0.07, 0.44, 0.0},     // 14 right collar
    {0.0, 0.62, 0.0},       // 15 head
    {0.18, 0.46, 0.0},      // 16 left shoulder
    {-0.18, 0.46, 0.0},     // 17 right shoulder
    {0.44, 0.46, 0.0},      // 18 left elbow
    {-0.44, 0.46, 0.0},     // 19 right elbow
    {0.68, 0.46, 0.0},      // 20 left wrist
    {-0.68, 0.46, 0.0},     // 21 right wrist
    {0.76, 0.46, 0.0},      // 22 left hand
    {-0.76, 0.46, 0.0},     // 23 right hand
};

const int kParents[kJointCount] = {-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8,
                                   9,  9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21};

// Tube radius per bone, keyed by the child joint.
double bone_radius(int child) {
    switch (child) {
        case 1: case 2: return 0.085;   // hips
        case 3: return 0.11;            // lower spine
        case 4: case 5: return 0.07;    // thighs
        case 6: return 0.12;            // mid spine
        case 7: case 8: return 0.055;   // shins
        case 9: return 0.125;           // chest
        case 10: case 11: return 0.045; // feet
        case 12: return 0.05;           // neck
        case 13: case 14: return 0.05;  // collars
        case 15: return 0.09;           // head
        case 16: case 17: return 0.05;  // shoulders
        case 18: case 19: return 0.045; // upper arms
        case 20: case 21: return 0.04;  // forearms
        default: return 0.035;          // hands
    }
}

void orthonormal_frame(const Eigen::Vector3d& dir, Eigen::Vector3d& u1, Eigen::Vector3d& u2) {
    int arg = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(dir[i]) < std::abs(dir[arg])) arg = i;
    u1 = dir.cross(Eigen::Vector3d::Unit(arg)).normalized();
    u2 = dir.cross(u1);
}

}  // namespace

BodyAssets generate_desk_model(int vertex_budget, uint64_t seed) {
    constexpr int kBones = kJointCount - 1;
    if (vertex_budget < 200)
        throw InvalidArgument(
            "generate_desk_model: vertex_budget too small to give every bone "
            ">= 4 vertices (need >= 200)");

    BodyAssets assets;
    for (int j = 0; j < kJointCount; ++j) assets.kinematic_parents[j] = kParents[j];
    assets.up_axis = Eigen::Vector3f(0.f, 1.f, 0.f);
    assets.joint_regressor.resize(kJointCount);

    Rng rng(derive_seed(seed, "desk-model"));
    const int share = vertex_budget / kBones;

    // Per joint: (bone, rings, first ring vertex index, ring geometry) of the
    // tube used to regress that joint. Proximal tube rows are written for
    // every non-leaf joint; leaf joints fall back to the distal tube.
    struct RegressorSource {
        bool set = false;
        std::vector<int> ring_start;  // global index of each ring's first vertex
        int segments = 0;
        std::vector<double> ring_s;   // analytic axial mean per ring
        double length = 0;
        Eigen::Vector3d origin, dir;
        bool from_proximal_end = false;
    };
    std::array<RegressorSource, kJointCount> sources;

    std::vector<Eigen::Vector3d> verts;
    for (int child = 1; child < kJointCount; ++child) {
        const int parent = kParents[child];
        const Eigen::Vector3d p(kJointPos[parent][0], kJointPos[parent][1], kJointPos[parent][2]);
        const Eigen::Vector3d c(kJointPos[child][0], kJointPos[child][1], kJointPos[child][2]);
        const double length = (c - p).norm();
        const double radius = bone_radius(child);
        const Eigen::Vector3d dir = (c - p) / length;
        Eigen::Vector3d u1, u2;
        orthonormal_frame(dir, u1, u2);

        int segments = std::clamp(static_cast<int>(std::lround(std::sqrt(share / 2.0))), 3, 10);
        int rings = std::max(2, (share - 2) / segments);
        const double phase = rng.uniform(0.0, kTwoPi);
        const double twist = 0.7;
        const double span = length + 2.0 * radius;

        std::vector<int> ring_start(rings);
        std::vector<double> ring_s(rings);
        for (int i = 0; i < rings; ++i) {
            const double s = -radius + span * (i + 0.5) / rings;
            double rho;
            if (s < 0.0) rho = std::sqrt(std::max(radius * radius - s * s, 0.0));
            else if (s > length) rho = std::sqrt(std::max(radius * radius - (s - length) * (s - length), 0.0));
            else rho = radius;

            ring_start[i] = static_cast<int>(verts.size());
            // Tiny axial stagger plus ring twist keep every projected chart
            // coordinate distinct across the part.
            for (int j = 0; j < segments; ++j) {
                const double stagger = 0.002 * span * j / segments;
                const double phi = kTwoPi * j / segments + twist * i + phase;
                verts.push_back(p + (s + stagger) * dir +
                                rho * (std::cos(phi) * u1 + std::sin(phi) * u2));
            }
            ring_s[i] = -radius + span * (i + 0.5) / rings +
                        0.002 * span * (segments - 1) / (2.0 * segments);
        }
        const int pole_lo = static_cast<int>(verts.size());
        verts.push_back(p - radius * dir);
        const int pole_hi = static_cast<int>(verts.size());
        verts.push_back(c + radius * dir);

        // Tube faces.
        for (int i = 0; i + 1 < rings; ++i) {
            for (int j = 0; j < segments; ++j) {
                const int jn = (j + 1) % segments;
                const int a = ring_start[i] + j;
                const int b = ring_start[i] + jn;
                const int d = ring_start[i + 1] + j;
                const int e = ring_start[i + 1] + jn;
                assets.faces.push_back({a, b, d});
                assets.faces.push_back({b, e, d});
            }
        }
        for (int j = 0; j < segments; ++j) {
            const int jn = (j + 1) % segments;
            assets.faces.push_back({pole_lo, ring_start[0] + jn, ring_start[0] + j});
            assets.faces.push_back({pole_hi, ring_start[rings - 1] + j, ring_start[rings - 1] + jn});
        }

        RegressorSource src;
        src.set = true;
        src.ring_start = ring_start;
        src.segments = segments;
        src.ring_s = ring_s;
        src.length = length;
        src.origin = p;
        src.dir = dir;

        // The proximal joint prefers its own outgoing bone; keep the first.
        if (!sources[parent].set || !sources[parent].from_proximal_end) {
            src.from_proximal_end = true;
            sources[parent] = src;
        }
        if (!sources[child].set) {
            src.from_proximal_end = false;
            sources[child] = src;
        }

        // All tube and pole vertices ride the proximal joint.
        const int first = ring_start[0];
        assets.skinning_weights.resize(static_cast<std::size_t>(pole_hi + 1) * kJointCount, 0.f);
        for (int v = first; v <= pole_hi; ++v)
            assets.skinning_weights[static_cast<std::size_t>(v) * kJointCount + parent] = 1.f;
    }

    assets.template_vertices.resize(verts.size());
    for (std::size_t v = 0; v < verts.size(); ++v)
        assets.template_vertices[v] = verts[v].cast<float>();

    // Joint regressor: extrapolate two ring centroids of the chosen tube to
    // the joint's axial coordinate (0 at the proximal end, L at the distal).
    for (int j = 0; j < kJointCount; ++j) {
        const RegressorSource& src = sources[j];
        const int r0 = src.from_proximal_end ? 0 : static_cast<int>(src.ring_s.size()) - 2;
        const int r1 = r0 + 1;
        const double target = src.from_proximal_end ? 0.0 : src.length;
        const double alpha = (src.ring_s[r1] - target) / (src.ring_s[r1] - src.ring_s[r0]);
        auto& row = assets.joint_regressor[j];
        for (int k = 0; k < src.segments; ++k) {
            row.emplace_back(src.ring_start[r0] + k, static_cast<float>(alpha / src.segments));
            row.emplace_back(src.ring_start[r1] + k, static_cast<float>((1.0 - alpha) / src.segments));
        }
    }

    // Channel 0 scales the template uniformly about the origin; the rest are zero.
    assets.shape_basis.assign(kShapeCount,
                              std::vector<Eigen::Vector3f>(verts.size(), Eigen::Vector3f::Zero()));
    assets.shape_basis[0] = assets.template_vertices;

    assets.validate();
    return assets;
}

// ---------------------------------------------------------------------------
// Serialization ("husc-body-v1")
// ---------------------------------------------------------------------------

namespace {

const char kB64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::string out;
    out.reserve((size + 2) / 3 * 4);
    for (std::size_t i = 0; i < size; i += 3) {
        uint32_t chunk = static_cast<uint32_t>(bytes[i]) << 16;
        if (i + 1 < size) chunk |= static_cast<uint32_t>(bytes[i + 1]) << 8;
        if (i + 2 < size) chunk |= bytes[i + 2];
        out.push_back(kB64Alphabet[(chunk >> 18) & 63]);
        out.push_back(kB64Alphabet[(chunk >> 12) & 63]);
        out.push_back(i + 1 < size ? kB64Alphabet[(chunk >> 6) & 63] : '=');
        out.push_back(i + 2 < size ? kB64Alphabet[chunk & 63] : '=');
    }
    return out;
}

std::vector<unsigned char> b64_decode(const std::string& text) {
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<unsigned char> out;
    out.reserve(text.size() / 4 * 3);
    uint32_t chunk = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=' || c == '\n' || c == '\r') continue;
        const int v = value(c);
        if (v < 0) throw IoError("base64: invalid character");
        chunk = (chunk << 6) | static_cast<uint32_t>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<unsigned char>((chunk >> bits) & 0xff));
        }
    }
    return out;
}

template <typename T>
nlohmann::json pack_array(const std::vector<T>& flat, std::vector<int> shape, const char* dtype) {
    return {{"dtype", dtype}, {"shape", shape},
            {"data", b64_encode(flat.data(), flat.size() * sizeof(T))}};
}

template <typename T>
std::vector<T> unpack_array(const nlohmann::json& j, const char* dtype, std::size_t expected) {
    if (j.at("dtype").get<std::string>() != dtype)
        throw IoError("body assets: dtype mismatch, expected " + std::string(dtype));
    const auto bytes = b64_decode(j.at("data").get<std::string>());
    if (bytes.size() != expected * sizeof(T))
        throw IoError("body assets: array payload size mismatch");
    std::vector<T> out(expected);
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

}  // namespace

void save_body_assets(const BodyAssets& assets, const std::string& path) {
    assets.validate();
    const int n = assets.vertex_count();
    const int f = static_cast<int>(assets.faces.size());

    std::vector<float> verts(static_cast<std::size_t>(n) * 3);
    for (int v = 0; v < n; ++v)
        for (int k = 0; k < 3; ++k) verts[v * 3 + k] = assets.template_vertices[v][k];

    std::vector<int32_t> faces(static_cast<std::size_t>(f) * 3);
    for (int i = 0; i < f; ++i)
        for (int k = 0; k < 3; ++k) faces[i * 3 + k] = assets.faces[i][k];

    std::vector<float> basis(static_cast<std::size_t>(kShapeCount) * n * 3);
    for (int c = 0; c < kShapeCount; ++c)
        for (int v = 0; v < n; ++v)
            for (int k = 0; k < 3; ++k)
                basis[(static_cast<std::size_t>(c) * n + v) * 3 + k] = assets.shape_basis[c][v][k];

    nlohmann::json regressor = nlohmann::json::array();
    for (const auto& row : assets.joint_regressor) {
        std::vector<int32_t> idx(row.size());
        std::vector<float> w(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) {
            idx[i] = row[i].first;
            w[i] = row[i].second;
        }
        regressor.push_back({{"vertices", pack_array(idx, {static_cast<int>(idx.size())}, "int32")},
                             {"weights", pack_array(w, {static_cast<int>(w.size())}, "float32")}});
    }

    nlohmann::json j{
        {"format", "husc-body-v1"},
        {"joint_count", kJointCount},
        {"shape_count", kShapeCount},
        {"kinematic_parents", assets.kinematic_parents},
        {"up_axis", {assets.up_axis.x(), assets.up_axis.y(), assets.up_axis.z()}},
        {"template_vertices", pack_array(verts, {n, 3}, "float32")},
        {"faces", pack_array(faces, {f, 3}, "int32")},
        {"skinning_weights", pack_array(assets.skinning_weights, {n, kJointCount}, "float32")},
        {"shape_basis", pack_array(basis, {kShapeCount, n, 3}, "float32")},
        {"joint_regressor", regressor},
    };

    std::ofstream out(path);
    if (!out) throw IoError("save_body_assets: cannot open " + path);
    out << j.dump() << "\n";
}

BodyAssets load_body_assets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_body_assets: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_body_assets: parse error in " + path + ": " + e.what());
    }

    try {
        if (j.at("format").get<std::string>() != "husc-body-v1")
            throw IoError("load_body_assets: unsupported format in " + path);

        BodyAssets assets;
        const auto& tv = j.at("template_vertices");
        const int n = tv.at("shape").at(0).get<int>();
        const auto verts = unpack_array<float>(tv, "float32", static_cast<std::size_t>(n) * 3);
        assets.template_vertices.resize(n);
        for (int v = 0; v < n; ++v)
            assets.template_vertices[v] =
                Eigen::Vector3f(verts[v * 3], verts[v * 3 + 1], verts[v * 3 + 2]);

        const auto& fj = j.at("faces");
        const int f = fj.at("shape").at(0).get<int>();
        const auto faces = unpack_array<int32_t>(fj, "int32", static_cast<std::size_t>(f) * 3);
        assets.faces.resize(f);
        for (int i = 0; i < f; ++i)
            assets.faces[i] = {faces[i * 3], faces[i * 3 + 1], faces[i * 3 + 2]};

        const auto parents = j.at("kinematic_parents").get<std::vector<int32_t>>();
        if (parents.size() != kJointCount)
            throw IoError("load_body_assets: expected 24 kinematic parents");
        std::copy(parents.begin(), parents.end(), assets.kinematic_parents.begin());

        const auto up = j.at("up_axis").get<std::vector<float>>();
        assets.up_axis = Eigen::Vector3f(up.at(0), up.at(1), up.at(2));

        assets.skinning_weights = unpack_array<float>(j.at("skinning_weights"), "float32",
                                                      static_cast<std::size_t>(n) * kJointCount);

        const auto basis = unpack_array<float>(j.at("shape_basis"), "float32",
                                               static_cast<std::size_t>(kShapeCount) * n * 3);
        assets.shape_basis.assign(kShapeCount, std::vector<Eigen::Vector3f>(n));
        for (int c = 0; c < kShapeCount; ++c)
            for (int v = 0; v < n; ++v) {
                const std::size_t base = (static_cast<std::size_t>(c) * n + v) * 3;
                assets.shape_basis[c][v] =
                    Eigen::Vector3f(basis[base], basis[base + 1], basis[base + 2]);
            }

        for (const auto& row : j.at("joint_regressor")) {
            const auto count = row.at("vertices").at("shape").at(0).get<int>();
            const auto idx = unpack_array<int32_t>(row.at("vertices"), "int32", count);
            const auto w = unpack_array<float>(row.at("weights"), "float32", count);
            std::vector<std::pair<int32_t, float>> entries(count);
            for (int i = 0; i < count; ++i) entries[i] = {idx[i], w[i]};
            assets.joint_regressor.push_back(std::move(entries));
        }

        assets.validate();
        return assets;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_body_assets: malformed " + path + ": " + e.what());
    }
}

void save_body_params(const BodyParams& params, const std::string& path) {
    params.validate();
    nlohmann::json pose = nlohmann::json::array();
    for (const auto& p : params.pose) pose.push_back({p.x(), p.y(), p.z()});
    nlohmann::json j{
        {"pose", pose},
        {"shape", params.shape},
        {"translation", {params.translation.x(), params.translation.y(), params.translation.z()}},
    };
    std::ofstream out(path);
    if (!out) throw IoError("save_body_params: cannot open " + path);
    out << j.dump(2) << "\n";
}

BodyParams load_body_params(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_body_params: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_body_params: parse error in " + path + ": " + e.what());
    }
    try {
        BodyParams params;
        const auto& pose = j.at("pose");
        if (pose.size() != kJointCount)
            throw IoError("load_body_params: expected 24 pose vectors in " + path);
        for (int i = 0; i < kJointCount; ++i)
            params.pose[i] = Eigen::Vector3d(pose[i].at(0).get<double>(), pose[i].at(1).get<double>(),
                                             pose[i].at(2).get<double>());
        const auto& shape = j.at("shape");
        if (shape.size() != kShapeCount)
            throw IoError("load_body_params: expected 10 shape values in " + path);
        for (int i = 0; i < kShapeCount; ++i) params.shape[i] = shape[i].get<double>();
        const auto& t = j.at("translation");
        params.translation = Eigen::Vector3d(t.at(0).get<double>(), t.at(1).get<double>(),
                                             t.at(2).get<double>());
        params.validate();
        return params;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_body_params: malformed " + path + ": " + e.what());
    }
}

}  // namespace husc
