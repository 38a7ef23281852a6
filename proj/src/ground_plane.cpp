#include "husc/ground_plane.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "husc/error.hpp"
#include "husc/rng.hpp"

namespace husc {

namespace {

// Orientation convention: floors face the camera's "up" half-space (-y).
// Exact ties fall through to x, then z, keeping the sign deterministic.
void orient(Eigen::Vector3d& n, double& d) {
    bool flip;
    if (n.y() != 0.0) flip = n.y() > 0.0;
    else if (n.x() != 0.0) flip = n.x() < 0.0;
    else flip = n.z() < 0.0;
    if (flip) {
        n = -n;
        d = -d;
    }
}

Plane lsq_on(const std::vector<Eigen::Vector3d>& points, const std::vector<int>& indices) {
    if (indices.size() < 3)
        throw DegenerateGeometry("fit_plane_lsq: need at least 3 points");

    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i : indices) centroid += points[i];
    centroid /= static_cast<double>(indices.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int i : indices) {
        const Eigen::Vector3d diff = points[i] - centroid;
        cov += diff * diff.transpose();
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    // Collinear input leaves two near-zero eigenvalues; compare against the
    // spread so the test is scale-free.
    const double spread = eig.eigenvalues()(2);
    if (!(spread > 0.0) || eig.eigenvalues()(1) <= spread * 1e-12)
        throw DegenerateGeometry("fit_plane_lsq: points are collinear or coincident");

    Plane plane;
    plane.normal = eig.eigenvectors().col(0);
    plane.normal.normalize();
    plane.d = -plane.normal.dot(centroid);
    orient(plane.normal, plane.d);
    plane.inlier_indices = indices;

    double ss = 0.0;
    for (int i : indices) {
        const double r = plane.signed_distance(points[i]);
        ss += r * r;
    }
    plane.rms_residual = std::sqrt(ss / static_cast<double>(indices.size()));
    return plane;
}

}  // namespace

Plane fit_plane_lsq(const std::vector<Eigen::Vector3d>& points) {
    std::vector<int> all(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) all[i] = static_cast<int>(i);
    return lsq_on(points, all);
}

Plane fit_plane_ransac(const std::vector<Eigen::Vector3d>& points, double threshold,
                       int iterations, uint64_t seed) {
    if (points.size() < 3)
        throw DegenerateGeometry("fit_plane_ransac: need at least 3 points");
    if (!(threshold > 0.0)) throw InvalidArgument("fit_plane_ransac: threshold must be > 0");
    if (iterations < 1) throw InvalidArgument("fit_plane_ransac: iterations must be >= 1");

    Rng rng(derive_seed(seed, "ransac-plane"));
    const auto n_points = points.size();

    std::size_t best_count = 0;
    Eigen::Vector3d best_normal;
    double best_d = 0.0;

    for (int it = 0; it < iterations; ++it) {
        std::size_t a = rng.next_below(n_points);
        std::size_t b = rng.next_below(n_points);
        std::size_t c = rng.next_below(n_points);
        if (a == b || a == c || b == c) continue;

        const Eigen::Vector3d normal_raw = (points[b] - points[a]).cross(points[c] - points[a]);
        const double norm = normal_raw.norm();
        if (norm < 1e-12) continue;  // collinear sample
        const Eigen::Vector3d normal = normal_raw / norm;
        const double d = -normal.dot(points[a]);

        std::size_t count = 0;
        for (const auto& p : points)
            if (std::abs(normal.dot(p) + d) <= threshold) ++count;

        if (count > best_count) {
            best_count = count;
            best_normal = normal;
            best_d = d;
        }
    }

    // A hypothesis always covers its own 3-point sample; demand support
    // beyond that before calling it consensus.
    if (best_count < 4)
        throw EstimationFailure(
            "fit_plane_ransac: no hypothesis gained inliers beyond its minimal sample");

    std::vector<int> winning;
    for (std::size_t i = 0; i < n_points; ++i)
        if (std::abs(best_normal.dot(points[i]) + best_d) <= threshold)
            winning.push_back(static_cast<int>(i));

    Plane plane = lsq_on(points, winning);

    // Publish the inliers of the refit plane so every reported residual
    // satisfies the threshold bound.
    std::vector<int> final_inliers;
    double ss = 0.0;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double r = plane.signed_distance(points[i]);
        if (std::abs(r) <= threshold) {
            final_inliers.push_back(static_cast<int>(i));
            ss += r * r;
        }
    }
    plane.inlier_indices = final_inliers;
    plane.rms_residual =
        final_inliers.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(final_inliers.size()));
    return plane;
}

void save_plane_json(const Plane& plane, const std::string& path) {
    nlohmann::json j{
        {"normal", {plane.normal.x(), plane.normal.y(), plane.normal.z()}},
        {"d", plane.d},
        {"rms", plane.rms_residual},
        {"num_inliers", plane.inlier_indices.size()},
    };
    std::ofstream out(path);
    if (!out) throw IoError("save_plane_json: cannot open " + path);
    out << j.dump(2) << "\n";
}

Plane load_plane_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("load_plane_json: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_plane_json: parse error in " + path + ": " + e.what());
    }
    Plane plane;
    try {
        const auto& n = j.at("normal");
        plane.normal = Eigen::Vector3d(n.at(0).get<double>(), n.at(1).get<double>(),
                                       n.at(2).get<double>());
        plane.d = j.at("d").get<double>();
        plane.rms_residual = j.at("rms").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw IoError("load_plane_json: malformed " + path + ": " + e.what());
    }
    return plane;
}

}  // namespace husc
