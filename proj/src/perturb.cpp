#include "husc/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "husc/error.hpp"
#include "husc/png_io.hpp"
#include "husc/rng.hpp"

namespace husc {

namespace {

constexpr double kGainLo = 0.6, kGainHi = 1.4;
constexpr double kBiasLo = -0.15, kBiasHi = 0.15;
constexpr double kSatLo = 0.5, kSatHi = 1.5;
constexpr double kGammaLo = 0.7, kGammaHi = 1.4;
constexpr double kIdentityBand = 0.02;

}  // namespace

void PerturbationParams::validate() const {
    for (double g : gain)
        if (!(g >= kGainLo && g <= kGainHi))
            throw InvalidArgument("PerturbationParams: gain out of [0.6, 1.4]");
    for (double b : bias)
        if (!(b >= kBiasLo && b <= kBiasHi))
            throw InvalidArgument("PerturbationParams: bias out of [-0.15, 0.15]");
    if (!(saturation >= kSatLo && saturation <= kSatHi))
        throw InvalidArgument("PerturbationParams: saturation out of [0.5, 1.5]");
    if (!(gamma >= kGammaLo && gamma <= kGammaHi))
        throw InvalidArgument("PerturbationParams: gamma out of [0.7, 1.4]");
}

ImageU8 perturb_foreground(const ImageU8& image, const ImageU8& mask,
                           const PerturbationParams& params) {
    if (image.channels != 3) throw InvalidArgument("perturb_foreground: image must be RGB");
    if (mask.width != image.width || mask.height != image.height || mask.channels != 1)
        throw InvalidArgument("perturb_foreground: mask and image sizes differ");
    params.validate();

    ImageU8 out = image;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            if (!mask.at(x, y)) continue;

            double rgb[3];
            for (int c = 0; c < 3; ++c) {
                double v = image.at(x, y, c) / 255.0;
                rgb[c] = std::pow(v, params.gamma);
            }
            const double luma = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
            for (int c = 0; c < 3; ++c) {
                double v = luma + params.saturation * (rgb[c] - luma);
                v = params.gain[c] * v + params.bias[c];
                v = std::clamp(v, 0.0, 1.0);
                out.at(x, y, c) = static_cast<uint8_t>(std::lround(v * 255.0));
            }
        }
    }
    return out;
}

PerturbationParams sample_perturbation(uint64_t seed) {
    Rng rng(derive_seed(seed, "perturb"));
    for (;;) {
        PerturbationParams p;
        p.seed = seed;
        for (int c = 0; c < 3; ++c) p.gain[c] = rng.uniform(kGainLo, kGainHi);
        for (int c = 0; c < 3; ++c) p.bias[c] = rng.uniform(kBiasLo, kBiasHi);
        p.saturation = rng.uniform(kSatLo, kSatHi);
        p.gamma = rng.uniform(kGammaLo, kGammaHi);

        bool near_identity = true;
        for (int c = 0; c < 3 && near_identity; ++c)
            near_identity = std::abs(p.gain[c] - 1.0) <= kIdentityBand &&
                            std::abs(p.bias[c]) <= kIdentityBand;
        near_identity = near_identity && std::abs(p.saturation - 1.0) <= kIdentityBand &&
                        std::abs(p.gamma - 1.0) <= kIdentityBand;
        if (!near_identity) return p;
    }
}

ImageU8 feathered_blend(const ImageU8& foreground, const ImageU8& mask,
                        const ImageU8& background, int feather_radius) {
    if (!foreground.same_shape(background))
        throw InvalidArgument("feathered_blend: foreground/background sizes differ");
    if (mask.width != foreground.width || mask.height != foreground.height || mask.channels != 1)
        throw InvalidArgument("feathered_blend: mask size differs");
    if (feather_radius < 0) throw InvalidArgument("feathered_blend: radius must be >= 0");

    const int w = mask.width, h = mask.height, r = feather_radius;

    // Separable box blur with clamp-to-edge, so a saturated mask keeps
    // alpha exactly 1 everywhere.
    Image<double> alpha(w, h, 1);
    for (std::size_t i = 0; i < mask.data.size(); ++i)
        alpha.data[i] = mask.data[i] ? 1.0 : 0.0;

    if (r > 0) {
        Image<double> tmp(w, h, 1);
        const double inv = 1.0 / (2 * r + 1);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double sum = 0.0;
                for (int k = -r; k <= r; ++k)
                    sum += alpha.at(std::clamp(x + k, 0, w - 1), y);
                tmp.at(x, y) = sum * inv;
            }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double sum = 0.0;
                for (int k = -r; k <= r; ++k)
                    sum += tmp.at(x, std::clamp(y + k, 0, h - 1));
                alpha.at(x, y) = sum * inv;
            }
    }

    ImageU8 out(foreground.width, foreground.height, foreground.channels);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const double a = alpha.at(x, y);
            for (int c = 0; c < foreground.channels; ++c) {
                const double v = a * foreground.at(x, y, c) + (1.0 - a) * background.at(x, y, c);
                out.at(x, y, c) = static_cast<uint8_t>(std::lround(v));
            }
        }
    return out;
}

void export_harmonize_triplet(const ImageU8& original, const ImageU8& mask,
                              const PerturbationParams& params, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("export_harmonize_triplet: cannot create " + out_dir + ": " + ec.message());

    const auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };
    const ImageU8 perturbed = perturb_foreground(original, mask, params);

    write_png_rgb8(perturbed, path("perturbed.png"));
    write_png_gray8(mask, path("mask.png"));
    write_png_rgb8(original, path("original.png"));

    nlohmann::json j{
        {"format", "husc-harmonize-v1"},
        {"gain", params.gain},
        {"bias", params.bias},
        {"saturation", params.saturation},
        {"gamma", params.gamma},
        {"seed", params.seed},
        {"files", {{"perturbed", "perturbed.png"}, {"mask", "mask.png"}, {"original", "original.png"}}},
    };
    std::ofstream out(path("params.json"));
    if (!out) throw IoError("export_harmonize_triplet: cannot open " + path("params.json"));
    out << j.dump(2) << "\n";
}

}  // namespace husc
