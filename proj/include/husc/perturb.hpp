#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "husc/image.hpp"

namespace husc {

// Color statistics perturbation applied inside a silhouette. Ranges are
// fixed policy; sample_perturbation stays within them.
struct PerturbationParams {
    std::array<double, 3> gain{1, 1, 1};   // [0.6, 1.4]
    std::array<double, 3> bias{0, 0, 0};   // [-0.15, 0.15], unit scale
    double saturation = 1;                 // [0.5, 1.5]
    double gamma = 1;                      // [0.7, 1.4]
    uint64_t seed = 0;

    void validate() const;
};

// Inside the mask: unit scale, gamma, saturation about per-pixel luma
// (0.299/0.587/0.114), per-channel gain and bias, clamp. Unmasked pixels
// are returned bit-identical.
ImageU8 perturb_foreground(const ImageU8& image, const ImageU8& mask,
                           const PerturbationParams& params);

// Uniform draw over the documented ranges, deterministic per seed.
// Near-identity draws (every factor within 2% of identity) are rejected
// and resampled.
PerturbationParams sample_perturbation(uint64_t seed);

// Box-blurred mask as alpha (clamp-to-edge), convex per-pixel blend.
ImageU8 feathered_blend(const ImageU8& foreground, const ImageU8& mask,
                        const ImageU8& background, int feather_radius);

// Writes the (perturbed, mask, original, params) training record in the
// "husc-harmonize-v1" layout.
void export_harmonize_triplet(const ImageU8& original, const ImageU8& mask,
                              const PerturbationParams& params, const std::string& out_dir);

}  // namespace husc
