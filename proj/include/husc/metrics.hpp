#pragma once

#include "husc/image.hpp"

namespace husc {

// Standard structural-similarity constants; unit-scale images.
struct SsimConfig {
    int window = 11;
    double sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;

    void validate() const;
};

// Mean over all fully-contained windows (stride 1, no padding) of the
// luminance-contrast-structure product with Gaussian weighting; channels
// scored independently and averaged.
double ssim(const Image<float>& a, const Image<float>& b, const SsimConfig& config = {});

// Sum over pixels of the channelwise absolute difference; `mean` divides by
// the sample count (pixels * channels).
double l1_distance(const Image<float>& a, const Image<float>& b, bool mean = false);

// 8-bit to unit-scale float.
Image<float> to_unit(const ImageU8& img);

}  // namespace husc
