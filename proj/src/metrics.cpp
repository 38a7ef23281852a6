#include "husc/metrics.hpp"

#include <cmath>
#include <vector>

#include "husc/error.hpp"

namespace husc {

void SsimConfig::validate() const {
    if (window < 1 || window % 2 == 0)
        throw InvalidArgument("SsimConfig: window must be odd and positive");
    if (!(sigma > 0.0)) throw InvalidArgument("SsimConfig: sigma must be > 0");
    if (!(dynamic_range > 0.0)) throw InvalidArgument("SsimConfig: dynamic range must be > 0");
}

namespace {

std::vector<double> gaussian_kernel(int window, double sigma) {
    std::vector<double> k(window);
    const int half = window / 2;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        const double d = i - half;
        k[i] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[i];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Valid-mode separable convolution of one channel, horizontal then vertical.
void convolve_valid(const std::vector<double>& src, int w, int h,
                    const std::vector<double>& kernel, std::vector<double>& out) {
    const int k = static_cast<int>(kernel.size());
    const int ow = w - k + 1;
    const int oh = h - k + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double sum = 0.0;
            for (int i = 0; i < k; ++i) sum += kernel[i] * src[static_cast<std::size_t>(y) * w + x + i];
            tmp[static_cast<std::size_t>(y) * ow + x] = sum;
        }
    out.assign(static_cast<std::size_t>(ow) * oh, 0.0);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double sum = 0.0;
            for (int i = 0; i < k; ++i)
                sum += kernel[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = sum;
        }
}

}  // namespace

double ssim(const Image<float>& a, const Image<float>& b, const SsimConfig& config) {
    config.validate();
    if (!a.same_shape(b)) throw InvalidArgument("ssim: image dimensions differ");
    if (a.width < config.window || a.height < config.window)
        throw InvalidArgument("ssim: image smaller than the window");

    const double c1 = (config.k1 * config.dynamic_range) * (config.k1 * config.dynamic_range);
    const double c2 = (config.k2 * config.dynamic_range) * (config.k2 * config.dynamic_range);
    const auto kernel = gaussian_kernel(config.window, config.sigma);

    const int w = a.width, h = a.height;
    const std::size_t plane = static_cast<std::size_t>(w) * h;
    std::vector<double> xa(plane), xb(plane), xaa(plane), xbb(plane), xab(plane);
    std::vector<double> mu_a, mu_b, m_aa, m_bb, m_ab;

    double total = 0.0;
    for (int c = 0; c < a.channels; ++c) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const double va = a.at(x, y, c);
                const double vb = b.at(x, y, c);
                xa[i] = va;
                xb[i] = vb;
                xaa[i] = va * va;
                xbb[i] = vb * vb;
                xab[i] = va * vb;
            }
        convolve_valid(xa, w, h, kernel, mu_a);
        convolve_valid(xb, w, h, kernel, mu_b);
        convolve_valid(xaa, w, h, kernel, m_aa);
        convolve_valid(xbb, w, h, kernel, m_bb);
        convolve_valid(xab, w, h, kernel, m_ab);

        // Per-row accumulation keeps the summation order fixed.
        const int ow = w - config.window + 1;
        const int oh = h - config.window + 1;
        double channel_sum = 0.0;
        for (int y = 0; y < oh; ++y) {
            double row = 0.0;
            for (int x = 0; x < ow; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * ow + x;
                const double ma = mu_a[i], mb = mu_b[i];
                const double var_a = m_aa[i] - ma * ma;
                const double var_b = m_bb[i] - mb * mb;
                const double cov = m_ab[i] - ma * mb;
                row += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
            }
            channel_sum += row;
        }
        total += channel_sum / (static_cast<double>(ow) * oh);
    }
    return total / a.channels;
}

double l1_distance(const Image<float>& a, const Image<float>& b, bool mean) {
    if (!a.same_shape(b)) throw InvalidArgument("l1_distance: image dimensions differ");
    double total = 0.0;
    for (int y = 0; y < a.height; ++y) {
        double row = 0.0;
        for (int x = 0; x < a.width; ++x)
            for (int c = 0; c < a.channels; ++c)
                row += std::abs(static_cast<double>(a.at(x, y, c)) - b.at(x, y, c));
        total += row;
    }
    if (mean) total /= static_cast<double>(a.width) * a.height * a.channels;
    return total;
}

Image<float> to_unit(const ImageU8& img) {
    Image<float> out(img.width, img.height, img.channels);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = static_cast<float>(img.data[i] / 255.0);
    return out;
}

}  // namespace husc
