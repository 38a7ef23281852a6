#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "husc/error.hpp"

namespace husc {

// Row-major, channel-interleaved raster buffer.
template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<T> data;

    Image() = default;
    Image(int w, int h, int c, T fill = T{})
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c), fill) {
        if (w < 0 || h < 0 || c < 1) throw InvalidArgument("Image: bad dimensions");
    }

    T& at(int x, int y, int c = 0) {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    const T& at(int x, int y, int c = 0) const {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    bool same_shape(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
    bool empty() const { return data.empty(); }

    friend bool operator==(const Image& a, const Image& b) {
        return a.width == b.width && a.height == b.height &&
               a.channels == b.channels && a.data == b.data;
    }
};

using ImageU8 = Image<uint8_t>;
using ImageU16 = Image<uint16_t>;
using ImageF = Image<float>;

}  // namespace husc
