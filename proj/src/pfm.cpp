#include "husc/pfm.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "husc/error.hpp"

namespace husc {

void write_pfm(const Image<float>& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3)
        throw InvalidArgument("write_pfm: only 1- or 3-channel maps supported, got " +
                              std::to_string(img.channels));
    if (img.width < 1 || img.height < 1)
        throw InvalidArgument("write_pfm: empty image");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_pfm: cannot open " + path);

    out << (img.channels == 3 ? "PF" : "Pf") << "\n"
        << img.width << " " << img.height << "\n"
        << "-1.0" << "\n";

    // PFM stores rows bottom to top.
    const std::size_t row_bytes =
        static_cast<std::size_t>(img.width) * img.channels * sizeof(float);
    for (int y = img.height - 1; y >= 0; --y) {
        const float* row = &img.data[static_cast<std::size_t>(y) * img.width * img.channels];
        out.write(reinterpret_cast<const char*>(row), static_cast<std::streamsize>(row_bytes));
    }
    if (!out) throw IoError("write_pfm: write failed for " + path);
}

Image<float> read_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_pfm: cannot open " + path);

    std::string magic;
    in >> magic;
    int channels = 0;
    if (magic == "PF") channels = 3;
    else if (magic == "Pf") channels = 1;
    else throw IoError("read_pfm: bad magic in " + path);

    int width = 0, height = 0;
    double scale = 0.0;
    in >> width >> height >> scale;
    if (!in || width < 1 || height < 1)
        throw IoError("read_pfm: bad header in " + path);
    if (scale >= 0.0)
        throw IoError("read_pfm: big-endian PFM not supported: " + path);
    in.get();  // single whitespace after the scale line

    Image<float> img(width, height, channels);
    const std::size_t row_bytes =
        static_cast<std::size_t>(width) * channels * sizeof(float);
    for (int y = height - 1; y >= 0; --y) {
        float* row = &img.data[static_cast<std::size_t>(y) * width * channels];
        in.read(reinterpret_cast<char*>(row), static_cast<std::streamsize>(row_bytes));
    }
    if (!in) throw IoError("read_pfm: truncated payload in " + path);
    return img;
}

}  // namespace husc
