#include "husc/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <vector>

#include "husc/error.hpp"

namespace husc {

namespace {

struct Reader {
    FILE* f = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~Reader() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (f) std::fclose(f);
    }
};

struct Writer {
    FILE* f = nullptr;
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~Writer() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        if (f) std::fclose(f);
    }
};

void open_reader(Reader& r, const std::string& path) {
    r.f = std::fopen(path.c_str(), "rb");
    if (!r.f) throw IoError("png: cannot open " + path);
    r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!r.png) throw IoError("png: out of memory reading " + path);
    r.info = png_create_info_struct(r.png);
    if (!r.info) throw IoError("png: out of memory reading " + path);
}

void open_writer(Writer& w, const std::string& path) {
    w.f = std::fopen(path.c_str(), "wb");
    if (!w.f) throw IoError("png: cannot open " + path + " for writing");
    w.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!w.png) throw IoError("png: out of memory writing " + path);
    w.info = png_create_info_struct(w.png);
    if (!w.info) throw IoError("png: out of memory writing " + path);
}

}  // namespace

ImageU8 read_png_rgb8(const std::string& path) {
    Reader r;
    open_reader(r, path);
    if (setjmp(png_jmpbuf(r.png))) throw IoError("png: failed to decode " + path);
    png_init_io(r.png, r.f);
    png_read_info(r.png, r.info);

    png_set_expand(r.png);  // palette / low-bit gray to 8-bit
    png_set_strip_16(r.png);
    png_set_strip_alpha(r.png);
    png_set_gray_to_rgb(r.png);
    png_read_update_info(r.png, r.info);

    const int width = static_cast<int>(png_get_image_width(r.png, r.info));
    const int height = static_cast<int>(png_get_image_height(r.png, r.info));
    if (png_get_channels(r.png, r.info) != 3 || png_get_bit_depth(r.png, r.info) != 8)
        throw IoError("png: cannot normalize " + path + " to 8-bit RGB");

    ImageU8 img(width, height, 3);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = &img.at(0, y, 0);
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return img;
}

ImageU8 read_png_gray8(const std::string& path) {
    Reader r;
    open_reader(r, path);
    if (setjmp(png_jmpbuf(r.png))) throw IoError("png: failed to decode " + path);
    png_init_io(r.png, r.f);
    png_read_info(r.png, r.info);

    if (png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY ||
        png_get_bit_depth(r.png, r.info) != 8)
        throw IoError("png: " + path + " is not 8-bit grayscale");

    const int width = static_cast<int>(png_get_image_width(r.png, r.info));
    const int height = static_cast<int>(png_get_image_height(r.png, r.info));
    ImageU8 img(width, height, 1);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = &img.at(0, y, 0);
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return img;
}

ImageU16 read_png_gray16(const std::string& path) {
    Reader r;
    open_reader(r, path);
    if (setjmp(png_jmpbuf(r.png))) throw IoError("png: failed to decode " + path);
    png_init_io(r.png, r.f);
    png_read_info(r.png, r.info);

    if (png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY ||
        png_get_bit_depth(r.png, r.info) != 16)
        throw IoError("png: " + path + " is not 16-bit grayscale");

    png_set_swap(r.png);  // PNG payload is big-endian
    const int width = static_cast<int>(png_get_image_width(r.png, r.info));
    const int height = static_cast<int>(png_get_image_height(r.png, r.info));
    ImageU16 img(width, height, 1);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(&img.at(0, y, 0));
    png_read_image(r.png, rows.data());
    png_read_end(r.png, nullptr);
    return img;
}

namespace {

void write_png(const std::string& path, int width, int height, int color_type,
               int bit_depth, const std::vector<png_bytep>& rows, bool swap) {
    Writer w;
    open_writer(w, path);
    if (setjmp(png_jmpbuf(w.png))) throw IoError("png: failed to encode " + path);
    png_init_io(w.png, w.f);
    png_set_compression_level(w.png, 6);
    png_set_IHDR(w.png, w.info, static_cast<png_uint_32>(width),
                 static_cast<png_uint_32>(height), bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(w.png, w.info);
    if (swap) png_set_swap(w.png);
    png_write_image(w.png, const_cast<png_bytep*>(rows.data()));
    png_write_end(w.png, nullptr);
}

}  // namespace

void write_png_rgb8(const ImageU8& img, const std::string& path) {
    if (img.channels != 3 || img.empty())
        throw InvalidArgument("write_png_rgb8: need a non-empty 3-channel image");
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(&img.at(0, y, 0));
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, 8, rows, false);
}

void write_png_gray8(const ImageU8& img, const std::string& path) {
    if (img.channels != 1 || img.empty())
        throw InvalidArgument("write_png_gray8: need a non-empty 1-channel image");
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = const_cast<png_bytep>(&img.at(0, y, 0));
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, 8, rows, false);
}

void write_png_gray16(const ImageU16& img, const std::string& path) {
    if (img.channels != 1 || img.empty())
        throw InvalidArgument("write_png_gray16: need a non-empty 1-channel image");
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = reinterpret_cast<png_bytep>(const_cast<uint16_t*>(&img.at(0, y, 0)));
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_GRAY, 16, rows, true);
}

}  // namespace husc
