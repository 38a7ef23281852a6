#pragma once

#include <string>

#include "husc/image.hpp"

namespace husc {

// Lossless PNG wrappers. Writers emit no ancillary chunks, so identical
// pixels give identical file bytes.

ImageU8 read_png_rgb8(const std::string& path);    // gray/palette/alpha inputs are expanded to RGB
ImageU8 read_png_gray8(const std::string& path);   // strict: 8-bit single channel only
ImageU16 read_png_gray16(const std::string& path); // strict: 16-bit single channel only

void write_png_rgb8(const ImageU8& img, const std::string& path);
void write_png_gray8(const ImageU8& img, const std::string& path);
void write_png_gray16(const ImageU16& img, const std::string& path);

}  // namespace husc
