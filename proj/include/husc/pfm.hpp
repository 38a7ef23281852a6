#pragma once

#include <string>

#include "husc/image.hpp"

namespace husc {

// Writes a 1-channel ("Pf") or 3-channel ("PF") float map. Little-endian
// payload signalled by the -1.0 scale header; rows stored bottom to top.
void write_pfm(const Image<float>& img, const std::string& path);

Image<float> read_pfm(const std::string& path);

}  // namespace husc
