#pragma once

#include <string>

#include "grid.hpp"

namespace uwvo {

// Loads PNG (8/16-bit, gray/palette/RGB/RGBA) or binary PGM/PPM (maxval 255),
// chosen by file extension; 8-bit samples are divided by 255.
Image load_image(const std::string& path);

// Saves 8-bit output (values rounded from [0,1]); format by extension:
// .png, .ppm (color) or .pgm (luminance).
void save_image(const Image& img, const std::string& path);

// Grayscale PFM, little-endian (header scale -1.0), rows bottom-to-top.
ScalarGrid load_pfm(const std::string& path);
void save_pfm(const ScalarGrid& grid, const std::string& path);

// 8-bit PGM preview of a scalar map, linearly mapping [min, max] to [0, 255].
void save_pgm_preview(const ScalarGrid& grid, const std::string& path);

}  // namespace uwvo
