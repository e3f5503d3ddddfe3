#pragma once

#include <filesystem>

#include "aglbp/image.hpp"

namespace aglbp {

/// Reads PGM/PPM (P2, P3, P5, P6; 8 or 16 bit) or PNG (gray or RGB, 8 or 16
/// bit; palettes are expanded). Alpha channels are rejected.
RasterImage load_raster(const std::filesystem::path& path);

/// load_raster followed by to_grayscale.
GrayImage load_gray(const std::filesystem::path& path);

/// Writes an 8-bit binary PGM, rounding and clamping to [0, 255].
void write_pgm(const std::filesystem::path& path, const GrayImage& img);

}  // namespace aglbp
