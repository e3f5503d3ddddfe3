#pragma once

#include <cstdint>

#include "aglbp/image.hpp"

namespace aglbp::synthetic {

/// Periodic texture on a size x size torus: a sum of sinusoids whose wave
/// vectors are integer multiples of 2*pi/size, rescaled into [0, 255].
/// Values are real (not quantized), so exact ties between neighbors are rare.
GrayImage toroidal_texture(int size, std::uint64_t seed, int components = 12);

/// Band-limited grating mixture: twelve noise-free sinusoids with periods in
/// [6, 9] pixels and orientations within +-1 rad of a random angle.
/// Quantized to 8-bit levels.
GrayImage grating(int size, std::uint64_t seed);

/// Checkerboard with random cell size (7..9 px), rotation and offset,
/// Gaussian blurred (sigma 1.2), plus strong Gaussian noise (0.4 of the
/// cell contrast). Quantized to 8-bit levels.
GrayImage blurred_checkerboard(int size, std::uint64_t seed);

/// Intensity surface from a polynomial a + b*x + c*y + d*x^2 + e*x*y + f*y^2
/// in pixel coordinates relative to (ox, oy).
struct Quadratic {
  double a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
  double operator()(double x, double y) const { return a + b * x + c * y + d * x * x + e * x * y + f * y * y; }
};
GrayImage polynomial_image(int width, int height, const Quadratic& q, double ox = 0.0, double oy = 0.0);

}  // namespace aglbp::synthetic
