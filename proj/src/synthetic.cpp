#include "aglbp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

namespace aglbp::synthetic {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

GrayImage rescaled(int w, int h, std::vector<double> v, bool quantize) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double mn = *lo;
  const double span = std::max(*hi - mn, 1e-12);
  for (double& x : v) {
    x = 10.0 + 235.0 * (x - mn) / span;
    if (quantize) x = std::round(x);
  }
  return GrayImage(w, h, std::move(v));
}

}  // namespace

GrayImage toroidal_texture(int size, std::uint64_t seed, int components) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> freq(-9, 9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  struct Wave {
    int kx, ky;
    double amp, phase;
  };
  std::vector<Wave> waves;
  while (static_cast<int>(waves.size()) < components) {
    const int kx = freq(rng);
    const int ky = freq(rng);
    if (kx == 0 && ky == 0) continue;
    waves.push_back({kx, ky, 0.3 + unit(rng), kTwoPi * unit(rng)});
  }
  std::vector<double> v(static_cast<std::size_t>(size) * size, 0.0);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (const auto& w : waves)
        acc += w.amp * std::sin(kTwoPi * (w.kx * x + w.ky * y) / size + w.phase);
      v[static_cast<std::size_t>(y) * size + x] = acc;
    }
  return rescaled(size, size, std::move(v), false);
}

GrayImage grating(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double base_angle = std::numbers::pi * unit(rng);
  struct Wave {
    double fx, fy, amp, phase;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 12; ++i) {
    const double angle = base_angle + 2.0 * (unit(rng) - 0.5);
    const double period = 6.0 + 3.0 * unit(rng);
    waves.push_back({std::cos(angle) / period, std::sin(angle) / period, 0.5 + 0.5 * unit(rng),
                     kTwoPi * unit(rng)});
  }
  std::vector<double> v(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double acc = 0.0;
      for (const auto& w : waves) acc += w.amp * std::sin(kTwoPi * (w.fx * x + w.fy * y) + w.phase);
      v[static_cast<std::size_t>(y) * size + x] = acc;
    }
  return rescaled(size, size, std::move(v), true);
}

GrayImage blurred_checkerboard(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.4);
  const double cell = 7.0 + 2.0 * unit(rng);
  const double angle = 0.5 * std::numbers::pi * unit(rng);
  const double ox = cell * unit(rng);
  const double oy = cell * unit(rng);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  std::vector<double> v(static_cast<std::size_t>(size) * size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      const double u = (c * x + s * y + ox) / cell;
      const double w = (-s * x + c * y + oy) / cell;
      const long parity = static_cast<long>(std::floor(u)) + static_cast<long>(std::floor(w));
      v[static_cast<std::size_t>(y) * size + x] = (parity & 1) ? 1.0 : 0.0;
    }
  GrayImage board = gaussian_smooth(GrayImage(size, size, std::move(v)), 1.2);
  std::vector<double> out(board.data().begin(), board.data().end());
  for (double& x : out) x += noise(rng);
  return rescaled(size, size, std::move(out), true);
}

GrayImage polynomial_image(int width, int height, const Quadratic& q, double ox, double oy) {
  std::vector<double> v(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) v[static_cast<std::size_t>(y) * width + x] = q(x - ox, y - oy);
  return GrayImage(width, height, std::move(v));
}

}  // namespace aglbp::synthetic
