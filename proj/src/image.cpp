#include "aglbp/image.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "aglbp/error.hpp"

namespace aglbp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Offsets this close to a lattice coordinate are treated as exact.
constexpr double kSnapTolerance = 1e-9;

double snap(double v) {
  const double r = std::round(v);
  return std::abs(v - r) < kSnapTolerance ? r : v;
}

void rotate_quarter(int& dx, int& dy) {
  const int t = dx;
  dx = dy;
  dy = -t;
}

SampleTap make_tap(double radius, int p, int points) {
  const double angle = 2.0 * std::numbers::pi * p / points;
  const double ox = snap(radius * std::cos(angle));
  const double oy = snap(-radius * std::sin(angle));
  SampleTap tap;
  const double bx = std::floor(ox);
  const double by = std::floor(oy);
  tap.base_dx = static_cast<int>(bx);
  tap.base_dy = static_cast<int>(by);
  tap.fx = ox - bx;
  tap.fy = oy - by;
  return tap;
}

int mirror(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1)
    throw DimensionError("image dimensions must be positive, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  if (data_.size() != static_cast<std::size_t>(width) * height)
    throw DimensionError("image data length does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
  for (double v : data_)
    if (!std::isfinite(v)) throw DataError("image contains non-finite intensity");
}

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0),
                                    fill)) {}

ScalarField::ScalarField(int width, int height, int margin)
    : width_(width),
      height_(height),
      margin_(margin),
      data_(static_cast<std::size_t>(width) * height, kNaN) {}

ScalarField::ScalarField(int width, int height, int margin, std::vector<double> data)
    : width_(width), height_(height), margin_(margin), data_(std::move(data)) {
  if (data_.size() != static_cast<std::size_t>(width) * height)
    throw DimensionError("field data length does not match its dimensions");
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x)
      if (!valid(x, y)) at(x, y) = kNaN;
}

NeighborhoodSpec::NeighborhoodSpec(double radius, int points) : radius_(radius), points_(points) {
  if (!(radius >= 1.0) || !std::isfinite(radius))
    throw UsageError("neighborhood radius must be >= 1");
  if (points < 4 || points % 2 != 0)
    throw UsageError("neighborhood point count must be even and >= 4, got " + std::to_string(points));
  if (points > 24) throw CapacityError("neighborhood point count above 24 is not supported");
  reach_ = static_cast<int>(std::ceil(radius - kSnapTolerance));

  taps_.resize(points);
  if (points % 4 == 0) {
    // Build the first quadrant, then rotate exactly so quarter-turn related
    // taps share weights bit-for-bit.
    const int quarter = points / 4;
    for (int p = 0; p < quarter; ++p) taps_[p] = make_tap(radius, p, points);
    for (int q = 1; q < 4; ++q) {
      for (int p = 0; p < quarter; ++p) {
        SampleTap t = taps_[(q - 1) * quarter + p];
        rotate_quarter(t.base_dx, t.base_dy);
        rotate_quarter(t.x_axis_dx, t.x_axis_dy);
        rotate_quarter(t.y_axis_dx, t.y_axis_dy);
        taps_[q * quarter + p] = t;
      }
    }
  } else {
    for (int p = 0; p < points; ++p) taps_[p] = make_tap(radius, p, points);
  }
}

GrayImage to_grayscale(const RasterImage& image) {
  if (image.channels != 1 && image.channels != 3)
    throw FormatError("unsupported channel count " + std::to_string(image.channels) +
                      " (expected 1 or 3)");
  if (image.max_value < 1 || image.max_value > 65535)
    throw FormatError("unsupported sample range, max value " + std::to_string(image.max_value));
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  if (image.samples.size() != n * image.channels)
    throw FormatError("raster sample count does not match its header");

  std::vector<double> out(n);
  const bool eight_bit = image.max_value == 255;
  const double scale = 255.0 / image.max_value;
  for (std::size_t i = 0; i < n; ++i) {
    if (image.channels == 1) {
      const double v = image.samples[i];
      out[i] = eight_bit ? v : v * scale;
    } else {
      const std::uint16_t* px = &image.samples[3 * i];
      // Integer weighting keeps 8-bit results exact (e.g. white -> 255).
      const std::uint64_t weighted = 299ull * px[0] + 587ull * px[1] + 114ull * px[2];
      const double lum = static_cast<double>(weighted) / 1000.0;
      out[i] = eight_bit ? lum : lum * scale;
    }
  }
  return GrayImage(image.width, image.height, std::move(out));
}

GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
  if (sigma <= 0.0) return img;
  const int w = img.width();
  const int h = img.height();
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += kernel[i + radius];
  }
  for (double& k : kernel) k /= sum;

  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[k + radius] * img.at(mirror(x + k, w), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  std::vector<double> out(tmp.size());
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel[k + radius] * tmp[static_cast<std::size_t>(mirror(y + k, h)) * w + x];
      out[static_cast<std::size_t>(y) * w + x] = acc;
    }
  return GrayImage(w, h, std::move(out));
}

DerivativeFields derivatives(const GrayImage& source, double smoothing_sigma) {
  if (source.width() < 3 || source.height() < 3)
    throw DimensionError("derivatives need an image of at least 3x3, got " +
                         std::to_string(source.width()) + "x" + std::to_string(source.height()));
  const GrayImage img = gaussian_smooth(source, smoothing_sigma);
  const int w = img.width();
  const int h = img.height();
  DerivativeFields d{ScalarField(w, h, 1), ScalarField(w, h, 1), ScalarField(w, h, 1),
                     ScalarField(w, h, 1), ScalarField(w, h, 1)};
  // Stencils are written so that a quarter turn of the image permutes or
  // negates the results exactly (symmetric sums commute in IEEE arithmetic).
  for (int y = 1; y < h - 1; ++y) {
    for (int x = 1; x < w - 1; ++x) {
      const double c = img.at(x, y);
      const double e = img.at(x + 1, y);
      const double wv = img.at(x - 1, y);
      const double s = img.at(x, y + 1);
      const double n = img.at(x, y - 1);
      d.ix.at(x, y) = (e - wv) / 2.0;
      d.iy.at(x, y) = (s - n) / 2.0;
      d.ixx.at(x, y) = (e + wv) - 2.0 * c;
      d.iyy.at(x, y) = (s + n) - 2.0 * c;
      const double diag = img.at(x + 1, y + 1) + img.at(x - 1, y - 1);
      const double anti = img.at(x + 1, y - 1) + img.at(x - 1, y + 1);
      d.ixy.at(x, y) = (diag - anti) / 4.0;
    }
  }
  return d;
}

void sample_circle_into(std::span<const double> data, int width, int cx, int cy,
                        const NeighborhoodSpec& spec, std::span<double> out) {
  const auto taps = spec.taps();
  const auto read = [&](int dx, int dy) {
    return data[static_cast<std::size_t>(cy + dy) * width + (cx + dx)];
  };
  for (std::size_t p = 0; p < taps.size(); ++p) {
    const SampleTap& t = taps[p];
    const double v00 = read(t.base_dx, t.base_dy);
    if (t.fx == 0.0 && t.fy == 0.0) {
      out[p] = v00;
      continue;
    }
    if (t.fy == 0.0) {
      const double v10 = read(t.base_dx + t.x_axis_dx, t.base_dy + t.x_axis_dy);
      out[p] = v00 + t.fx * (v10 - v00);
      continue;
    }
    if (t.fx == 0.0) {
      const double v01 = read(t.base_dx + t.y_axis_dx, t.base_dy + t.y_axis_dy);
      out[p] = v00 + t.fy * (v01 - v00);
      continue;
    }
    const double v10 = read(t.base_dx + t.x_axis_dx, t.base_dy + t.x_axis_dy);
    const double v01 = read(t.base_dx + t.y_axis_dx, t.base_dy + t.y_axis_dy);
    const double v11 = read(t.base_dx + t.x_axis_dx + t.y_axis_dx,
                            t.base_dy + t.x_axis_dy + t.y_axis_dy);
    out[p] = v00 + t.fx * (v10 - v00) + t.fy * (v01 - v00) +
             t.fx * t.fy * ((v11 - v10) - (v01 - v00));
  }
}

namespace {

void check_center(int width, int height, int cx, int cy, int required) {
  if (cx < required || cy < required || cx >= width - required || cy >= height - required)
    throw OutOfBoundsError("sampling center (" + std::to_string(cx) + "," + std::to_string(cy) +
                           ") must be at least " + std::to_string(required) +
                           " pixels from every border");
}

}  // namespace

std::vector<double> sample_circle(const GrayImage& img, int cx, int cy,
                                  const NeighborhoodSpec& spec) {
  check_center(img.width(), img.height(), cx, cy, spec.reach() + 1);
  std::vector<double> out(spec.points());
  sample_circle_into(img.data(), img.width(), cx, cy, spec, out);
  return out;
}

std::vector<double> sample_circle(const ScalarField& field, int cx, int cy,
                                  const NeighborhoodSpec& spec) {
  check_center(field.width(), field.height(), cx, cy, spec.reach() + 1 + field.margin());
  std::vector<double> out(spec.points());
  sample_circle_into(field.data(), field.width(), cx, cy, spec, out);
  return out;
}

GrayImage rotate90(const GrayImage& img) {
  const int w = img.width();
  const int h = img.height();
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  // Output is h wide and w tall.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out[static_cast<std::size_t>(w - 1 - x) * h + y] = img.at(x, y);
  return GrayImage(h, w, std::move(out));
}

}  // namespace aglbp
