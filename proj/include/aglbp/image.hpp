#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aglbp {

/// Decoded raster as it comes off disk: interleaved samples, 1 or 3 channels,
/// with `max_value` 255 (8-bit) or up to 65535 (16-bit).
struct RasterImage {
  int width = 0;
  int height = 0;
  int channels = 0;
  int max_value = 255;
  std::vector<std::uint16_t> samples;
};

/// Row-major real-valued intensity image. Loaded images live in [0, 255];
/// the type itself only requires finite values so analytic test surfaces
/// (negated or polynomial images) can be represented.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::vector<double> data);
  GrayImage(int width, int height, double fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const double> data() const noexcept { return data_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

/// Per-pixel real map sharing a GrayImage's geometry. Pixels closer than
/// `margin` to a border hold NaN and report `valid() == false`.
class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(int width, int height, int margin);
  ScalarField(int width, int height, int margin, std::vector<double> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int margin() const noexcept { return margin_; }

  bool valid(int x, int y) const noexcept {
    return x >= margin_ && y >= margin_ && x < width_ - margin_ && y < height_ - margin_;
  }
  double at(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  double& at(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const ScalarField& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int margin_ = 0;
  std::vector<double> data_;
};

/// One bilinear tap of the circular sampling pattern. The four support
/// pixels are base, base+x_axis, base+y_axis, base+x_axis+y_axis, where the
/// axes are lattice unit vectors (rotated along with the tap so that
/// quarter-turn related taps carry bit-identical weights).
struct SampleTap {
  int base_dx = 0;
  int base_dy = 0;
  int x_axis_dx = 1;
  int x_axis_dy = 0;
  int y_axis_dx = 0;
  int y_axis_dy = 1;
  double fx = 0.0;
  double fy = 0.0;
};

/// Circular sampling geometry: P points on a circle of radius R. Point p
/// lies at angle 2*pi*p/P, counterclockwise from +x, i.e. at
/// (x + R cos, y - R sin) in image coordinates (y grows downward).
class NeighborhoodSpec {
 public:
  NeighborhoodSpec(double radius, int points);

  double radius() const noexcept { return radius_; }
  int points() const noexcept { return points_; }
  /// ceil(R): integer reach of the sample circle.
  int reach() const noexcept { return reach_; }
  /// Border band excluded by the full extraction pipeline: ceil(R) + 2.
  int pipeline_margin() const noexcept { return reach_ + 2; }
  std::span<const SampleTap> taps() const noexcept { return taps_; }

 private:
  double radius_;
  int points_;
  int reach_;
  std::vector<SampleTap> taps_;
};

struct DerivativeFields {
  ScalarField ix;
  ScalarField iy;
  ScalarField ixx;
  ScalarField iyy;
  ScalarField ixy;
};

/// Converts 1- or 3-channel rasters to intensities in [0, 255].
/// RGB uses luminance 0.299R + 0.587G + 0.114B.
GrayImage to_grayscale(const RasterImage& image);

/// Separable Gaussian blur with mirrored borders. sigma <= 0 returns a copy.
GrayImage gaussian_smooth(const GrayImage& img, double sigma);

/// Central-difference first and second derivatives, valid margin 1.
/// Requires width, height >= 3. `smoothing_sigma` > 0 blurs first.
DerivativeFields derivatives(const GrayImage& img, double smoothing_sigma = 0.0);

/// Samples P values around integer `center` by bilinear interpolation.
/// Requires the center to be at least ceil(R)+1 pixels from every border.
std::vector<double> sample_circle(const GrayImage& img, int cx, int cy, const NeighborhoodSpec& spec);

/// Same as above on a derived field; the distance requirement grows by the
/// field's margin.
std::vector<double> sample_circle(const ScalarField& field, int cx, int cy,
                                  const NeighborhoodSpec& spec);

/// Unchecked variant writing into `out` (size P); the caller guarantees bounds.
void sample_circle_into(std::span<const double> data, int width, int cx, int cy,
                        const NeighborhoodSpec& spec, std::span<double> out);

/// Quarter turn counterclockwise: pixel (x, y) moves to (y, W-1-x).
/// Neighbor p of a pixel becomes neighbor p + P/4 of its image.
GrayImage rotate90(const GrayImage& img);

}  // namespace aglbp
