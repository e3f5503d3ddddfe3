#include "aglbp/gradient.hpp"

#include <cmath>
#include <limits>

#include "aglbp/error.hpp"

namespace aglbp {

namespace {

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": field dimensions differ (" + std::to_string(a.width()) +
                     "x" + std::to_string(a.height()) + " vs " + std::to_string(b.width()) + "x" +
                     std::to_string(b.height()) + ")");
}

template <typename Fn>
ScalarField pointwise(const ScalarField& like, int margin, Fn&& fn) {
  ScalarField out(like.width(), like.height(), margin);
  for (int y = margin; y < like.height() - margin; ++y)
    for (int x = margin; x < like.width() - margin; ++x) out.at(x, y) = fn(x, y);
  return out;
}

}  // namespace

ScalarField euclidean_gradient(const ScalarField& ix, const ScalarField& iy) {
  require_same_shape(ix, iy, "euclidean_gradient");
  const int margin = std::max(ix.margin(), iy.margin());
  return pointwise(ix, margin, [&](int x, int y) {
    const double gx = ix.at(x, y);
    const double gy = iy.at(x, y);
    return std::sqrt(gx * gx + gy * gy);
  });
}

AffineInvariants affine_invariants(const ScalarField& ix, const ScalarField& iy,
                                   const ScalarField& ixx, const ScalarField& iyy,
                                   const ScalarField& ixy) {
  for (const ScalarField* f : {&iy, &ixx, &iyy, &ixy}) require_same_shape(ix, *f, "affine_invariants");
  const int margin = std::max({ix.margin(), iy.margin(), ixx.margin(), iyy.margin(), ixy.margin()});
  ScalarField h = pointwise(ix, margin, [&](int x, int y) {
    const double cross = ixy.at(x, y);
    return ixx.at(x, y) * iyy.at(x, y) - cross * cross;
  });
  // The x/y-symmetric pair is summed first so that swapping axes (a lattice
  // quarter turn) reproduces J bit-for-bit.
  ScalarField j = pointwise(ix, margin, [&](int x, int y) {
    const double gx = ix.at(x, y);
    const double gy = iy.at(x, y);
    const double pure = ixx.at(x, y) * (gy * gy) + iyy.at(x, y) * (gx * gx);
    return pure - 2.0 * (gx * gy) * ixy.at(x, y);
  });
  return {std::move(h), std::move(j)};
}

ScalarField affine_gradient_prime(const ScalarField& h, const ScalarField& j) {
  require_same_shape(h, j, "affine_gradient_prime");
  const int margin = std::max(h.margin(), j.margin());
  return pointwise(h, margin, [&](int x, int y) {
    const double hv = h.at(x, y);
    const double jv = j.at(x, y);
    return std::sqrt(hv * hv / (jv * jv + 1.0));
  });
}

ScalarField affine_gradient_ratio(const ScalarField& h, const ScalarField& j) {
  require_same_shape(h, j, "affine_gradient_ratio");
  const int margin = std::max(h.margin(), j.margin());
  return pointwise(h, margin, [&](int x, int y) {
    const double hv = h.at(x, y);
    const double jv = j.at(x, y);
    if (jv == 0.0)
      return hv == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                       : std::numeric_limits<double>::infinity();
    return std::abs(hv / jv);
  });
}

GradientFields gradient_fields(const DerivativeFields& d) {
  AffineInvariants inv = affine_invariants(d.ix, d.iy, d.ixx, d.iyy, d.ixy);
  ScalarField affg = affine_gradient_prime(inv.h, inv.j);
  return {euclidean_gradient(d.ix, d.iy), std::move(inv.h), std::move(inv.j), std::move(affg)};
}

GradientFields gradient_fields(const GrayImage& img, double smoothing_sigma) {
  return gradient_fields(derivatives(img, smoothing_sigma));
}

}  // namespace aglbp
