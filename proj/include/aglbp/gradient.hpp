#pragma once

#include "aglbp/image.hpp"

namespace aglbp {

/// Second-order relative affine invariants of the intensity surface.
struct AffineInvariants {
  ScalarField h;  // Ixx*Iyy - Ixy^2
  ScalarField j;  // Ixx*Iy^2 - 2*Ix*Iy*Ixy + Ix^2*Iyy
};

struct GradientFields {
  ScalarField eg;          // sqrt(Ix^2 + Iy^2)
  ScalarField h;
  ScalarField j;
  ScalarField affg_prime;  // sqrt(H^2 / (J^2 + 1)), >= 0
};

ScalarField euclidean_gradient(const ScalarField& ix, const ScalarField& iy);

AffineInvariants affine_invariants(const ScalarField& ix, const ScalarField& iy,
                                   const ScalarField& ixx, const ScalarField& iyy,
                                   const ScalarField& ixy);

/// Zero-denominator-safe affine gradient magnitude. Finite everywhere valid.
ScalarField affine_gradient_prime(const ScalarField& h, const ScalarField& j);

/// Raw ratio |H/J|. Diagnostic only: +inf where J == 0 and H != 0, NaN where
/// both vanish. Descriptors never consume this.
ScalarField affine_gradient_ratio(const ScalarField& h, const ScalarField& j);

GradientFields gradient_fields(const DerivativeFields& d);
GradientFields gradient_fields(const GrayImage& img, double smoothing_sigma = 0.0);

}  // namespace aglbp
