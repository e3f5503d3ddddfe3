#pragma once

#include <cstdint>
#include <span>

namespace aglbp {

/// A P-bit local pattern code, value < 2^P.
struct PatternCode {
  std::uint32_t value = 0;
  int bits = 0;

  friend bool operator==(const PatternCode&, const PatternCode&) = default;
};

/// Sign function shared by every code: s(x) = 1 for x >= 0, else 0.
constexpr std::uint32_t sign_bit(double x) noexcept { return x >= 0.0 ? 1u : 0u; }

/// Classic local binary pattern: sum_p s(g_p - g_c) * 2^p.
PatternCode lbp_code(double center, std::span<const double> neighbors);

/// The same thresholding kernel applied to a derived scalar field
/// (gradient magnitude for LGP, affine gradient for LAGP).
PatternCode scalar_code(double center, std::span<const double> neighbors);

/// Reference direction Ds in [0, P). D is the index of the largest
/// |g_p - g_c| (smallest index on ties); Ds = (D + P/2 * s(g_D - g_c)) mod P.
int reference_direction(double center, std::span<const double> neighbors);

/// Bits from comparator values against their own center, with bit p placed
/// at position (p - ds) mod P.
PatternCode aligned_code(int ds, double comparator_center, std::span<const double> comparator);

/// Rotation-aligned code. Ds comes from the intensity neighborhood; the bits
/// come from the comparator (intensities for roLBP, affine gradient for roLAGP).
PatternCode ro_code(double center, std::span<const double> neighbors, double comparator_center,
                    std::span<const double> comparator);

}  // namespace aglbp
