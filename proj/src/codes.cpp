#include "aglbp/codes.hpp"

#include <cmath>
#include <string>

#include "aglbp/error.hpp"

namespace aglbp {

namespace {

void check_length(std::size_t n) {
  if (n == 0 || n > 31) throw UsageError("pattern codes need 1..31 neighbors, got " + std::to_string(n));
}

}  // namespace

PatternCode lbp_code(double center, std::span<const double> neighbors) {
  check_length(neighbors.size());
  std::uint32_t code = 0;
  for (std::size_t p = 0; p < neighbors.size(); ++p) code |= sign_bit(neighbors[p] - center) << p;
  return {code, static_cast<int>(neighbors.size())};
}

PatternCode scalar_code(double center, std::span<const double> neighbors) {
  return lbp_code(center, neighbors);
}

int reference_direction(double center, std::span<const double> neighbors) {
  const int points = static_cast<int>(neighbors.size());
  if (points < 2 || points % 2 != 0)
    throw UsageError("reference direction needs an even neighbor count, got " + std::to_string(points));
  int best = 0;
  double best_mag = std::abs(neighbors[0] - center);
  for (int p = 1; p < points; ++p) {
    const double mag = std::abs(neighbors[p] - center);
    if (mag > best_mag) {
      best_mag = mag;
      best = p;
    }
  }
  const int push = (points / 2) * static_cast<int>(sign_bit(neighbors[best] - center));
  return (best + push) % points;
}

PatternCode aligned_code(int ds, double comparator_center, std::span<const double> comparator) {
  check_length(comparator.size());
  const int points = static_cast<int>(comparator.size());
  std::uint32_t code = 0;
  for (int p = 0; p < points; ++p) {
    const int shift = ((p - ds) % points + points) % points;
    code |= sign_bit(comparator[p] - comparator_center) << shift;
  }
  return {code, points};
}

PatternCode ro_code(double center, std::span<const double> neighbors, double comparator_center,
                    std::span<const double> comparator) {
  if (neighbors.size() != comparator.size())
    throw ShapeError("ro_code: intensity and comparator neighborhoods differ in length");
  return aligned_code(reference_direction(center, neighbors), comparator_center, comparator);
}

}  // namespace aglbp
