#include "aglbp/classify.hpp"

#include <limits>
#include <string>

#include "aglbp/error.hpp"

namespace aglbp {

double chi_square(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ShapeError("chi_square: lengths differ (" + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = a[i] + b[i];
    if (denom == 0.0) continue;
    const double diff = a[i] - b[i];
    sum += diff * diff / denom;
  }
  return sum;
}

double chi_square(const Descriptor& a, const Descriptor& b) {
  if (a.block_sizes() != b.block_sizes()) throw ShapeError("chi_square: descriptor layouts differ");
  return chi_square(a.flattened(), b.flattened());
}

std::size_t nearest_index(std::span<const double> query,
                          std::span<const std::vector<double>> gallery) {
  if (gallery.empty()) throw DataError("nearest neighbor search over an empty gallery");
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < gallery.size(); ++i) {
    const double d = chi_square(query, gallery[i]);
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

int nn_classify(const Descriptor& query, std::span<const LabeledDescriptor> gallery) {
  if (gallery.empty()) throw DataError("nn_classify: empty gallery");
  std::vector<std::vector<double>> flats;
  flats.reserve(gallery.size());
  const auto layout = query.block_sizes();
  for (const auto& item : gallery) {
    if (item.descriptor.block_sizes() != layout)
      throw ShapeError("nn_classify: gallery layout differs from the query");
    flats.push_back(item.descriptor.flattened());
  }
  return gallery[nearest_index(query.flattened(), flats)].label;
}

}  // namespace aglbp
