#pragma once

#include <span>
#include <vector>

#include "aglbp/descriptor.hpp"

namespace aglbp {

/// sum_i (a_i - b_i)^2 / (a_i + b_i); bins with a_i + b_i == 0 contribute 0.
double chi_square(std::span<const double> a, std::span<const double> b);

/// Same on descriptors; block layouts must match.
double chi_square(const Descriptor& a, const Descriptor& b);

struct LabeledDescriptor {
  Descriptor descriptor;
  int label = 0;
};

/// Label of the gallery item at minimum chi-square distance; ties go to the
/// earliest item.
int nn_classify(const Descriptor& query, std::span<const LabeledDescriptor> gallery);

/// Index form over pre-flattened vectors, used by the protocols.
std::size_t nearest_index(std::span<const double> query,
                          std::span<const std::vector<double>> gallery);

}  // namespace aglbp
