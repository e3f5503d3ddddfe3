#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "aglbp/descriptor.hpp"

namespace aglbp {

/// Labeled training descriptors. All descriptors must share one layout and
/// every class needs at least two items.
struct TrainingSet {
  std::vector<Descriptor> descriptors;
  std::vector<int> labels;

  /// Checks the invariants above; returns the number of distinct classes.
  int validate() const;
};

enum class SelectionMethod { none, top_n, var_threshold };
enum class VarianceAggregation { mean, max };

std::string to_string(SelectionMethod method);
SelectionMethod parse_selection_method(std::string_view text);
VarianceAggregation parse_variance_aggregation(std::string_view text);

struct FeatureMask {
  SelectionMethod method = SelectionMethod::none;
  double parameter = 0.0;
  DescriptorName name = DescriptorName::lbp;
  double radius = 1.0;
  int points = 8;
  MappingKind mapping = MappingKind::original;
  std::vector<std::size_t> block_bin_counts;
  /// Strictly increasing kept indices, one list per block.
  std::vector<std::vector<std::uint32_t>> kept;

  std::size_t dimension() const;
};

/// Per block, per bin: unbiased variance within each class, aggregated over
/// classes (mean by default). Independent of item and class order.
std::vector<std::vector<double>> intraclass_variance(
    const TrainingSet& training, VarianceAggregation aggregation = VarianceAggregation::mean);

/// Per block, per bin mean over all training descriptors.
std::vector<std::vector<double>> mean_frequency(const TrainingSet& training);

/// Keeps the N most frequent bins of each block (ties: smaller index).
FeatureMask select_top_n(const TrainingSet& training, int n);

/// Keeps occupied bins whose aggregated intraclass variance is < phi. A block
/// where nothing passes keeps its single lowest-variance occupied bin.
FeatureMask select_by_variance(const TrainingSet& training, double phi,
                               VarianceAggregation aggregation = VarianceAggregation::mean);

/// Mask keeping every bin of `like`'s layout.
FeatureMask identity_mask(const Descriptor& like);

/// Gathers kept bins and renormalizes each block to the descriptor's
/// convention.
Descriptor apply_mask(const Descriptor& d, const FeatureMask& mask);

void write_mask_csv(std::ostream& out, const FeatureMask& mask);
FeatureMask read_mask_csv(std::istream& in);

}  // namespace aglbp
