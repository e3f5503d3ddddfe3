#include "aglbp/selection.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "aglbp/error.hpp"

namespace aglbp {

namespace {

// Order-independent sum: sorting first makes the result a function of the
// multiset of values only.
double sorted_sum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0);
}

bool same_layout(const Descriptor& a, const Descriptor& b) {
  return a.name == b.name && a.radius == b.radius && a.points == b.points &&
         a.mapping == b.mapping && a.normalization == b.normalization &&
         a.block_sizes() == b.block_sizes();
}

std::map<int, std::vector<std::size_t>> members_by_class(const TrainingSet& training) {
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t i = 0; i < training.labels.size(); ++i) classes[training.labels[i]].push_back(i);
  return classes;
}

FeatureMask mask_shell(const Descriptor& like, SelectionMethod method, double parameter) {
  FeatureMask m;
  m.method = method;
  m.parameter = parameter;
  m.name = like.name;
  m.radius = like.radius;
  m.points = like.points;
  m.mapping = like.mapping;
  m.block_bin_counts = like.block_sizes();
  return m;
}

}  // namespace

int TrainingSet::validate() const {
  if (descriptors.empty()) throw DataError("training set is empty");
  if (descriptors.size() != labels.size())
    throw InvariantError("training set has different numbers of descriptors and labels");
  for (const auto& d : descriptors)
    if (!same_layout(d, descriptors.front()))
      throw ShapeError("training descriptors do not share one layout");
  const auto classes = members_by_class(*this);
  for (const auto& [label, members] : classes)
    if (members.size() < 2)
      throw DataError(fmt::format("class {} has {} training item(s); at least 2 are required", label,
                                  members.size()));
  return static_cast<int>(classes.size());
}

std::string to_string(SelectionMethod method) {
  switch (method) {
    case SelectionMethod::none: return "none";
    case SelectionMethod::top_n: return "topn";
    case SelectionMethod::var_threshold: return "var";
  }
  throw InvariantError("unknown selection method");
}

SelectionMethod parse_selection_method(std::string_view text) {
  if (text == "none") return SelectionMethod::none;
  if (text == "topn" || text == "top_n") return SelectionMethod::top_n;
  if (text == "var" || text == "var_threshold") return SelectionMethod::var_threshold;
  throw UsageError("unknown selection method '" + std::string(text) + "' (none, topn, var)");
}

VarianceAggregation parse_variance_aggregation(std::string_view text) {
  if (text == "mean") return VarianceAggregation::mean;
  if (text == "max") return VarianceAggregation::max;
  throw UsageError("unknown variance aggregation '" + std::string(text) + "' (mean, max)");
}

std::size_t FeatureMask::dimension() const {
  std::size_t n = 0;
  for (const auto& k : kept) n += k.size();
  return n;
}

std::vector<std::vector<double>> intraclass_variance(const TrainingSet& training,
                                                     VarianceAggregation aggregation) {
  training.validate();
  const auto classes = members_by_class(training);
  const auto& first = training.descriptors.front();

  std::vector<std::vector<double>> result;
  std::vector<double> values;
  std::vector<double> per_class;
  for (std::size_t b = 0; b < first.blocks.size(); ++b) {
    const std::size_t bins = first.blocks[b].bins.size();
    std::vector<double> out(bins);
    for (std::size_t bin = 0; bin < bins; ++bin) {
      per_class.clear();
      for (const auto& [label, members] : classes) {
        values.clear();
        for (std::size_t i : members) values.push_back(training.descriptors[i].blocks[b].bins[bin]);
        const double n = static_cast<double>(values.size());
        const double mean = sorted_sum(values) / n;
        for (double& v : values) v = (v - mean) * (v - mean);
        per_class.push_back(sorted_sum(values) / (n - 1.0));
      }
      if (aggregation == VarianceAggregation::max)
        out[bin] = *std::max_element(per_class.begin(), per_class.end());
      else
        out[bin] = sorted_sum(per_class) / static_cast<double>(per_class.size());
    }
    result.push_back(std::move(out));
  }
  return result;
}

std::vector<std::vector<double>> mean_frequency(const TrainingSet& training) {
  training.validate();
  const auto& first = training.descriptors.front();
  std::vector<std::vector<double>> result;
  std::vector<double> values;
  for (std::size_t b = 0; b < first.blocks.size(); ++b) {
    const std::size_t bins = first.blocks[b].bins.size();
    std::vector<double> out(bins);
    for (std::size_t bin = 0; bin < bins; ++bin) {
      values.clear();
      for (const auto& d : training.descriptors) values.push_back(d.blocks[b].bins[bin]);
      out[bin] = sorted_sum(values) / static_cast<double>(values.size());
    }
    result.push_back(std::move(out));
  }
  return result;
}

FeatureMask select_top_n(const TrainingSet& training, int n) {
  const auto freq = mean_frequency(training);
  FeatureMask mask = mask_shell(training.descriptors.front(), SelectionMethod::top_n, n);
  for (const auto& block : freq) {
    if (n < 1 || static_cast<std::size_t>(n) > block.size())
      throw UsageError(fmt::format("top-N requires 1 <= N <= {}, got {}", block.size(), n));
    std::vector<std::uint32_t> order(block.size());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return block[a] > block[b]; });
    order.resize(n);
    std::sort(order.begin(), order.end());
    mask.kept.push_back(std::move(order));
  }
  return mask;
}

FeatureMask select_by_variance(const TrainingSet& training, double phi,
                               VarianceAggregation aggregation) {
  if (!(phi > 0.0)) throw UsageError(fmt::format("variance threshold must be > 0, got {}", phi));
  const auto variance = intraclass_variance(training, aggregation);
  const auto freq = mean_frequency(training);
  FeatureMask mask = mask_shell(training.descriptors.front(), SelectionMethod::var_threshold, phi);
  for (std::size_t b = 0; b < variance.size(); ++b) {
    std::vector<std::uint32_t> kept;
    for (std::uint32_t i = 0; i < variance[b].size(); ++i)
      if (variance[b][i] < phi && freq[b][i] > 0.0) kept.push_back(i);
    if (kept.empty()) {
      std::uint32_t best = 0;
      bool found = false;
      for (std::uint32_t i = 0; i < variance[b].size(); ++i) {
        if (freq[b][i] <= 0.0) continue;
        if (!found || variance[b][i] < variance[b][best]) best = i;
        found = true;
      }
      kept.push_back(best);
    }
    mask.kept.push_back(std::move(kept));
  }
  return mask;
}

FeatureMask identity_mask(const Descriptor& like) {
  FeatureMask mask = mask_shell(like, SelectionMethod::none, 0.0);
  for (std::size_t n : mask.block_bin_counts) {
    std::vector<std::uint32_t> all(n);
    std::iota(all.begin(), all.end(), 0u);
    mask.kept.push_back(std::move(all));
  }
  return mask;
}

Descriptor apply_mask(const Descriptor& d, const FeatureMask& mask) {
  if (d.name != mask.name || d.points != mask.points || d.mapping != mask.mapping ||
      d.radius != mask.radius)
    throw ShapeError(fmt::format("mask for {} (R={}, P={}, {}) cannot be applied to {} (R={}, P={}, {})",
                                 to_string(mask.name), mask.radius, mask.points,
                                 to_string(mask.mapping), to_string(d.name), d.radius, d.points,
                                 to_string(d.mapping)));
  if (d.block_sizes() != mask.block_bin_counts || mask.kept.size() != d.blocks.size())
    throw ShapeError("mask block layout does not match the descriptor");

  Descriptor out = d;
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    const auto& src = d.blocks[b].bins;
    std::vector<double> bins;
    bins.reserve(mask.kept[b].size());
    for (std::uint32_t i : mask.kept[b]) {
      if (i >= src.size()) throw ShapeError("mask index out of range");
      bins.push_back(src[i]);
    }
    normalize(bins, d.normalization);
    out.blocks[b].bins = std::move(bins);
  }
  return out;
}

void write_mask_csv(std::ostream& out, const FeatureMask& mask) {
  out << "method," << to_string(mask.method) << '\n';
  out << fmt::format("parameter,{}\n", mask.parameter);
  out << "descriptor," << to_string(mask.name) << '\n';
  out << fmt::format("radius,{}\n", mask.radius);
  out << "points," << mask.points << '\n';
  out << "mapping," << to_string(mask.mapping) << '\n';
  for (std::size_t b = 0; b < mask.kept.size(); ++b) {
    std::string row = fmt::format("block,{},{}", b, mask.block_bin_counts[b]);
    for (std::uint32_t i : mask.kept[b]) fmt::format_to(std::back_inserter(row), ",{}", i);
    out << row << '\n';
  }
}

FeatureMask read_mask_csv(std::istream& in) {
  FeatureMask mask;
  std::map<std::string, std::string> header;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2) throw DataError("malformed mask row '" + line + "'");
    if (cells[0] != "block") {
      header[cells[0]] = cells[1];
      continue;
    }
    if (cells.size() < 3) throw DataError("malformed mask block row");
    try {
      mask.block_bin_counts.push_back(std::stoul(cells[2]));
      std::vector<std::uint32_t> kept;
      for (std::size_t i = 3; i < cells.size(); ++i)
        kept.push_back(static_cast<std::uint32_t>(std::stoul(cells[i])));
      mask.kept.push_back(std::move(kept));
    } catch (const std::logic_error&) {
      throw DataError("malformed mask block row '" + line + "'");
    }
  }
  for (const char* key : {"method", "parameter", "descriptor", "radius", "points", "mapping"})
    if (!header.contains(key)) throw DataError(std::string("mask file lacks the '") + key + "' row");
  mask.method = parse_selection_method(header["method"]);
  mask.name = parse_descriptor_name(header["descriptor"]);
  mask.mapping = parse_mapping_kind(header["mapping"]);
  try {
    mask.parameter = std::stod(header["parameter"]);
    mask.radius = std::stod(header["radius"]);
    mask.points = std::stoi(header["points"]);
  } catch (const std::logic_error&) {
    throw DataError("malformed numeric header in mask file");
  }
  for (std::size_t b = 0; b < mask.kept.size(); ++b) {
    const auto& k = mask.kept[b];
    if (k.empty()) throw DataError("mask block keeps no bins");
    for (std::size_t i = 0; i < k.size(); ++i)
      if (k[i] >= mask.block_bin_counts[b] || (i > 0 && k[i] <= k[i - 1]))
        throw DataError("mask indices must be strictly increasing and in range");
  }
  return mask;
}

}  // namespace aglbp
