#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "aglbp/descriptor.hpp"
#include "aglbp/selection.hpp"

namespace aglbp {

struct ManifestEntry {
  std::filesystem::path path;  // relative to the manifest root
  int label = 0;
  std::string group;           // optional; KTH-TIPS2 sample id
};

/// Plain-text image list, one "relative-path label [group]" per line.
/// Blank lines and '#' comments are skipped, as is a leading line holding a
/// lone integer (the image count in Outex problem files).
struct Manifest {
  std::filesystem::path root;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& e) const { return root / e.path; }
  /// Distinct raw labels in ascending order; position = interned class id.
  std::vector<int> class_labels() const;
};

/// `root` defaults to the manifest's directory.
Manifest load_manifest(const std::filesystem::path& file, const std::filesystem::path& root = {});
Manifest parse_manifest(std::istream& in, const std::filesystem::path& root);
void write_manifest(std::ostream& out, const Manifest& m);

struct PipelineConfig {
  DescriptorName descriptor = DescriptorName::aglbp;
  double radius = 1.0;
  int points = 8;
  MappingKind mapping = MappingKind::ro;
  Normalization normalization = Normalization::percent;
  SelectionMethod selection = SelectionMethod::var_threshold;
  double parameter = 2.0;
  VarianceAggregation aggregation = VarianceAggregation::mean;
  ExtractOptions extract;
  std::uint64_t seed = 0;
  int threads = 0;
  /// Directory for binary descriptor caching; empty disables it.
  std::filesystem::path cache_dir;

  std::vector<std::pair<std::string, std::string>> echo() const;
};

struct EvalReport {
  double accuracy = 0.0;  // percent
  std::vector<int> class_labels;
  std::vector<double> per_class_accuracy;
  std::vector<std::vector<int>> confusion;  // rows: true class, cols: predicted
  std::size_t dimension = 0;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
  std::vector<std::pair<std::string, std::string>> config;
  /// Leave-samples-out runs only: one report per fold.
  std::vector<EvalReport> folds;
  double fold_mean_accuracy = 0.0;
  double fold_accuracy_std = 0.0;
};

/// Extracts descriptors for every entry (in manifest order); unreadable
/// images fail with the file named.
std::vector<Descriptor> extract_manifest(const Manifest& m, const PipelineConfig& config);

FeatureMask learn_mask(const TrainingSet& training, const PipelineConfig& config);

/// Mask learned on train only, applied to both sides, then chi-square 1-NN
/// over the masked training gallery.
EvalReport evaluate_descriptors(const std::vector<Descriptor>& train, const std::vector<int>& train_labels,
                                const std::vector<Descriptor>& test, const std::vector<int>& test_labels,
                                const PipelineConfig& config);

/// As above with a precomputed mask.
EvalReport evaluate_with_mask(const std::vector<Descriptor>& train, const std::vector<int>& train_labels,
                              const std::vector<Descriptor>& test, const std::vector<int>& test_labels,
                              const FeatureMask& mask, const PipelineConfig& config);

/// Outex-style fixed split.
EvalReport run_protocol(const Manifest& train, const Manifest& test, const PipelineConfig& config);

/// Leave-samples-out fold choice for KTH-TIPS2-style data.
struct FoldChoice {
  enum class Kind { all, single, random } kind = Kind::all;
  int index = 0;
};
FoldChoice parse_fold_choice(std::string_view text);

/// Fold k trains on the k-th group (sorted) of every class and tests on the
/// remaining groups. `random` draws one training group per class from the
/// seed. For `all`, the top-level confusion sums the folds.
EvalReport run_group_protocol(const Manifest& manifest, const PipelineConfig& config,
                              FoldChoice fold = {});

struct SweepRow {
  double parameter = 0.0;
  double accuracy = 0.0;
  std::size_t dimension = 0;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

std::vector<SweepRow> sweep(const std::vector<Descriptor>& train, const std::vector<int>& train_labels,
                            const std::vector<Descriptor>& validation,
                            const std::vector<int>& validation_labels, SelectionMethod method,
                            const std::vector<double>& grid, const PipelineConfig& config);

void write_report_json(std::ostream& out, const EvalReport& report);
void write_confusion_csv(std::ostream& out, const EvalReport& report);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, SelectionMethod method,
                     const PipelineConfig& config);

}  // namespace aglbp
