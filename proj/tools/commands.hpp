#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aglbp/protocol.hpp"

namespace aglbp::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitInternal = 4;

struct RunConfig {
  PipelineConfig pipeline;
  bool unsafe_geometry = false;
  FoldChoice fold;

  /// Enforces P even and (R, P) in {(1,8), (2,12), (3,16)} unless
  /// unsafe_geometry is set.
  void validate() const;
};

/// Accepts plain numbers plus "inf"/"infinity".
double parse_parameter(const std::string& text);

enum class DescriptorFormat { csv, binary };

void cmd_extract(const std::filesystem::path& image, const RunConfig& config, DescriptorFormat format,
                 std::ostream& out);

struct HistOptions {
  std::string field = "eg";  // eg | affg
  int bins = 256;
  std::optional<double> range_min;
  std::optional<double> range_max;
};

/// Writes "bin_center,count" rows; summary (min/max/valid pixels) goes to `log`.
void cmd_hist(const std::filesystem::path& image, const HistOptions& options, const RunConfig& config,
              std::ostream& out, std::ostream& log);

/// Dumps a field as a width-column CSV; margin cells are left empty.
/// Fields: eg, affg, affg_ratio, h, j, ix, iy, ixx, iyy, ixy.
void cmd_field(const std::filesystem::path& image, const std::string& field, const RunConfig& config,
               std::ostream& out);

void cmd_train_mask(const Manifest& train, const RunConfig& config, std::ostream& out);

/// Returns the report. Optional precomputed mask replaces learning.
EvalReport cmd_evaluate(const Manifest& train, const Manifest& test, const RunConfig& config,
                        const std::optional<FeatureMask>& mask = std::nullopt);

/// Leave-samples-out run over a single grouped manifest.
EvalReport cmd_evaluate_groups(const Manifest& manifest, const RunConfig& config);

std::vector<SweepRow> cmd_sweep(const Manifest& train, const Manifest& test, const RunConfig& config,
                                SelectionMethod method, const std::vector<double>& grid);

std::vector<double> parse_grid(const std::string& text);

/// Writes the two-class grating/checkerboard pack: `per_class` images per
/// class for each of train and test, plus train.txt / test.txt manifests.
void cmd_synth(const std::filesystem::path& dir, int per_class, int size, std::uint64_t seed);

}  // namespace aglbp::cli
