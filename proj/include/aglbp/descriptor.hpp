#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "aglbp/image.hpp"
#include "aglbp/mapping.hpp"

namespace aglbp {

enum class DescriptorName { lbp, mi_g, mi_ag, rolbp, rolagp, aglbp };
enum class PatternSource { lbp, lgp, lagp, rolbp, rolagp };
enum class Normalization { count, unit_sum, percent };

std::string to_string(DescriptorName name);
std::string to_string(PatternSource source);
std::string to_string(Normalization norm);
DescriptorName parse_descriptor_name(std::string_view text);
Normalization parse_normalization(std::string_view text);

/// Block layout of each descriptor, in concatenation order:
/// MI-G = [LGP, LBP], MI-AG = [LAGP, LBP], AGLBP = [roLBP, roLAGP].
std::vector<PatternSource> block_sources(DescriptorName name);

/// Natural mapping when none is requested: `ro` for rotation-aligned
/// descriptors, `original` otherwise.
MappingKind default_mapping(DescriptorName name);

struct PatternHistogram {
  std::vector<double> bins;
  MappingKind mapping = MappingKind::original;
  PatternSource source = PatternSource::lbp;
  Normalization normalization = Normalization::percent;
};

struct Descriptor {
  DescriptorName name = DescriptorName::lbp;
  double radius = 1.0;
  int points = 8;
  MappingKind mapping = MappingKind::original;
  Normalization normalization = Normalization::percent;
  std::vector<PatternHistogram> blocks;

  std::size_t dimension() const;
  std::vector<std::size_t> block_sizes() const;
  /// Blocks concatenated in order.
  std::vector<double> flattened() const;
};

/// Scales `bins` in place to the requested convention. A block summing to
/// zero is left as is.
void normalize(std::vector<double>& bins, Normalization norm);

struct ExtractOptions {
  /// Gaussian pre-smoothing before derivatives; 0 disables it.
  double smoothing_sigma = 0.0;
  /// Take the roLAGP reference direction from the affine-gradient samples
  /// instead of the intensities.
  bool direction_from_comparator = false;
};

/// Scans every pixel at distance >= ceil(R)+2 from the borders and builds the
/// per-block histograms, each mapped and normalized independently.
/// Throws DimensionError if that region is empty.
Descriptor extract(const GrayImage& img, const NeighborhoodSpec& spec, DescriptorName name,
                   MappingKind mapping, Normalization norm, const ExtractOptions& options = {});

/// One comment line echoing the layout, then one row:
/// name,R,P,mapping,bin...
void write_descriptor_csv(std::ostream& out, const Descriptor& d);
Descriptor read_descriptor_csv(std::istream& in);

/// Binary cache layout, little endian throughout:
///   "AGLB" | u8 version | u32 block count | u32 bins per block... | f64 values...
inline constexpr std::uint8_t kBinaryVersion = 1;
void write_blocks_binary(std::ostream& out, const std::vector<std::vector<double>>& blocks);
std::vector<std::vector<double>> read_blocks_binary(std::istream& in);
void write_descriptor_binary(std::ostream& out, const Descriptor& d);

/// Rebuilds a descriptor from binary blocks plus externally known metadata.
Descriptor descriptor_from_blocks(std::vector<std::vector<double>> blocks, DescriptorName name,
                                  double radius, int points, MappingKind mapping,
                                  Normalization norm);

}  // namespace aglbp
