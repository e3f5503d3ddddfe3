#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace aglbp {

enum class MappingKind { original, u2, ri, riu2, ro };

std::string to_string(MappingKind kind);
MappingKind parse_mapping_kind(std::string_view text);

/// Total table from P-bit codes to histogram bins.
///   original, ro: identity, 2^P bins
///   u2:   patterns with <= 2 circular transitions in ascending order, then
///         one shared bin for the rest; P(P-1)+3 bins
///   ri:   one bin per rotation class, ordered by minimal representative
///   riu2: uniform patterns by popcount (P+1 bins) plus one non-uniform bin
struct Mapping {
  MappingKind kind = MappingKind::original;
  int points = 0;
  int bin_count = 0;
  std::vector<std::uint32_t> table;

  std::uint32_t operator()(std::uint32_t code) const { return table[code]; }
};

/// Throws CapacityError for P > 24.
Mapping build_mapping(MappingKind kind, int points);

/// Process-wide cache of built tables; safe to call from several threads.
std::shared_ptr<const Mapping> shared_mapping(MappingKind kind, int points);

/// Number of 0/1 changes walking once around the P-bit circle.
int circular_transitions(std::uint32_t code, int points);

/// Smallest value over all circular bit rotations.
std::uint32_t min_rotation(std::uint32_t code, int points);

}  // namespace aglbp
