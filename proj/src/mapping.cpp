#include "aglbp/mapping.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <string>
#include <map>
#include <mutex>
#include <utility>

#include "aglbp/error.hpp"

namespace aglbp {

namespace {

std::uint32_t mask_of(int points) { return points >= 32 ? ~0u : ((1u << points) - 1u); }

std::uint32_t rotate_right(std::uint32_t code, int points) {
  return ((code >> 1) | ((code & 1u) << (points - 1))) & mask_of(points);
}

}  // namespace

std::string to_string(MappingKind kind) {
  switch (kind) {
    case MappingKind::original: return "original";
    case MappingKind::u2: return "u2";
    case MappingKind::ri: return "ri";
    case MappingKind::riu2: return "riu2";
    case MappingKind::ro: return "ro";
  }
  throw InvariantError("unknown mapping kind");
}

MappingKind parse_mapping_kind(std::string_view raw) {
  std::string text(raw);
  std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
  if (text == "original") return MappingKind::original;
  if (text == "u2") return MappingKind::u2;
  if (text == "ri") return MappingKind::ri;
  if (text == "riu2") return MappingKind::riu2;
  if (text == "ro") return MappingKind::ro;
  throw UsageError("unknown mapping '" + std::string(raw) + "' (original, u2, ri, riu2, ro)");
}

int circular_transitions(std::uint32_t code, int points) {
  return std::popcount(code ^ rotate_right(code, points));
}

std::uint32_t min_rotation(std::uint32_t code, int points) {
  std::uint32_t best = code;
  std::uint32_t r = code;
  for (int i = 1; i < points; ++i) {
    r = rotate_right(r, points);
    if (r < best) best = r;
  }
  return best;
}

Mapping build_mapping(MappingKind kind, int points) {
  if (points < 1) throw UsageError("mapping needs at least one bit");
  if (points > 24)
    throw CapacityError("mapping table for P=" + std::to_string(points) + " exceeds the 2^24 limit");

  Mapping m;
  m.kind = kind;
  m.points = points;
  const std::uint32_t size = 1u << points;
  m.table.resize(size);

  switch (kind) {
    case MappingKind::original:
    case MappingKind::ro:
      for (std::uint32_t c = 0; c < size; ++c) m.table[c] = c;
      m.bin_count = static_cast<int>(size);
      break;
    case MappingKind::u2: {
      const std::uint32_t shared = static_cast<std::uint32_t>(points * (points - 1) + 2);
      std::uint32_t next = 0;
      for (std::uint32_t c = 0; c < size; ++c)
        m.table[c] = circular_transitions(c, points) <= 2 ? next++ : shared;
      // P <= 2 has no non-uniform codes.
      m.bin_count = static_cast<int>(next == size ? next : shared + 1);
      break;
    }
    case MappingKind::ri: {
      std::vector<std::uint32_t> bin_of_rep(size, ~0u);
      std::uint32_t next = 0;
      for (std::uint32_t c = 0; c < size; ++c) {
        const std::uint32_t rep = min_rotation(c, points);
        // rep <= c, so every representative is numbered on first visit.
        if (bin_of_rep[rep] == ~0u) bin_of_rep[rep] = next++;
        m.table[c] = bin_of_rep[rep];
      }
      m.bin_count = static_cast<int>(next);
      break;
    }
    case MappingKind::riu2:
      for (std::uint32_t c = 0; c < size; ++c)
        m.table[c] = circular_transitions(c, points) <= 2 ? static_cast<std::uint32_t>(std::popcount(c))
                                                          : static_cast<std::uint32_t>(points + 1);
      m.bin_count = points + 2;
      break;
  }
  return m;
}

std::shared_ptr<const Mapping> shared_mapping(MappingKind kind, int points) {
  static std::mutex mutex;
  static std::map<std::pair<MappingKind, int>, std::shared_ptr<const Mapping>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{kind, points}];
  if (!slot) slot = std::make_shared<const Mapping>(build_mapping(kind, points));
  return slot;
}

}  // namespace aglbp
