#include "aglbp/descriptor.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include "aglbp/codes.hpp"
#include "aglbp/error.hpp"
#include "aglbp/gradient.hpp"

namespace aglbp {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  if (!s.empty() && s.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("malformed ") + what + " '" + s + "'");
  }
}

}  // namespace

std::string to_string(DescriptorName name) {
  switch (name) {
    case DescriptorName::lbp: return "LBP";
    case DescriptorName::mi_g: return "MI-G";
    case DescriptorName::mi_ag: return "MI-AG";
    case DescriptorName::rolbp: return "roLBP";
    case DescriptorName::rolagp: return "roLAGP";
    case DescriptorName::aglbp: return "AGLBP";
  }
  throw InvariantError("unknown descriptor name");
}

std::string to_string(PatternSource source) {
  switch (source) {
    case PatternSource::lbp: return "lbp";
    case PatternSource::lgp: return "lgp";
    case PatternSource::lagp: return "lagp";
    case PatternSource::rolbp: return "rolbp";
    case PatternSource::rolagp: return "rolagp";
  }
  throw InvariantError("unknown pattern source");
}

std::string to_string(Normalization norm) {
  switch (norm) {
    case Normalization::count: return "count";
    case Normalization::unit_sum: return "unit_sum";
    case Normalization::percent: return "percent";
  }
  throw InvariantError("unknown normalization");
}

DescriptorName parse_descriptor_name(std::string_view text) {
  const std::string t = lower(text);
  if (t == "lbp") return DescriptorName::lbp;
  if (t == "mi-g" || t == "mi_g") return DescriptorName::mi_g;
  if (t == "mi-ag" || t == "mi_ag") return DescriptorName::mi_ag;
  if (t == "rolbp") return DescriptorName::rolbp;
  if (t == "rolagp") return DescriptorName::rolagp;
  if (t == "aglbp") return DescriptorName::aglbp;
  throw UsageError("unknown descriptor '" + std::string(text) +
                   "' (LBP, MI-G, MI-AG, roLBP, roLAGP, AGLBP)");
}

Normalization parse_normalization(std::string_view text) {
  if (text == "count") return Normalization::count;
  if (text == "unit_sum" || text == "unit") return Normalization::unit_sum;
  if (text == "percent") return Normalization::percent;
  throw UsageError("unknown normalization '" + std::string(text) + "' (count, unit_sum, percent)");
}

std::vector<PatternSource> block_sources(DescriptorName name) {
  switch (name) {
    case DescriptorName::lbp: return {PatternSource::lbp};
    case DescriptorName::mi_g: return {PatternSource::lgp, PatternSource::lbp};
    case DescriptorName::mi_ag: return {PatternSource::lagp, PatternSource::lbp};
    case DescriptorName::rolbp: return {PatternSource::rolbp};
    case DescriptorName::rolagp: return {PatternSource::rolagp};
    case DescriptorName::aglbp: return {PatternSource::rolbp, PatternSource::rolagp};
  }
  throw InvariantError("unknown descriptor name");
}

MappingKind default_mapping(DescriptorName name) {
  switch (name) {
    case DescriptorName::rolbp:
    case DescriptorName::rolagp:
    case DescriptorName::aglbp: return MappingKind::ro;
    default: return MappingKind::original;
  }
}

std::size_t Descriptor::dimension() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.bins.size();
  return n;
}

std::vector<std::size_t> Descriptor::block_sizes() const {
  std::vector<std::size_t> sizes;
  for (const auto& b : blocks) sizes.push_back(b.bins.size());
  return sizes;
}

std::vector<double> Descriptor::flattened() const {
  std::vector<double> out;
  out.reserve(dimension());
  for (const auto& b : blocks) out.insert(out.end(), b.bins.begin(), b.bins.end());
  return out;
}

void normalize(std::vector<double>& bins, Normalization norm) {
  if (norm == Normalization::count) return;
  const double total = std::accumulate(bins.begin(), bins.end(), 0.0);
  if (total <= 0.0) return;
  const double scale = norm == Normalization::percent ? 100.0 : 1.0;
  for (double& b : bins) b = b * scale / total;
}

Descriptor extract(const GrayImage& img, const NeighborhoodSpec& spec, DescriptorName name,
                   MappingKind mapping_kind, Normalization norm, const ExtractOptions& options) {
  const int margin = spec.pipeline_margin();
  const int w = img.width();
  const int h = img.height();
  if (w <= 2 * margin || h <= 2 * margin)
    throw DimensionError(fmt::format("image {}x{} has no pixel at distance >= {} from the borders",
                                     w, h, margin));

  const auto sources = block_sources(name);
  const auto uses = [&](PatternSource s) {
    return std::find(sources.begin(), sources.end(), s) != sources.end();
  };
  const bool need_eg = uses(PatternSource::lgp);
  const bool need_affg = uses(PatternSource::lagp) || uses(PatternSource::rolagp);

  std::optional<GradientFields> fields;
  if (need_eg || need_affg) fields = gradient_fields(img, options.smoothing_sigma);

  const auto mapping = shared_mapping(mapping_kind, spec.points());
  const int points = spec.points();
  std::vector<std::vector<double>> counts(sources.size(),
                                          std::vector<double>(mapping->bin_count, 0.0));
  std::vector<double> g(points), eg(points), ag(points);

  for (int y = margin; y < h - margin; ++y) {
    for (int x = margin; x < w - margin; ++x) {
      const double gc = img.at(x, y);
      sample_circle_into(img.data(), w, x, y, spec, g);
      double egc = 0.0;
      double agc = 0.0;
      if (need_eg) {
        egc = fields->eg.at(x, y);
        sample_circle_into(fields->eg.data(), w, x, y, spec, eg);
      }
      if (need_affg) {
        agc = fields->affg_prime.at(x, y);
        sample_circle_into(fields->affg_prime.data(), w, x, y, spec, ag);
      }
      const int ds = reference_direction(gc, g);
      for (std::size_t b = 0; b < sources.size(); ++b) {
        PatternCode code;
        switch (sources[b]) {
          case PatternSource::lbp: code = lbp_code(gc, g); break;
          case PatternSource::lgp: code = scalar_code(egc, eg); break;
          case PatternSource::lagp: code = scalar_code(agc, ag); break;
          case PatternSource::rolbp: code = aligned_code(ds, gc, g); break;
          case PatternSource::rolagp: {
            const int dir = options.direction_from_comparator ? reference_direction(agc, ag) : ds;
            code = aligned_code(dir, agc, ag);
            break;
          }
        }
        counts[b][(*mapping)(code.value)] += 1.0;
      }
    }
  }

  Descriptor d;
  d.name = name;
  d.radius = spec.radius();
  d.points = points;
  d.mapping = mapping_kind;
  d.normalization = norm;
  for (std::size_t b = 0; b < sources.size(); ++b) {
    normalize(counts[b], norm);
    d.blocks.push_back({std::move(counts[b]), mapping_kind, sources[b], norm});
  }
  return d;
}

void write_descriptor_csv(std::ostream& out, const Descriptor& d) {
  std::string sizes;
  for (std::size_t n : d.block_sizes()) sizes += (sizes.empty() ? "" : ",") + std::to_string(n);
  out << fmt::format("# descriptor={} radius={} points={} mapping={} norm={} blocks={}\n",
                     to_string(d.name), d.radius, d.points, to_string(d.mapping),
                     to_string(d.normalization), sizes);
  std::string row = fmt::format("{},{},{},{}", to_string(d.name), d.radius, d.points, to_string(d.mapping));
  for (double v : d.flattened()) fmt::format_to(std::back_inserter(row), ",{}", v);
  out << row << '\n';
}

Descriptor read_descriptor_csv(std::istream& in) {
  std::map<std::string, std::string> meta;
  std::string line;
  std::string row;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream words(line.substr(1));
      std::string kv;
      while (words >> kv) {
        const auto eq = kv.find('=');
        if (eq != std::string::npos) meta[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      continue;
    }
    row = line;
    break;
  }
  if (row.empty()) throw DataError("descriptor CSV has no data row");
  const auto fields = split(row, ',');
  if (fields.size() < 5) throw DataError("descriptor CSV row is too short");

  Descriptor d;
  d.name = parse_descriptor_name(fields[0]);
  d.radius = parse_double(fields[1], "radius");
  d.points = static_cast<int>(parse_double(fields[2], "point count"));
  d.mapping = parse_mapping_kind(fields[3]);
  d.normalization = meta.contains("norm") ? parse_normalization(meta["norm"]) : Normalization::percent;

  std::vector<double> values;
  for (std::size_t i = 4; i < fields.size(); ++i) values.push_back(parse_double(fields[i], "bin value"));

  std::vector<std::size_t> sizes;
  if (meta.contains("blocks"))
    for (const auto& s : split(meta["blocks"], ',')) sizes.push_back(static_cast<std::size_t>(parse_double(s, "block size")));
  else
    sizes.push_back(values.size());
  if (std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) != values.size())
    throw DataError("descriptor CSV block sizes do not match the row length");

  const auto sources = block_sources(d.name);
  if (sources.size() != sizes.size())
    throw DataError("descriptor CSV block count does not match " + to_string(d.name));
  std::size_t offset = 0;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    PatternHistogram hist;
    hist.bins.assign(values.begin() + offset, values.begin() + offset + sizes[b]);
    hist.mapping = d.mapping;
    hist.source = sources[b];
    hist.normalization = d.normalization;
    d.blocks.push_back(std::move(hist));
    offset += sizes[b];
  }
  return d;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

std::uint64_t get_le(std::istream& in, int n) {
  unsigned char bytes[8] = {};
  in.read(reinterpret_cast<char*>(bytes), n);
  if (in.gcount() != n) throw DataError("truncated binary descriptor");
  std::uint64_t v = 0;
  for (int i = n - 1; i >= 0; --i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

void write_blocks_binary(std::ostream& out, const std::vector<std::vector<double>>& blocks) {
  out.write("AGLB", 4);
  out.put(static_cast<char>(kBinaryVersion));
  put_u32(out, static_cast<std::uint32_t>(blocks.size()));
  for (const auto& b : blocks) put_u32(out, static_cast<std::uint32_t>(b.size()));
  for (const auto& b : blocks)
    for (double v : b) put_f64(out, v);
}

std::vector<std::vector<double>> read_blocks_binary(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() != 4 || std::string_view(magic, 4) != "AGLB")
    throw DataError("binary descriptor has a bad magic number");
  const auto version = static_cast<std::uint8_t>(get_le(in, 1));
  if (version != kBinaryVersion)
    throw DataError("unsupported binary descriptor version " + std::to_string(version));
  const auto count = get_le(in, 4);
  if (count > 64) throw DataError("implausible block count in binary descriptor");
  std::vector<std::vector<double>> blocks(count);
  for (auto& b : blocks) {
    const auto n = get_le(in, 4);
    if (n > (1u << 24)) throw DataError("implausible block size in binary descriptor");
    b.resize(n);
  }
  for (auto& b : blocks)
    for (double& v : b) v = std::bit_cast<double>(get_le(in, 8));
  return blocks;
}

void write_descriptor_binary(std::ostream& out, const Descriptor& d) {
  std::vector<std::vector<double>> blocks;
  for (const auto& b : d.blocks) blocks.push_back(b.bins);
  write_blocks_binary(out, blocks);
}

Descriptor descriptor_from_blocks(std::vector<std::vector<double>> blocks, DescriptorName name,
                                  double radius, int points, MappingKind mapping,
                                  Normalization norm) {
  const auto sources = block_sources(name);
  if (sources.size() != blocks.size())
    throw DataError("block count " + std::to_string(blocks.size()) + " does not match " +
                    to_string(name));
  Descriptor d{name, radius, points, mapping, norm, {}};
  for (std::size_t b = 0; b < blocks.size(); ++b)
    d.blocks.push_back({std::move(blocks[b]), mapping, sources[b], norm});
  return d;
}

}  // namespace aglbp
