#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "aglbp/error.hpp"
#include "aglbp/gradient.hpp"
#include "aglbp/image_io.hpp"
#include "aglbp/synthetic.hpp"

namespace aglbp::cli {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  const auto& p = pipeline;
  if (p.points % 2 != 0) throw UsageError(fmt::format("--points must be even, got {}", p.points));
  if (unsafe_geometry) return;
  const bool supported = (p.radius == 1.0 && p.points == 8) || (p.radius == 2.0 && p.points == 12) ||
                         (p.radius == 3.0 && p.points == 16);
  if (!supported)
    throw UsageError(fmt::format(
        "(R,P)=({},{}) is outside the supported set (1,8), (2,12), (3,16); pass --unsafe-geometry "
        "to override",
        p.radius, p.points));
}

double parse_parameter(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double v = std::stod(t, &used);
    if (used != t.size() || std::isnan(v)) throw std::invalid_argument(t);
    return v;
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + text + "'");
  }
}

void cmd_extract(const fs::path& image, const RunConfig& config, DescriptorFormat format,
                 std::ostream& out) {
  config.validate();
  const auto& p = config.pipeline;
  const Descriptor d = extract(load_gray(image), NeighborhoodSpec(p.radius, p.points), p.descriptor,
                               p.mapping, p.normalization, p.extract);
  if (format == DescriptorFormat::binary)
    write_descriptor_binary(out, d);
  else
    write_descriptor_csv(out, d);
}

namespace {

ScalarField select_field(const GrayImage& img, const std::string& field, double sigma) {
  const DerivativeFields d = derivatives(img, sigma);
  if (field == "ix") return d.ix;
  if (field == "iy") return d.iy;
  if (field == "ixx") return d.ixx;
  if (field == "iyy") return d.iyy;
  if (field == "ixy") return d.ixy;
  GradientFields g = gradient_fields(d);
  if (field == "eg") return std::move(g.eg);
  if (field == "affg") return std::move(g.affg_prime);
  if (field == "h") return std::move(g.h);
  if (field == "j") return std::move(g.j);
  if (field == "affg_ratio") return affine_gradient_ratio(g.h, g.j);
  throw UsageError("unknown field '" + field + "'");
}

}  // namespace

void cmd_hist(const fs::path& image, const HistOptions& options, const RunConfig& config,
              std::ostream& out, std::ostream& log) {
  if (options.field != "eg" && options.field != "affg")
    throw UsageError("--field must be eg or affg, got '" + options.field + "'");
  if (options.bins < 1) throw UsageError("--bins must be >= 1");
  const ScalarField f = select_field(load_gray(image), options.field, config.pipeline.extract.smoothing_sigma);

  std::vector<double> values;
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x)
      if (f.valid(x, y)) values.push_back(f.at(x, y));
  if (values.empty()) throw DimensionError("field has no valid pixels");
  const auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
  const double lo = options.range_min.value_or(*mn_it);
  const double hi = options.range_max.value_or(*mx_it);
  if (!(hi >= lo)) throw UsageError("histogram range max is below min");

  // Bin centers run from lo to hi inclusive, so the field extremes sit on centers.
  const double step = (hi > lo && options.bins > 1) ? (hi - lo) / (options.bins - 1) : 1.0;
  std::vector<std::size_t> counts(options.bins, 0);
  for (double v : values) {
    const double pos = std::round((v - lo) / step);
    const auto idx = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(options.bins - 1)));
    ++counts[idx];
  }
  out << fmt::format("# field={} bins={} min={} max={} valid_pixels={} sigma={}\n", options.field,
                     options.bins, *mn_it, *mx_it, values.size(), config.pipeline.extract.smoothing_sigma);
  out << "bin_center,count\n";
  for (int i = 0; i < options.bins; ++i) out << fmt::format("{},{}\n", lo + i * step, counts[i]);
  log << fmt::format("{} min={} max={} valid_pixels={}\n", options.field, *mn_it, *mx_it, values.size());
}

void cmd_field(const fs::path& image, const std::string& field, const RunConfig& config, std::ostream& out) {
  const ScalarField f = select_field(load_gray(image), field, config.pipeline.extract.smoothing_sigma);
  out << fmt::format("# field={} width={} height={} margin={}\n", field, f.width(), f.height(), f.margin());
  for (int y = 0; y < f.height(); ++y) {
    std::string row;
    for (int x = 0; x < f.width(); ++x) {
      if (x > 0) row += ',';
      if (f.valid(x, y)) fmt::format_to(std::back_inserter(row), "{}", f.at(x, y));
    }
    out << row << '\n';
  }
}

void cmd_train_mask(const Manifest& train, const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto descriptors = extract_manifest(train, config.pipeline);
  std::vector<int> labels;
  for (const auto& e : train.entries) labels.push_back(e.label);
  write_mask_csv(out, learn_mask(TrainingSet{descriptors, labels}, config.pipeline));
}

EvalReport cmd_evaluate(const Manifest& train, const Manifest& test, const RunConfig& config,
                        const std::optional<FeatureMask>& mask) {
  config.validate();
  if (!mask) return run_protocol(train, test, config.pipeline);
  const auto train_desc = extract_manifest(train, config.pipeline);
  const auto test_desc = extract_manifest(test, config.pipeline);
  std::vector<int> train_labels, test_labels;
  for (const auto& e : train.entries) train_labels.push_back(e.label);
  for (const auto& e : test.entries) test_labels.push_back(e.label);
  EvalReport r = evaluate_with_mask(train_desc, train_labels, test_desc, test_labels, *mask, config.pipeline);
  r.config.emplace_back("mask", fmt::format("{}:{}", to_string(mask->method), mask->parameter));
  return r;
}

EvalReport cmd_evaluate_groups(const Manifest& manifest, const RunConfig& config) {
  config.validate();
  return run_group_protocol(manifest, config.pipeline, config.fold);
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) grid.push_back(parse_parameter(item));
  }
  if (grid.empty()) throw UsageError("--grid needs at least one value");
  return grid;
}

std::vector<SweepRow> cmd_sweep(const Manifest& train, const Manifest& test, const RunConfig& config,
                                SelectionMethod method, const std::vector<double>& grid) {
  config.validate();
  const auto train_desc = extract_manifest(train, config.pipeline);
  const auto test_desc = extract_manifest(test, config.pipeline);
  std::vector<int> train_labels, test_labels;
  for (const auto& e : train.entries) train_labels.push_back(e.label);
  for (const auto& e : test.entries) test_labels.push_back(e.label);
  return sweep(train_desc, train_labels, test_desc, test_labels, method, grid, config.pipeline);
}

void cmd_synth(const fs::path& dir, int per_class, int size, std::uint64_t seed) {
  if (per_class < 2) throw UsageError("--per-class must be >= 2");
  if (size < 16) throw UsageError("--size must be >= 16");
  for (const char* split : {"train", "test"}) {
    fs::create_directories(dir / split);
    Manifest m;
    m.root = dir;
    const std::uint64_t split_salt = std::string_view(split) == "train" ? 0 : 500000;
    for (int cls = 0; cls < 2; ++cls) {
      for (int i = 0; i < per_class; ++i) {
        const std::uint64_t s = seed * 1000003ull + split_salt + cls * 1000 + i;
        const GrayImage img = cls == 0 ? synthetic::grating(size, s) : synthetic::blurred_checkerboard(size, s);
        const fs::path rel = fs::path(split) / fmt::format("{}_{:02}.pgm", cls == 0 ? "grating" : "checker", i);
        write_pgm(dir / rel, img);
        m.entries.push_back({rel, cls, {}});
      }
    }
    std::ofstream out(dir / (std::string(split) + ".txt"));
    if (!out) throw DataError("cannot write manifest in '" + dir.string() + "'");
    write_manifest(out, m);
  }
}

}  // namespace aglbp::cli
