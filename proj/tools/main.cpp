// aglbp command-line interface.
#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <memory>

#include "aglbp/error.hpp"
#include "commands.hpp"

namespace fs = std::filesystem;
using namespace aglbp;
using namespace aglbp::cli;

namespace {

struct ConfigFlags {
  std::string descriptor = "AGLBP";
  double radius = 1.0;
  int points = 8;
  std::string mapping = "auto";
  std::string norm = "percent";
  std::string select = "var";
  std::string param = "2";
  std::string phi;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  std::string aggregation = "mean";
  std::string direction = "intensity";
  int threads = 0;
  bool unsafe_geometry = false;
  std::string cache;
  std::string fold = "all";

  RunConfig resolve() const {
    RunConfig c;
    auto& p = c.pipeline;
    p.descriptor = parse_descriptor_name(descriptor);
    p.radius = radius;
    p.points = points;
    p.mapping = mapping == "auto" ? default_mapping(p.descriptor) : parse_mapping_kind(mapping);
    p.normalization = parse_normalization(norm);
    p.selection = parse_selection_method(select);
    p.parameter = parse_parameter(param);
    if (!phi.empty()) {
      p.selection = SelectionMethod::var_threshold;
      p.parameter = parse_parameter(phi);
    }
    p.aggregation = parse_variance_aggregation(aggregation);
    p.extract.smoothing_sigma = sigma;
    if (direction != "intensity" && direction != "comparator")
      throw UsageError("--direction must be intensity or comparator");
    p.extract.direction_from_comparator = direction == "comparator";
    p.seed = seed;
    p.threads = threads;
    p.cache_dir = cache;
    c.unsafe_geometry = unsafe_geometry;
    c.fold = parse_fold_choice(fold);
    c.validate();
    return c;
  }
};

void add_geometry(CLI::App* app, ConfigFlags& f) {
  app->add_option("--descriptor", f.descriptor, "LBP, MI-G, MI-AG, roLBP, roLAGP, AGLBP")
      ->capture_default_str();
  app->add_option("--radius", f.radius, "neighborhood radius R")->capture_default_str();
  app->add_option("--points", f.points, "neighbor count P")->capture_default_str();
  app->add_option("--mapping", f.mapping, "auto, original, u2, ri, riu2, ro")->capture_default_str();
  app->add_option("--norm", f.norm, "count, unit_sum, percent")->capture_default_str();
  app->add_option("--sigma", f.sigma, "Gaussian pre-smoothing before derivatives (0 = off)")
      ->capture_default_str();
  app->add_option("--direction", f.direction, "roLAGP reference direction source: intensity or comparator")
      ->capture_default_str();
  app->add_flag("--unsafe-geometry", f.unsafe_geometry, "allow (R,P) outside (1,8), (2,12), (3,16)");
}

void add_selection(CLI::App* app, ConfigFlags& f) {
  app->add_option("--select", f.select, "none, topn, var")->capture_default_str();
  app->add_option("--param", f.param, "N for topn, phi for var (accepts inf)")->capture_default_str();
  app->add_option("--phi", f.phi, "shorthand for --select var --param PHI");
  app->add_option("--aggregation", f.aggregation, "variance aggregation over classes: mean or max")
      ->capture_default_str();
}

void add_runtime(CLI::App* app, ConfigFlags& f) {
  app->add_option("--seed", f.seed, "seed for randomized fold choice")->capture_default_str();
  app->add_option("--threads", f.threads, "worker threads (0 = AGLBP_THREADS or all cores)");
  app->add_option("--cache", f.cache, "directory for the binary descriptor cache");
}

// Output sink: a file if a path is given, else stdout.
class Sink {
 public:
  explicit Sink(const std::string& path, bool binary = false) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, binary ? std::ios::binary : std::ios::out);
    if (!*file_) throw DataError("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void print_summary(std::ostream& out, const EvalReport& r) {
  out << fmt::format("accuracy: {:.2f}\n", r.accuracy);
  if (!r.folds.empty()) {
    for (std::size_t i = 0; i < r.folds.size(); ++i)
      out << fmt::format("fold {}: {:.2f} (dimension {})\n", i, r.folds[i].accuracy, r.folds[i].dimension);
    out << fmt::format("fold mean: {:.2f} +- {:.2f}\n", r.fold_mean_accuracy, r.fold_accuracy_std);
  }
  out << fmt::format("dimension: {}\ntrain: {}\ntest: {}\n", r.dimension, r.train_count, r.test_count);
}

void emit_report(const EvalReport& r, const std::string& prefix) {
  if (prefix.empty()) {
    write_report_json(std::cout, r);
    print_summary(std::cerr, r);
    return;
  }
  std::ofstream json(prefix + ".json");
  std::ofstream csv(prefix + "_confusion.csv");
  if (!json || !csv) throw DataError("cannot write report files with prefix '" + prefix + "'");
  write_report_json(json, r);
  write_confusion_csv(csv, r);
  print_summary(std::cout, r);
}

int run(int argc, char** argv) {
  CLI::App app{"Affine-gradient local binary pattern texture descriptors"};
  app.require_subcommand(1);
  ConfigFlags flags;

  std::string image, out, train, test, manifest, mask_file, grid, format = "csv";
  HistOptions hist;
  double range_min = 0, range_max = 0;
  int per_class = 10, size = 64;

  auto* extract_cmd = app.add_subcommand("extract", "extract one image descriptor");
  extract_cmd->add_option("--image", image, "input PGM/PNG")->required();
  extract_cmd->add_option("--format", format, "csv or bin")->capture_default_str();
  extract_cmd->add_option("--out", out, "output file (default stdout)");
  add_geometry(extract_cmd, flags);

  auto* hist_cmd = app.add_subcommand("hist", "histogram of the gradient or affine-gradient field");
  hist_cmd->add_option("--image", image, "input PGM/PNG")->required();
  hist_cmd->add_option("--field", hist.field, "eg or affg")->capture_default_str();
  hist_cmd->add_option("--bins", hist.bins, "bin count")->capture_default_str();
  auto* min_opt = hist_cmd->add_option("--range-min", range_min, "lowest bin center");
  auto* max_opt = hist_cmd->add_option("--range-max", range_max, "highest bin center");
  hist_cmd->add_option("--sigma", flags.sigma, "Gaussian pre-smoothing (0 = off)");
  hist_cmd->add_option("--out", out, "output CSV (default stdout)");

  std::string field_name = "affg";
  auto* field_cmd = app.add_subcommand("field", "dump a derived field as CSV");
  field_cmd->add_option("--image", image, "input PGM/PNG")->required();
  field_cmd->add_option("--field", field_name, "eg, affg, affg_ratio, h, j, ix, iy, ixx, iyy, ixy")
      ->capture_default_str();
  field_cmd->add_option("--sigma", flags.sigma, "Gaussian pre-smoothing (0 = off)");
  field_cmd->add_option("--out", out, "output CSV (default stdout)");

  auto* mask_cmd = app.add_subcommand("train-mask", "learn a feature mask from a training manifest");
  mask_cmd->add_option("--train", train, "training manifest")->required();
  mask_cmd->add_option("--out", out, "mask CSV (default stdout)");
  add_geometry(mask_cmd, flags);
  add_selection(mask_cmd, flags);
  add_runtime(mask_cmd, flags);

  auto* eval_cmd = app.add_subcommand("evaluate", "run a classification protocol");
  auto* train_opt = eval_cmd->add_option("--train", train, "training manifest");
  auto* test_opt = eval_cmd->add_option("--test", test, "test manifest");
  auto* manifest_opt =
      eval_cmd->add_option("--manifest", manifest, "grouped manifest for leave-samples-out folds");
  eval_cmd->add_option("--fold", flags.fold, "all, random, or a fold index")->capture_default_str();
  eval_cmd->add_option("--mask", mask_file, "precomputed mask CSV (skips mask learning)");
  eval_cmd->add_option("--out", out, "report prefix: writes PREFIX.json and PREFIX_confusion.csv");
  train_opt->needs(test_opt);
  test_opt->needs(train_opt);
  manifest_opt->excludes(train_opt)->excludes(test_opt);
  add_geometry(eval_cmd, flags);
  add_selection(eval_cmd, flags);
  add_runtime(eval_cmd, flags);

  auto* sweep_cmd = app.add_subcommand("sweep", "accuracy versus selection parameter");
  sweep_cmd->add_option("--train", train, "training manifest")->required();
  sweep_cmd->add_option("--test", test, "validation manifest")->required();
  sweep_cmd->add_option("--grid", grid, "comma-separated parameter values")->required();
  sweep_cmd->add_option("--out", out, "output CSV (default stdout)");
  add_geometry(sweep_cmd, flags);
  add_selection(sweep_cmd, flags);
  add_runtime(sweep_cmd, flags);

  std::string synth_dir;
  auto* synth_cmd = app.add_subcommand("synth", "write the synthetic two-class texture pack");
  synth_cmd->add_option("--out", synth_dir, "output directory")->required();
  synth_cmd->add_option("--per-class", per_class, "images per class per split")->capture_default_str();
  synth_cmd->add_option("--size", size, "image side length")->capture_default_str();
  synth_cmd->add_option("--seed", flags.seed, "generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (synth_cmd->parsed()) {
    cmd_synth(synth_dir, per_class, size, flags.seed);
    return kExitOk;
  }
  if (hist_cmd->parsed() || field_cmd->parsed()) {
    RunConfig config;
    config.pipeline.extract.smoothing_sigma = flags.sigma;
    Sink sink(out);
    if (field_cmd->parsed()) {
      cmd_field(image, field_name, config, sink.stream());
      return kExitOk;
    }
    if (*min_opt) hist.range_min = range_min;
    if (*max_opt) hist.range_max = range_max;
    cmd_hist(image, hist, config, sink.stream(), sink.to_file() ? std::cout : std::cerr);
    return kExitOk;
  }

  const RunConfig config = flags.resolve();
  if (extract_cmd->parsed()) {
    if (format != "csv" && format != "bin") throw UsageError("--format must be csv or bin");
    const auto fmt_kind = format == "bin" ? DescriptorFormat::binary : DescriptorFormat::csv;
    Sink sink(out, fmt_kind == DescriptorFormat::binary);
    cmd_extract(image, config, fmt_kind, sink.stream());
    std::cerr << "extracted " << to_string(config.pipeline.descriptor) << " from " << image << "\n";
    return kExitOk;
  }
  if (mask_cmd->parsed()) {
    Sink sink(out);
    cmd_train_mask(load_manifest(train), config, sink.stream());
    return kExitOk;
  }
  if (eval_cmd->parsed()) {
    if (!manifest.empty()) {
      emit_report(cmd_evaluate_groups(load_manifest(manifest), config), out);
      return kExitOk;
    }
    if (train.empty()) throw UsageError("evaluate needs --train/--test or --manifest");
    std::optional<FeatureMask> mask;
    if (!mask_file.empty()) {
      std::ifstream in(mask_file);
      if (!in) throw DataError("cannot open mask '" + mask_file + "'");
      mask = read_mask_csv(in);
    }
    emit_report(cmd_evaluate(load_manifest(train), load_manifest(test), config, mask), out);
    return kExitOk;
  }
  if (sweep_cmd->parsed()) {
    const auto method = config.pipeline.selection;
    if (method == SelectionMethod::none) throw UsageError("sweep needs --select topn or var");
    const auto rows = cmd_sweep(load_manifest(train), load_manifest(test), config, method, parse_grid(grid));
    Sink sink(out);
    write_sweep_csv(sink.stream(), rows, method, config.pipeline);
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::usage: return kExitUsage;
      case ErrorKind::data: return kExitData;
      case ErrorKind::invariant: return kExitInternal;
    }
    return kExitInternal;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
