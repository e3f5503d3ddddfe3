#include "aglbp/protocol.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "aglbp/classify.hpp"
#include "aglbp/error.hpp"
#include "aglbp/image_io.hpp"
#include "aglbp/parallel.hpp"
#include "json.hpp"

namespace aglbp {

namespace fs = std::filesystem;

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_tag(const PipelineConfig& c) {
  return fmt::format("{}|{}|{}|{}|{}|{}|{}", to_string(c.descriptor), c.radius, c.points,
                     to_string(c.mapping), to_string(c.normalization), c.extract.smoothing_sigma,
                     c.extract.direction_from_comparator);
}

fs::path cache_file(const fs::path& image, const PipelineConfig& config) {
  std::error_code ec;
  const auto size = fs::file_size(image, ec);
  const auto stamp = fs::last_write_time(image, ec).time_since_epoch().count();
  const std::string key = fmt::format("{}|{}|{}|{}", fs::absolute(image).lexically_normal().string(),
                                      size, stamp, config_tag(config));
  return config.cache_dir / fmt::format("{:016x}.aglb", fnv1a(key));
}

Descriptor extract_one(const fs::path& image, const PipelineConfig& config) {
  fs::path cached;
  if (!config.cache_dir.empty()) {
    cached = cache_file(image, config);
    if (std::ifstream in{cached, std::ios::binary}) {
      try {
        return descriptor_from_blocks(read_blocks_binary(in), config.descriptor, config.radius,
                                      config.points, config.mapping, config.normalization);
      } catch (const DataError&) {
        // stale or corrupt entry: recompute below
      }
    }
  }
  Descriptor d;
  try {
    d = extract(load_gray(image), NeighborhoodSpec(config.radius, config.points), config.descriptor,
                config.mapping, config.normalization, config.extract);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::data) throw DataError(e.what() + std::string(" [") + image.string() + "]");
    throw;
  }
  if (!cached.empty()) {
    std::error_code ec;
    fs::create_directories(config.cache_dir, ec);
    std::ofstream out(cached, std::ios::binary);
    if (out) write_descriptor_binary(out, d);
  }
  return d;
}

std::map<int, int> intern(const std::vector<int>& labels) {
  std::set<int> unique(labels.begin(), labels.end());
  std::map<int, int> ids;
  for (int l : unique) ids.emplace(l, static_cast<int>(ids.size()));
  return ids;
}

std::vector<int> labels_of(const std::vector<ManifestEntry>& entries) {
  std::vector<int> out;
  for (const auto& e : entries) out.push_back(e.label);
  return out;
}

double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

void fill_rates(EvalReport& r) {
  std::size_t correct = 0;
  std::size_t total = 0;
  r.per_class_accuracy.assign(r.confusion.size(), 0.0);
  for (std::size_t c = 0; c < r.confusion.size(); ++c) {
    std::size_t row = 0;
    for (int v : r.confusion[c]) row += static_cast<std::size_t>(v);
    r.per_class_accuracy[c] = percent(static_cast<std::size_t>(r.confusion[c][c]), row);
    correct += static_cast<std::size_t>(r.confusion[c][c]);
    total += row;
  }
  r.accuracy = percent(correct, total);
}

std::string echo_line(const std::vector<std::pair<std::string, std::string>>& echo) {
  std::string line = "#";
  for (const auto& [k, v] : echo) line += " " + k + "=" + v;
  return line;
}

}  // namespace

std::vector<int> Manifest::class_labels() const {
  std::set<int> unique;
  for (const auto& e : entries) unique.insert(e.label);
  return {unique.begin(), unique.end()};
}

Manifest parse_manifest(std::istream& in, const fs::path& root) {
  Manifest m;
  m.root = root;
  std::string line;
  int line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string t; words >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    const bool count_header =
        first_content && tokens.size() == 1 &&
        std::all_of(tokens[0].begin(), tokens[0].end(), [](unsigned char c) { return std::isdigit(c); });
    first_content = false;
    if (count_header) continue;
    if (tokens.size() < 2 || tokens.size() > 3)
      throw DataError(fmt::format("manifest line {}: expected 'path label [group]'", line_no));
    ManifestEntry e;
    e.path = fs::path(tokens[0]).lexically_normal();
    if (e.path.is_absolute() || (!e.path.empty() && *e.path.begin() == ".."))
      throw DataError(fmt::format("manifest line {}: path '{}' escapes the root", line_no, tokens[0]));
    try {
      std::size_t used = 0;
      e.label = std::stoi(tokens[1], &used);
      if (used != tokens[1].size()) throw std::invalid_argument(tokens[1]);
    } catch (const std::exception&) {
      throw DataError(fmt::format("manifest line {}: label '{}' is not an integer", line_no, tokens[1]));
    }
    if (tokens.size() == 3) e.group = tokens[2];
    m.entries.push_back(std::move(e));
  }
  return m;
}

Manifest load_manifest(const fs::path& file, const fs::path& root) {
  std::ifstream in(file);
  if (!in) throw DataError("cannot open manifest '" + file.string() + "'");
  return parse_manifest(in, root.empty() ? file.parent_path() : root);
}

void write_manifest(std::ostream& out, const Manifest& m) {
  for (const auto& e : m.entries) {
    out << e.path.generic_string() << ' ' << e.label;
    if (!e.group.empty()) out << ' ' << e.group;
    out << '\n';
  }
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::echo() const {
  return {{"descriptor", to_string(descriptor)},
          {"radius", fmt::format("{}", radius)},
          {"points", std::to_string(points)},
          {"mapping", to_string(mapping)},
          {"norm", to_string(normalization)},
          {"select", to_string(selection)},
          {"param", fmt::format("{}", parameter)},
          {"aggregation", aggregation == VarianceAggregation::mean ? "mean" : "max"},
          {"sigma", fmt::format("{}", extract.smoothing_sigma)},
          {"direction", extract.direction_from_comparator ? "comparator" : "intensity"},
          {"seed", std::to_string(seed)}};
}

std::vector<Descriptor> extract_manifest(const Manifest& m, const PipelineConfig& config) {
  std::vector<Descriptor> out(m.entries.size());
  parallel_for(m.entries.size(), resolve_threads(config.threads),
               [&](std::size_t i) { out[i] = extract_one(m.resolve(m.entries[i]), config); });
  return out;
}

FeatureMask learn_mask(const TrainingSet& training, const PipelineConfig& config) {
  switch (config.selection) {
    case SelectionMethod::none:
      training.validate();
      return identity_mask(training.descriptors.front());
    case SelectionMethod::top_n: {
      const double n = config.parameter;
      if (!(n >= 1.0) || n != std::floor(n) || n > 1 << 24)
        throw UsageError(fmt::format("top-N parameter must be a positive integer, got {}", n));
      return select_top_n(training, static_cast<int>(n));
    }
    case SelectionMethod::var_threshold:
      return select_by_variance(training, config.parameter, config.aggregation);
  }
  throw InvariantError("unknown selection method");
}

EvalReport evaluate_with_mask(const std::vector<Descriptor>& train, const std::vector<int>& train_labels,
                              const std::vector<Descriptor>& test, const std::vector<int>& test_labels,
                              const FeatureMask& mask, const PipelineConfig& config) {
  if (train.size() != train_labels.size() || test.size() != test_labels.size())
    throw InvariantError("descriptor and label counts differ");
  if (train.empty()) throw DataError("empty training gallery");
  const auto ids = intern(train_labels);
  for (int l : test_labels)
    if (!ids.contains(l))
      throw DataError(fmt::format("test label {} does not occur in the training manifest", l));

  const int threads = resolve_threads(config.threads);
  std::vector<std::vector<double>> gallery(train.size());
  std::vector<std::vector<double>> queries(test.size());
  parallel_for(train.size(), threads, [&](std::size_t i) { gallery[i] = apply_mask(train[i], mask).flattened(); });
  parallel_for(test.size(), threads, [&](std::size_t i) { queries[i] = apply_mask(test[i], mask).flattened(); });

  std::vector<std::size_t> nearest(test.size());
  parallel_for(test.size(), threads,
               [&](std::size_t i) { nearest[i] = nearest_index(queries[i], gallery); });

  EvalReport r;
  for (const auto& [label, id] : ids) r.class_labels.push_back(label);
  const std::size_t classes = ids.size();
  r.confusion.assign(classes, std::vector<int>(classes, 0));
  for (std::size_t i = 0; i < test.size(); ++i) {
    const int truth = ids.at(test_labels[i]);
    const int predicted = ids.at(train_labels[nearest[i]]);
    ++r.confusion[truth][predicted];
  }
  fill_rates(r);
  r.dimension = mask.dimension();
  r.train_count = train.size();
  r.test_count = test.size();
  r.config = config.echo();
  return r;
}

EvalReport evaluate_descriptors(const std::vector<Descriptor>& train, const std::vector<int>& train_labels,
                                const std::vector<Descriptor>& test, const std::vector<int>& test_labels,
                                const PipelineConfig& config) {
  const TrainingSet training{train, train_labels};
  const FeatureMask mask = learn_mask(training, config);
  return evaluate_with_mask(train, train_labels, test, test_labels, mask, config);
}

EvalReport run_protocol(const Manifest& train, const Manifest& test, const PipelineConfig& config) {
  if (train.entries.empty()) throw DataError("training manifest is empty");
  if (test.entries.empty()) throw DataError("test manifest is empty");
  const auto train_desc = extract_manifest(train, config);
  const auto test_desc = extract_manifest(test, config);
  return evaluate_descriptors(train_desc, labels_of(train.entries), test_desc, labels_of(test.entries),
                              config);
}

FoldChoice parse_fold_choice(std::string_view text) {
  if (text == "all" || text.empty()) return {FoldChoice::Kind::all, 0};
  if (text == "random") return {FoldChoice::Kind::random, 0};
  try {
    std::size_t used = 0;
    const int k = std::stoi(std::string(text), &used);
    if (used != text.size() || k < 0) throw std::invalid_argument("fold");
    return {FoldChoice::Kind::single, k};
  } catch (const std::exception&) {
    throw UsageError("fold must be 'all', 'random', or a non-negative index");
  }
}

EvalReport run_group_protocol(const Manifest& manifest, const PipelineConfig& config, FoldChoice fold) {
  if (manifest.entries.empty()) throw DataError("manifest is empty");
  std::map<int, std::vector<std::string>> groups;
  {
    std::map<int, std::set<std::string>> sets;
    for (const auto& e : manifest.entries) {
      if (e.group.empty())
        throw DataError("leave-samples-out protocol needs a group tag on every manifest line ('" +
                        e.path.string() + "' has none)");
      sets[e.label].insert(e.group);
    }
    for (auto& [label, s] : sets) {
      if (s.size() < 2)
        throw DataError(fmt::format("class {} has a single sample group; nothing to test on", label));
      groups[label] = {s.begin(), s.end()};
    }
  }
  std::size_t fold_count = 0;
  for (const auto& [label, g] : groups) fold_count = std::max(fold_count, g.size());

  // Per fold: training group name for every class.
  std::vector<std::map<int, std::string>> plans;
  if (fold.kind == FoldChoice::Kind::random) {
    std::mt19937_64 rng(config.seed);
    std::map<int, std::string> plan;
    for (const auto& [label, g] : groups) {
      std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
      plan[label] = g[pick(rng)];
    }
    plans.push_back(std::move(plan));
  } else {
    std::vector<std::size_t> indices;
    if (fold.kind == FoldChoice::Kind::single) {
      if (static_cast<std::size_t>(fold.index) >= fold_count)
        throw UsageError(fmt::format("fold {} out of range (0..{})", fold.index, fold_count - 1));
      indices.push_back(static_cast<std::size_t>(fold.index));
    } else {
      for (std::size_t k = 0; k < fold_count; ++k) indices.push_back(k);
    }
    for (std::size_t k : indices) {
      std::map<int, std::string> plan;
      for (const auto& [label, g] : groups) plan[label] = g[k % g.size()];
      plans.push_back(std::move(plan));
    }
  }

  const auto all = extract_manifest(manifest, config);
  EvalReport total;
  for (const auto& plan : plans) {
    std::vector<Descriptor> train, test;
    std::vector<int> train_labels, test_labels;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
      const auto& e = manifest.entries[i];
      if (plan.at(e.label) == e.group) {
        train.push_back(all[i]);
        train_labels.push_back(e.label);
      } else {
        test.push_back(all[i]);
        test_labels.push_back(e.label);
      }
    }
    EvalReport r = evaluate_descriptors(train, train_labels, test, test_labels, config);
    std::string groups_used;
    for (const auto& [label, g] : plan) groups_used += (groups_used.empty() ? "" : ";") + fmt::format("{}:{}", label, g);
    r.config.emplace_back("train_groups", groups_used);
    if (total.confusion.empty()) {
      total.class_labels = r.class_labels;
      total.confusion = r.confusion;
    } else {
      for (std::size_t a = 0; a < r.confusion.size(); ++a)
        for (std::size_t b = 0; b < r.confusion.size(); ++b) total.confusion[a][b] += r.confusion[a][b];
    }
    total.train_count += r.train_count;
    total.test_count += r.test_count;
    total.folds.push_back(std::move(r));
  }
  fill_rates(total);
  double mean = 0.0;
  double dim = 0.0;
  for (const auto& f : total.folds) {
    mean += f.accuracy;
    dim += static_cast<double>(f.dimension);
  }
  const double n = static_cast<double>(total.folds.size());
  mean /= n;
  double var = 0.0;
  for (const auto& f : total.folds) var += (f.accuracy - mean) * (f.accuracy - mean);
  total.fold_mean_accuracy = mean;
  total.fold_accuracy_std = std::sqrt(var / n);
  total.dimension = static_cast<std::size_t>(std::llround(dim / n));
  total.config = config.echo();
  total.config.emplace_back("protocol", "leave-samples-out");
  total.config.emplace_back("fold", fold.kind == FoldChoice::Kind::all      ? "all"
                                    : fold.kind == FoldChoice::Kind::random ? "random"
                                                                            : std::to_string(fold.index));
  return total;
}

std::vector<SweepRow> sweep(const std::vector<Descriptor>& train, const std::vector<int>& train_labels,
                            const std::vector<Descriptor>& validation,
                            const std::vector<int>& validation_labels, SelectionMethod method,
                            const std::vector<double>& grid, const PipelineConfig& config) {
  std::vector<SweepRow> rows;
  for (double p : grid) {
    PipelineConfig c = config;
    c.selection = method;
    c.parameter = p;
    const EvalReport r = evaluate_descriptors(train, train_labels, validation, validation_labels, c);
    rows.push_back({p, r.accuracy, r.dimension});
  }
  return rows;
}

void write_report_json(std::ostream& out, const EvalReport& report) {
  using json = nlohmann::ordered_json;
  const auto to_json = [](const EvalReport& r, auto&& self) -> json {
    json j;
    json cfg = json::object();
    for (const auto& [k, v] : r.config) cfg[k] = v;
    j["config"] = cfg;
    j["accuracy"] = r.accuracy;
    j["dimension"] = r.dimension;
    j["train_count"] = r.train_count;
    j["test_count"] = r.test_count;
    j["class_labels"] = r.class_labels;
    j["per_class_accuracy"] = r.per_class_accuracy;
    j["confusion"] = r.confusion;
    if (!r.folds.empty()) {
      j["fold_mean_accuracy"] = r.fold_mean_accuracy;
      j["fold_accuracy_std"] = r.fold_accuracy_std;
      json folds = json::array();
      for (const auto& f : r.folds) folds.push_back(self(f, self));
      j["folds"] = folds;
    }
    return j;
  };
  out << to_json(report, to_json).dump(2) << '\n';
}

void write_confusion_csv(std::ostream& out, const EvalReport& report) {
  out << echo_line(report.config) << '\n';
  out << "true\\predicted";
  for (int l : report.class_labels) out << ',' << l;
  out << '\n';
  for (std::size_t a = 0; a < report.confusion.size(); ++a) {
    out << report.class_labels[a];
    for (int v : report.confusion[a]) out << ',' << v;
    out << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, SelectionMethod method,
                     const PipelineConfig& config) {
  auto echo = config.echo();
  for (auto& [k, v] : echo)
    if (k == "select") v = to_string(method);
  std::erase_if(echo, [](const auto& kv) { return kv.first == "param"; });
  out << echo_line(echo) << '\n';
  out << "parameter,accuracy,dimension\n";
  for (const auto& r : rows) out << fmt::format("{},{},{}\n", r.parameter, r.accuracy, r.dimension);
}

}  // namespace aglbp
