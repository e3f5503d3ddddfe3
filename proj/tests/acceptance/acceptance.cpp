// Acceptance checks. One line per criterion: PASS, FAIL, or SKIP (dataset
// criteria without data). Exit status is nonzero iff any criterion fails.
//
// Dataset criteria read these environment variables:
//   AGLBP_OUTEX10, AGLBP_OUTEX12_000, AGLBP_OUTEX12_001
//       directories holding train.txt and test.txt over converted PGM/PNG files
//   AGLBP_KTH_TIPS2
//       directory holding manifest.txt with "path label sample" lines
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aglbp/classify.hpp"
#include "aglbp/codes.hpp"
#include "aglbp/gradient.hpp"
#include "aglbp/mapping.hpp"
#include "aglbp/protocol.hpp"
#include "aglbp/synthetic.hpp"
#include "oracles.hpp"

using namespace aglbp;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string d) { return {Status::pass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::fail, std::move(d)}; }
Outcome skip(std::string d) { return {Status::skip, std::move(d)}; }

// ---------------------------------------------------------------------------

Outcome code_oracles() {
  for (std::uint32_t pattern = 0; pattern < 256; ++pattern) {
    std::vector<double> nb(8);
    for (int p = 0; p < 8; ++p) nb[p] = (pattern >> p) & 1 ? 100.0 + p : 99.5 - p;
    if (lbp_code(100.0, nb).value != oracle::naive_lbp(100.0, nb))
      return fail(fmt::format("lbp_code disagrees on sign pattern {}", pattern));
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 255.0);
  int checked = 0;
  while (checked < 10000) {
    const double c = u(rng);
    std::vector<double> g(8), v(8);
    for (double& x : g) x = u(rng);
    for (double& x : v) x = u(rng);
    std::vector<double> mag(8);
    for (int p = 0; p < 8; ++p) mag[p] = std::fabs(g[p] - c);
    if (std::count(mag.begin(), mag.end(), *std::max_element(mag.begin(), mag.end())) != 1) continue;
    const double vc = u(rng);
    if (ro_code(c, g, c, g).value != oracle::shift_search_ro(c, g, c, g) ||
        ro_code(c, g, vc, v).value != oracle::shift_search_ro(c, g, vc, v))
      return fail(fmt::format("ro_code disagrees with the shift-search oracle on vector {}", checked));
    ++checked;
  }
  return pass("256/256 sign patterns, 10000/10000 random vectors");
}

Outcome analytic_derivatives() {
  using synthetic::Quadratic;
  struct Case {
    const char* name;
    Quadratic q;
  };
  const std::vector<Case> cases{{"constant", {7, 0, 0, 0, 0, 0}},  {"ramp x", {0, 1, 0, 0, 0, 0}},
                                {"ramp 3x+4y", {2, 3, 4, 0, 0, 0}}, {"x^2", {0, 0, 0, 1, 0, 0}},
                                {"xy", {0, 0, 0, 0, 1, 0}},         {"x^2+y^2", {0, 0, 0, 1, 0, 1}},
                                {"mixed", {5, -2, 3, 0.5, -1.5, 2}}};
  const double ox = 6, oy = 5;
  std::size_t pixels = 0;
  for (const auto& [name, q] : cases) {
    const auto img = synthetic::polynomial_image(13, 11, q, ox, oy);
    const auto d = derivatives(img);
    const auto g = gradient_fields(d);
    for (int y = 1; y < 10; ++y)
      for (int x = 1; x < 12; ++x) {
        const double X = x - ox, Y = y - oy;
        const double ix = q.b + 2 * q.d * X + q.e * Y;
        const double iy = q.c + q.e * X + 2 * q.f * Y;
        const double ixx = 2 * q.d, iyy = 2 * q.f, ixy = q.e;
        const double h = ixx * iyy - ixy * ixy;
        const double j = ixx * iy * iy - 2 * ix * iy * ixy + ix * ix * iyy;
        const double ag = std::sqrt(h * h / (j * j + 1));
        const auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); };
        if (!close(d.ix.at(x, y), ix) || !close(d.iy.at(x, y), iy) || !close(d.ixx.at(x, y), ixx) ||
            !close(d.iyy.at(x, y), iyy) || !close(d.ixy.at(x, y), ixy) || !close(g.h.at(x, y), h) ||
            !close(g.j.at(x, y), j) || !close(g.affg_prime.at(x, y), ag) || !close(g.eg.at(x, y), std::hypot(ix, iy)))
          return fail(fmt::format("{} differs at ({}, {})", name, x, y));
        ++pixels;
      }
  }
  const auto g = gradient_fields(synthetic::polynomial_image(13, 11, {0, 0, 0, 1, 0, 1}, ox, oy));
  const int x = static_cast<int>(ox) + 1, y = static_cast<int>(oy);
  if (g.h.at(x, y) != 4.0 || g.j.at(x, y) != 8.0 || std::fabs(g.affg_prime.at(x, y) - 4.0 / std::sqrt(65.0)) > 1e-15)
    return fail("x^2+y^2 at offset (1,0) is not H=4, J=8, affG'=4/sqrt(65)");
  return pass(fmt::format("{} surfaces, {} pixels, x^2+y^2 at (1,0): H=4 J=8 affG'={:.5f}", cases.size(), pixels,
                          g.affg_prime.at(x, y)));
}

Outcome rotation_invariance() {
  const auto img = synthetic::toroidal_texture(128, 31);
  const auto rot = rotate90(img);
  std::size_t compared = 0;
  for (auto [r, p] : {std::pair{1.0, 8}, {3.0, 16}}) {
    const NeighborhoodSpec spec(r, p);
    for (auto name : {DescriptorName::rolbp, DescriptorName::rolagp, DescriptorName::aglbp}) {
      const auto a = extract(img, spec, name, MappingKind::ro, Normalization::count);
      const auto b = extract(rot, spec, name, MappingKind::ro, Normalization::count);
      if (a.flattened() != b.flattened())
        return fail(fmt::format("{} (R={}, P={}) histograms differ after a quarter turn", to_string(name), r, p));
      compared += a.dimension();
    }
  }
  return pass(fmt::format("roLBP, roLAGP, AGLBP at P=8 and P=16 identical ({} bins compared)", compared));
}

Outcome mapping_cardinalities() {
  std::vector<std::string> bad;
  const auto u2 = build_mapping(MappingKind::u2, 8).bin_count;
  const auto ri = build_mapping(MappingKind::ri, 8).bin_count;
  int uniform = 0;
  for (std::uint32_t c = 0; c < 256; ++c) uniform += oracle::circular_changes(c, 8) <= 2;
  if (u2 != 59 || u2 != uniform + 1) bad.push_back(fmt::format("u2(8)={}", u2));
  if (ri != 36 || ri != oracle::necklaces(8)) bad.push_back(fmt::format("ri(8)={}", ri));
  for (int p : {4, 8, 12, 16, 24})
    if (build_mapping(MappingKind::riu2, p).bin_count != p + 2) bad.push_back(fmt::format("riu2({})", p));
  if (!bad.empty()) return fail(fmt::format("wrong bin counts: {}", fmt::join(bad, ", ")));
  return pass("u2(8)=59, ri(8)=36, riu2(P)=P+2 for P in 4..24");
}

TrainingSet fixture_training(const fs::path& fixture, const PipelineConfig& c) {
  const auto m = load_manifest(fixture / "train.txt");
  std::vector<int> labels;
  for (const auto& e : m.entries) labels.push_back(e.label);
  return {extract_manifest(m, c), labels};
}

Outcome selection_laws(const fs::path& fixture) {
  PipelineConfig c;
  const auto t = fixture_training(fixture, c);
  const std::vector<double> grid{0.5, 1.0, 2.0, 4.0, 8.0};
  std::vector<FeatureMask> masks;
  for (double phi : grid) masks.push_back(select_by_variance(t, phi));
  for (std::size_t i = 1; i < masks.size(); ++i)
    for (std::size_t b = 0; b < masks[i].kept.size(); ++b)
      if (!std::includes(masks[i].kept[b].begin(), masks[i].kept[b].end(), masks[i - 1].kept[b].begin(),
                         masks[i - 1].kept[b].end()))
        return fail(fmt::format("mask at phi={} does not contain the mask at phi={}", grid[i], grid[i - 1]));

  for (double phi : grid) {
    std::ostringstream a, b;
    write_mask_csv(a, select_by_variance(fixture_training(fixture, c), phi));
    write_mask_csv(b, select_by_variance(t, phi));
    if (a.str() != b.str()) return fail(fmt::format("mask file at phi={} differs between runs", phi));
  }

  double worst = 0.0;
  for (const auto& m : masks)
    for (const auto& d : t.descriptors) {
      const auto masked = apply_mask(d, m);
      for (const auto& blk : masked.blocks) {
        double s = 0.0;
        for (double v : blk.bins) s += v;
        worst = std::max(worst, std::fabs(s - 100.0) / 100.0);
      }
    }
  if (worst > 1e-9) return fail(fmt::format("renormalization error {:.3g} exceeds 1e-9", worst));
  std::vector<std::size_t> dims;
  for (const auto& m : masks) dims.push_back(m.dimension());
  return pass(fmt::format("nested masks over phi {{{}}} (dims {}), byte-identical reruns, max renorm error {:.2g}",
                          fmt::join(grid, ","), fmt::join(dims, ","), worst));
}

Outcome classifier_laws(const fs::path& fixture) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  std::bernoulli_distribution zero(0.25);
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(64), b(64);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = zero(rng) ? 0.0 : u(rng);
      b[i] = zero(rng) ? 0.0 : u(rng);
    }
    const double ab = chi_square(a, b);
    if (chi_square(a, a) != 0.0 || chi_square(b, b) != 0.0 || ab != chi_square(b, a) || !(ab >= 0.0))
      return fail(fmt::format("chi-square law broken on pair {}", t));
  }
  Manifest all = load_manifest(fixture / "train.txt");
  for (const auto& e : load_manifest(fixture / "test.txt").entries) all.entries.push_back(e);
  const auto r = run_protocol(all, all, PipelineConfig{});
  if (r.accuracy != 100.0)
    return fail(fmt::format("self-retrieval accuracy {:.2f} on {} images", r.accuracy, all.entries.size()));
  return pass(fmt::format("1000 random pairs symmetric and zero on self; self-retrieval {:.2f}% on {} images",
                          r.accuracy, all.entries.size()));
}

Outcome synthetic_end_to_end(const fs::path& fixture) {
  const auto start = std::chrono::steady_clock::now();
  const auto train = load_manifest(fixture / "train.txt");
  const auto test = load_manifest(fixture / "test.txt");
  PipelineConfig c;  // AGLBP (1,8), ro mapping, percent, phi = 2
  const auto r = run_protocol(train, test, c);

  // Separation of the masked descriptors: mean inter-class over mean intra-class distance.
  std::vector<Descriptor> desc = extract_manifest(train, c);
  const auto more = extract_manifest(test, c);
  desc.insert(desc.end(), more.begin(), more.end());
  std::vector<int> labels;
  for (const auto& e : train.entries) labels.push_back(e.label);
  for (const auto& e : test.entries) labels.push_back(e.label);
  std::vector<int> train_labels(labels.begin(), labels.begin() + train.entries.size());
  const auto mask = learn_mask(TrainingSet{{desc.begin(), desc.begin() + train.entries.size()}, train_labels}, c);
  std::vector<std::vector<double>> masked;
  for (const auto& d : desc) masked.push_back(apply_mask(d, mask).flattened());
  double intra = 0, inter = 0;
  int n_intra = 0, n_inter = 0;
  for (std::size_t i = 0; i < masked.size(); ++i)
    for (std::size_t j = i + 1; j < masked.size(); ++j) {
      const double d = chi_square(masked[i], masked[j]);
      if (labels[i] == labels[j]) {
        intra += d;
        ++n_intra;
      } else {
        inter += d;
        ++n_inter;
      }
    }
  const double ratio = (inter / n_inter) / (intra / n_intra);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const std::string detail = fmt::format("accuracy {:.2f}% ({} train / {} test), inter/intra chi-square {:.2f}, {:.2f} s",
                                         r.accuracy, r.train_count, r.test_count, ratio, seconds);
  if (r.accuracy != 100.0 || ratio < 5.0 || seconds > 30.0) return fail(detail);
  return pass(detail);
}

// ---------------------------------------------------------------------------
// Dataset-conditional criteria.

std::optional<fs::path> env_dir(const char* name) {
  const char* v = std::getenv(name);
  if (!v || !*v) return std::nullopt;
  return fs::path(v);
}

PipelineConfig benchmark_config(DescriptorName name, double r, int p) {
  PipelineConfig c;
  c.descriptor = name;
  c.radius = r;
  c.points = p;
  c.mapping = default_mapping(name);
  return c;
}

double split_accuracy(const fs::path& dir, const PipelineConfig& c) {
  return run_protocol(load_manifest(dir / "train.txt"), load_manifest(dir / "test.txt"), c).accuracy;
}

Outcome benchmark_reproduction() {
  struct Target {
    const char* label;
    const char* env;
    double expected;
  };
  const std::vector<Target> splits{{"Outex10", "AGLBP_OUTEX10", 99.22},
                                   {"Outex12-000", "AGLBP_OUTEX12_000", 97.84},
                                   {"Outex12-001", "AGLBP_OUTEX12_001", 97.38}};
  std::vector<std::string> parts, missing;
  bool ok = true;
  const auto check = [&](const std::string& label, double got, double expected) {
    const bool within = std::fabs(got - expected) <= 2.0;
    ok = ok && within;
    parts.push_back(fmt::format("{} {:.2f} (expected {:.2f}{})", label, got, expected, within ? "" : ", off by > 2"));
  };
  const auto cfg = benchmark_config(DescriptorName::aglbp, 3, 16);
  for (const auto& t : splits) {
    const auto dir = env_dir(t.env);
    if (!dir) {
      missing.push_back(t.env);
      continue;
    }
    check(t.label, split_accuracy(*dir, cfg), t.expected);
  }
  if (const auto kth = env_dir("AGLBP_KTH_TIPS2")) {
    const auto r = run_group_protocol(load_manifest(*kth / "manifest.txt"), cfg);
    check("KTH-TIPS2", r.accuracy, 97.12);
  } else {
    missing.push_back("AGLBP_KTH_TIPS2");
  }

  const auto o000 = env_dir("AGLBP_OUTEX12_000");
  const auto o001 = env_dir("AGLBP_OUTEX12_001");
  if (o000 && o001) {
    const auto mi = [&](DescriptorName name) {
      PipelineConfig c = benchmark_config(name, 1, 8);
      c.mapping = MappingKind::ri;
      c.selection = SelectionMethod::none;
      return (split_accuracy(*o000, c) + split_accuracy(*o001, c)) / 2.0;
    };
    const double ag = mi(DescriptorName::mi_ag), g = mi(DescriptorName::mi_g), lbp = mi(DescriptorName::lbp);
    const bool order = ag > g && g > lbp;
    ok = ok && order;
    parts.push_back(fmt::format("MI ri ordering MI-AG {:.2f} > MI-G {:.2f} > LBP {:.2f}: {}", ag, g, lbp,
                                order ? "holds" : "violated"));
  } else {
    missing.push_back("MI ordering needs both Outex12 problems");
  }

  if (parts.empty()) return skip("no dataset supplied (" + fmt::format("{}", fmt::join(missing, ", ")) + ")");
  std::string detail = fmt::format("{}", fmt::join(parts, "; "));
  if (!missing.empty()) detail += fmt::format("; not run: {}", fmt::join(missing, ", "));
  return ok ? pass(detail) : fail(detail);
}

Outcome sweep_shape() {
  const auto dir = env_dir("AGLBP_OUTEX12_000");
  if (!dir) return skip("AGLBP_OUTEX12_000 not set");
  // Validation inside the training data: train on the even-indexed training
  // images and validate on the odd-indexed ones.
  const auto train = load_manifest(*dir / "train.txt");
  Manifest fit = train, held = train;
  fit.entries.clear();
  held.entries.clear();
  for (std::size_t i = 0; i < train.entries.size(); ++i) (i % 2 ? held : fit).entries.push_back(train.entries[i]);
  const auto cfg = benchmark_config(DescriptorName::aglbp, 1, 8);
  const auto fd = extract_manifest(fit, cfg);
  const auto hd = extract_manifest(held, cfg);
  std::vector<int> fl, hl;
  for (const auto& e : fit.entries) fl.push_back(e.label);
  for (const auto& e : held.entries) hl.push_back(e.label);
  const std::vector<double> grid{0.4, 0.8, 1.2, 1.6, 1.8, 2.0, 2.4, 3.0, 4.0, 6.0};
  const auto rows = sweep(fd, fl, hd, hl, SelectionMethod::var_threshold, grid, cfg);
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].accuracy > rows[best].accuracy) best = i;
  std::vector<std::string> curve;
  for (const auto& r : rows) curve.push_back(fmt::format("{}:{:.2f}", r.parameter, r.accuracy));
  const bool in_band = rows[best].parameter >= 1.6 && rows[best].parameter <= 2.0;
  // Soft check: report only.
  return pass(fmt::format("peak at phi={} ({}) [{}]", rows[best].parameter,
                          in_band ? "inside the 1.6-2.0 band" : "outside the 1.6-2.0 band, reported only",
                          fmt::join(curve, " ")));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path fixture = argc > 1 ? fs::path(argv[1]) : fs::path(AGLBP_FIXTURE_DIR) / "two_class";
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exhaustive code oracle", code_oracles},
      {"analytic derivative and invariant fixtures", analytic_derivatives},
      {"rotation invariance", rotation_invariance},
      {"mapping cardinalities", mapping_cardinalities},
      {"feature-selection laws", [&] { return selection_laws(fixture); }},
      {"classifier laws", [&] { return classifier_laws(fixture); }},
      {"synthetic end-to-end", [&] { return synthetic_end_to_end(fixture); }},
      {"benchmark reproduction (dataset)", benchmark_reproduction},
      {"sweep curve shape (dataset, soft)", sweep_shape},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
    failures += o.status == Status::fail;
    fmt::print("[{}] {}. {}: {}\n", tag, i + 1, criteria[i].first, o.detail);
  }
  fmt::print("{} of {} criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
