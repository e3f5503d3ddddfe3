#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "aglbp/descriptor.hpp"
#include "aglbp/error.hpp"
#include "aglbp/synthetic.hpp"
#include "oracles.hpp"

using namespace aglbp;

namespace {

GrayImage sinusoid(int size, double angle, double period) {
  std::vector<double> v(static_cast<std::size_t>(size) * size);
  const double kx = std::cos(angle), ky = std::sin(angle);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      v[static_cast<std::size_t>(y) * size + x] =
          127.5 + 100.0 * std::sin(2.0 * std::numbers::pi * (kx * x + ky * y) / period) + 0.37 * x;
  return GrayImage(size, size, std::move(v));
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("block layout") {
  CHECK(block_sources(DescriptorName::aglbp) == std::vector{PatternSource::rolbp, PatternSource::rolagp});
  CHECK(block_sources(DescriptorName::mi_g) == std::vector{PatternSource::lgp, PatternSource::lbp});
  CHECK(block_sources(DescriptorName::mi_ag) == std::vector{PatternSource::lagp, PatternSource::lbp});
  CHECK(default_mapping(DescriptorName::rolbp) == MappingKind::ro);
  CHECK(default_mapping(DescriptorName::lbp) == MappingKind::original);
  CHECK(parse_descriptor_name("aglbp") == DescriptorName::aglbp);
  CHECK(parse_descriptor_name("MI-AG") == DescriptorName::mi_ag);
  CHECK_THROWS_AS(parse_descriptor_name("lbp-hf"), UsageError);
}

TEST_CASE("constant image") {
  const GrayImage img(16, 16, 90.0);
  const auto d = extract(img, NeighborhoodSpec(1, 8), DescriptorName::lbp, MappingKind::original,
                         Normalization::unit_sum);
  REQUIRE(d.blocks.size() == 1);
  CHECK(d.blocks[0].bins.size() == 256);
  CHECK(d.blocks[0].bins[255] == 1.0);
  CHECK(sum(d.blocks[0].bins) == 1.0);

  const auto p = extract(img, NeighborhoodSpec(1, 8), DescriptorName::aglbp, MappingKind::ro,
                         Normalization::percent);
  CHECK(p.blocks[0].bins[255] == 100.0);
  CHECK(p.blocks[1].bins[255] == 100.0);
}

TEST_CASE("AGLBP block lengths before selection") {
  const auto img = synthetic::grating(40, 2);
  for (auto [r, n] : {std::pair{1.0, 8}, {2.0, 12}}) {
    const auto d = extract(img, NeighborhoodSpec(r, n), DescriptorName::aglbp, MappingKind::ro,
                           Normalization::percent);
    CHECK(d.block_sizes() == std::vector<std::size_t>{1u << n, 1u << n});
    CHECK(d.dimension() == 2u << n);
    CHECK(d.flattened().size() == d.dimension());
  }
  const auto u2 = extract(img, NeighborhoodSpec(1, 8), DescriptorName::mi_ag, MappingKind::u2,
                          Normalization::percent);
  CHECK(u2.block_sizes() == std::vector<std::size_t>{59, 59});
}

TEST_CASE("extract matches the per-pixel brute-force loop") {
  for (auto [r, n] : {std::pair{1.0, 8}, {2.0, 8}, {1.5, 8}}) {
    const auto img = sinusoid(64, 0.3, 7.3);
    const NeighborhoodSpec spec(r, n);
    const auto want = oracle::brute_force_counts(img, r, n);
    const auto lbp = extract(img, spec, DescriptorName::lbp, MappingKind::original, Normalization::count);
    const auto ag = extract(img, spec, DescriptorName::aglbp, MappingKind::ro, Normalization::count);
    CHECK(lbp.blocks[0].bins == want.lbp);
    CHECK(ag.blocks[0].bins == want.rolbp);
    CHECK(ag.blocks[1].bins == want.rolagp);
    const int side = 64 - 2 * spec.pipeline_margin();
    CHECK(sum(ag.blocks[1].bins) == side * side);
  }
}

TEST_CASE("normalizations") {
  const auto img = synthetic::grating(32, 4);
  const NeighborhoodSpec spec(1, 8);
  const auto c = extract(img, spec, DescriptorName::mi_g, MappingKind::riu2, Normalization::count);
  const auto u = extract(img, spec, DescriptorName::mi_g, MappingKind::riu2, Normalization::unit_sum);
  const auto p = extract(img, spec, DescriptorName::mi_g, MappingKind::riu2, Normalization::percent);
  for (std::size_t b = 0; b < 2; ++b) {
    CHECK(sum(u.blocks[b].bins) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sum(p.blocks[b].bins) == doctest::Approx(100.0).epsilon(1e-12));
    const double total = sum(c.blocks[b].bins);
    for (std::size_t i = 0; i < c.blocks[b].bins.size(); ++i)
      CHECK(p.blocks[b].bins[i] == doctest::Approx(100.0 * c.blocks[b].bins[i] / total));
  }
  std::vector<double> zero(4, 0.0);
  normalize(zero, Normalization::percent);
  CHECK(zero == std::vector<double>(4, 0.0));
}

TEST_CASE("rotation-aligned histograms are unchanged by a quarter turn") {
  const auto img = synthetic::toroidal_texture(64, 12);
  const auto rot = rotate90(img);
  for (auto [r, n] : {std::pair{1.0, 8}, {3.0, 16}, {2.0, 12}})
    for (auto name : {DescriptorName::rolbp, DescriptorName::rolagp, DescriptorName::aglbp}) {
      const NeighborhoodSpec spec(r, n);
      const auto a = extract(img, spec, name, MappingKind::ro, Normalization::count);
      const auto b = extract(rot, spec, name, MappingKind::ro, Normalization::count);
      for (std::size_t k = 0; k < a.blocks.size(); ++k) CHECK(a.blocks[k].bins == b.blocks[k].bins);
    }
}

TEST_CASE("too small images fail") {
  CHECK_THROWS_AS(extract(GrayImage(6, 6, 1.0), NeighborhoodSpec(1, 8), DescriptorName::lbp,
                          MappingKind::original, Normalization::percent),
                  DimensionError);
  CHECK_NOTHROW(extract(GrayImage(7, 7, 1.0), NeighborhoodSpec(1, 8), DescriptorName::lbp,
                        MappingKind::original, Normalization::percent));
}

TEST_CASE("pre-smoothing and comparator-driven direction are opt-in") {
  const auto img = synthetic::grating(40, 8);
  const NeighborhoodSpec spec(1, 8);
  const auto plain = extract(img, spec, DescriptorName::aglbp, MappingKind::ro, Normalization::count);
  const auto same = extract(img, spec, DescriptorName::aglbp, MappingKind::ro, Normalization::count, {});
  CHECK(plain.flattened() == same.flattened());
  ExtractOptions alt;
  alt.direction_from_comparator = true;
  const auto other = extract(img, spec, DescriptorName::aglbp, MappingKind::ro, Normalization::count, alt);
  CHECK(other.blocks[0].bins == plain.blocks[0].bins);
  CHECK(other.blocks[1].bins != plain.blocks[1].bins);
  CHECK(sum(other.blocks[1].bins) == sum(plain.blocks[1].bins));
}

TEST_CASE("CSV and binary round trips") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 20; ++t) {
    Descriptor d;
    d.name = DescriptorName::mi_ag;
    d.radius = 2.0;
    d.points = 12;
    d.mapping = MappingKind::u2;
    d.normalization = Normalization::unit_sum;
    for (int b = 0; b < 2; ++b) {
      PatternHistogram h;
      h.mapping = d.mapping;
      h.normalization = d.normalization;
      h.source = block_sources(d.name)[b];
      for (int i = 0; i < 133; ++i) h.bins.push_back(u(rng) * std::pow(10.0, (t % 7) - 3));
      d.blocks.push_back(h);
    }
    std::stringstream csv;
    write_descriptor_csv(csv, d);
    const auto back = read_descriptor_csv(csv);
    CHECK(back.name == d.name);
    CHECK(back.radius == d.radius);
    CHECK(back.points == d.points);
    CHECK(back.mapping == d.mapping);
    CHECK(back.normalization == d.normalization);
    CHECK(back.block_sizes() == d.block_sizes());
    CHECK(back.flattened() == d.flattened());

    std::stringstream bin;
    write_descriptor_binary(bin, d);
    const auto blocks = read_blocks_binary(bin);
    const auto rebuilt = descriptor_from_blocks(blocks, d.name, d.radius, d.points, d.mapping, d.normalization);
    CHECK(rebuilt.flattened() == d.flattened());
    CHECK(rebuilt.blocks[1].source == PatternSource::lbp);
  }
}

TEST_CASE("binary layout") {
  std::stringstream s;
  write_blocks_binary(s, {{1.0}, {2.0, 3.0}});
  const std::string bytes = s.str();
  REQUIRE(bytes.size() == 4 + 1 + 4 + 8 + 24);
  CHECK(bytes.substr(0, 4) == "AGLB");
  CHECK(bytes[4] == 1);
  CHECK(bytes[5] == 2);  // little-endian block count
  CHECK(bytes[9] == 1);
  CHECK(bytes[13] == 2);
  std::stringstream bad(std::string("AGLX") + bytes.substr(4));
  CHECK_THROWS_AS(read_blocks_binary(bad), DataError);
  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(read_blocks_binary(truncated), DataError);
}
