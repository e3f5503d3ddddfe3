#include <doctest.h>

#include <cmath>
#include <random>

#include "aglbp/error.hpp"
#include "aglbp/gradient.hpp"
#include "aglbp/synthetic.hpp"

using namespace aglbp;
using synthetic::Quadratic;
using synthetic::polynomial_image;

namespace {

template <typename F>
void for_valid(const ScalarField& f, F&& fn) {
  for (int y = 0; y < f.height(); ++y)
    for (int x = 0; x < f.width(); ++x)
      if (f.valid(x, y)) fn(x, y);
}

}  // namespace

TEST_CASE("euclidean gradient") {
  SUBCASE("constant") {
    const auto g = gradient_fields(GrayImage(8, 8, 12.0));
    for_valid(g.eg, [&](int x, int y) { CHECK(g.eg.at(x, y) == 0.0); });
  }
  SUBCASE("ramp 3x+4y") {
    const auto g = gradient_fields(polynomial_image(9, 9, Quadratic{1, 3, 4, 0, 0, 0}));
    for_valid(g.eg, [&](int x, int y) { CHECK(g.eg.at(x, y) == 5.0); });
  }
  SUBCASE("unit ramp") {
    const auto g = gradient_fields(polynomial_image(6, 6, Quadratic{0, 1, 0, 0, 0, 0}));
    for_valid(g.eg, [&](int x, int y) { CHECK(g.eg.at(x, y) == 1.0); });
  }
  SUBCASE("scales linearly with contrast") {
    const auto img = synthetic::toroidal_texture(24, 2);
    std::vector<double> scaled(img.data().begin(), img.data().end());
    for (double& v : scaled) v *= 4.0;
    const auto a = gradient_fields(img);
    const auto b = gradient_fields(GrayImage(24, 24, scaled));
    for_valid(a.eg, [&](int x, int y) { CHECK(b.eg.at(x, y) == doctest::Approx(4.0 * a.eg.at(x, y))); });
  }
}

TEST_CASE("affine invariants on analytic surfaces") {
  SUBCASE("linear images have H = J = 0") {
    const auto g = gradient_fields(polynomial_image(9, 9, Quadratic{5, -2, 7, 0, 0, 0}));
    for_valid(g.h, [&](int x, int y) {
      CHECK(g.h.at(x, y) == 0.0);
      CHECK(g.j.at(x, y) == 0.0);
      CHECK(g.affg_prime.at(x, y) == 0.0);
    });
  }
  SUBCASE("x^2 + y^2 one pixel right of the origin") {
    const auto g = gradient_fields(polynomial_image(9, 9, Quadratic{0, 0, 0, 1, 0, 1}, 4, 4));
    CHECK(g.h.at(5, 4) == 4.0);
    CHECK(g.j.at(5, 4) == 8.0);
    CHECK(g.affg_prime.at(5, 4) == doctest::Approx(4.0 / std::sqrt(65.0)).epsilon(1e-15));
    CHECK(g.affg_prime.at(5, 4) == doctest::Approx(0.49614).epsilon(1e-5));
  }
  SUBCASE("xy at (2,3)") {
    const auto g = gradient_fields(polynomial_image(7, 7, Quadratic{0, 0, 0, 0, 1, 0}));
    CHECK(g.h.at(2, 3) == -1.0);
    CHECK(g.j.at(2, 3) == -12.0);
    CHECK(g.affg_prime.at(2, 3) == doctest::Approx(1.0 / std::sqrt(145.0)));
  }
  SUBCASE("x^2 ramp") {
    const auto g = gradient_fields(polynomial_image(9, 9, Quadratic{0, 0, 0, 1, 0, 0}));
    for_valid(g.h, [&](int x, int y) {
      CHECK(g.h.at(x, y) == 0.0);
      CHECK(g.j.at(x, y) == 0.0);  // Iy = 0 and Iyy = 0
    });
  }
  SUBCASE("random integer quadratics against the closed form") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> coef(-4, 4);
    for (int trial = 0; trial < 25; ++trial) {
      const Quadratic q{double(coef(rng)), double(coef(rng)), double(coef(rng)),
                        double(coef(rng)), double(coef(rng)), double(coef(rng))};
      const auto g = gradient_fields(polynomial_image(8, 8, q));
      for_valid(g.h, [&](int x, int y) {
        const double ix = q.b + 2 * q.d * x + q.e * y;
        const double iy = q.c + q.e * x + 2 * q.f * y;
        const double ixx = 2 * q.d, iyy = 2 * q.f, ixy = q.e;
        const double h = ixx * iyy - ixy * ixy;
        const double j = ixx * iy * iy - 2 * ix * iy * ixy + ix * ix * iyy;
        CHECK(g.h.at(x, y) == h);
        CHECK(g.j.at(x, y) == j);
        CHECK(g.eg.at(x, y) == doctest::Approx(std::hypot(ix, iy)).epsilon(1e-15));
        CHECK(g.affg_prime.at(x, y) == doctest::Approx(std::sqrt(h * h / (j * j + 1))).epsilon(1e-15));
      });
    }
  }
}

TEST_CASE("affine gradient forms") {
  ScalarField h(3, 1, 0, {0.0, 4.0, 1.0});
  ScalarField j(3, 1, 0, {0.0, 8.0, 0.0});
  const auto p = affine_gradient_prime(h, j);
  CHECK(p.at(0, 0) == 0.0);
  CHECK(p.at(1, 0) == doctest::Approx(std::sqrt(16.0 / 65.0)));
  CHECK(p.at(2, 0) == 1.0);
  const auto r = affine_gradient_ratio(h, j);
  CHECK(std::isnan(r.at(0, 0)));
  CHECK(r.at(1, 0) == 0.5);
  CHECK(std::isinf(r.at(2, 0)));
  CHECK_THROWS_AS(affine_gradient_prime(h, ScalarField(2, 1, 0)), ShapeError);
}

TEST_CASE("affine gradient is unchanged by intensity negation") {
  const auto img = synthetic::toroidal_texture(32, 9);
  std::vector<double> neg(img.data().begin(), img.data().end());
  for (double& v : neg) v = -v;
  const auto a = gradient_fields(img);
  const auto b = gradient_fields(GrayImage(32, 32, neg));
  for_valid(a.h, [&](int x, int y) {
    CHECK(b.h.at(x, y) == a.h.at(x, y));
    CHECK(b.j.at(x, y) == -a.j.at(x, y));
    CHECK(b.affg_prime.at(x, y) == a.affg_prime.at(x, y));
    CHECK(b.eg.at(x, y) == a.eg.at(x, y));
  });
}

TEST_CASE("contrast scaling of H, J and the raw ratio") {
  // Scaling by a power of two keeps every product exact: H goes as c^2, J as c^3, |H/J| as 1/c.
  const auto img = synthetic::toroidal_texture(24, 5);
  std::vector<double> scaled(img.data().begin(), img.data().end());
  for (double& v : scaled) v *= 2.0;
  const auto a = gradient_fields(img);
  const auto b = gradient_fields(GrayImage(24, 24, scaled));
  const auto ra = affine_gradient_ratio(a.h, a.j);
  const auto rb = affine_gradient_ratio(b.h, b.j);
  for_valid(a.h, [&](int x, int y) {
    CHECK(b.h.at(x, y) == 4.0 * a.h.at(x, y));
    CHECK(b.j.at(x, y) == 8.0 * a.j.at(x, y));
    if (std::isfinite(ra.at(x, y))) CHECK(rb.at(x, y) == 0.5 * ra.at(x, y));
  });
}

TEST_CASE("gradient magnitudes follow a quarter turn exactly") {
  const auto img = synthetic::toroidal_texture(20, 4);
  const auto rot = rotate90(img);
  const auto a = gradient_fields(img);
  const auto b = gradient_fields(rot);
  for_valid(a.eg, [&](int x, int y) {
    const int rx = y, ry = img.width() - 1 - x;
    CHECK(b.eg.at(rx, ry) == a.eg.at(x, y));
    CHECK(b.affg_prime.at(rx, ry) == a.affg_prime.at(x, y));
  });
}

TEST_CASE("valid region and margins") {
  const auto g = gradient_fields(GrayImage(5, 5, 1.0));
  CHECK(g.affg_prime.margin() == 1);
  CHECK(std::isnan(g.affg_prime.at(0, 0)));
  CHECK(g.affg_prime.at(2, 2) == 0.0);
}
