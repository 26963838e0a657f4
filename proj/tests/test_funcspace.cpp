#include <cmath>
#include <random>

#include <doctest.h>

#include "gnforge/funcspace.hpp"

using namespace gnforge;

namespace {

AnalyticFunction gauss1(double amp = 1.0, double c = 0.0, double a = 1.0) {
  return GaussianMix{1, {{amp, {c, 0.0}, a}}};
}

}  // namespace

TEST_CASE("grid geometry") {
  GridSpec g(1, 4.0, 16);
  CHECK(g.spacing() == 0.5);
  CHECK(g.center(0) == -3.75);
  CHECK(g.center(15) == 3.75);
  GridSpec g2(2, 4.0, 16);
  CHECK(g2.size() == 256);
  CHECK(g2.cell_measure() == 0.25);
  Point p = g2.point(1 * 16 + 2);
  CHECK(p[0] == -3.25);
  CHECK(p[1] == -2.75);
  CHECK_THROWS_AS(GridSpec(3, 1.0, 16), InvalidInput);
  CHECK_THROWS_AS(GridSpec(1, -1.0, 16), InvalidInput);
  CHECK_THROWS_AS(GridSpec(1, 1.0, 8), InvalidInput);
  CHECK_THROWS_AS(GridSpec(1, 1.0, 48), InvalidInput);
}

TEST_CASE("sample point values") {
  CHECK(gauss1()({0.0, 0.0}) == 1.0);
  CHECK(gauss1()({2.0, 0.0}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  AnalyticFunction ball = BallIndicator{1, 3.0, 1.0, {0.0, 0.0}};
  CHECK(ball({0.5, 0.0}) == 3.0);
  CHECK(ball({1.5, 0.0}) == 0.0);
  GridSpec g(1, 2.0, 16);
  SampledField s = sample(gauss1(), g);
  for (std::size_t k = 0; k < 16; ++k) {
    double x = g.center(k);
    CHECK(s.values[k] == doctest::Approx(std::exp(-x * x / 4.0)).epsilon(1e-15));
  }
}

TEST_CASE("dilation") {
  AnalyticFunction d = dilate(gauss1(), 2.0);
  CHECK(d.mix().terms[0].width == 0.25);
  AnalyticFunction b = dilate(AnalyticFunction(BallIndicator{1, 3.0, 1.0, {0.0, 0.0}}), 2.0);
  CHECK(b.ball().radius == 0.5);
  CHECK(b.ball().height == 3.0);

  GaussianMix m{1, {{1.3, {0.4, 0.0}, 0.7}, {-0.5, {-1.0, 0.0}, 1.9}}};
  GridSpec g(1, 6.0, 256);
  SampledField a = sample(dilate(dilate(m, 2.0), 0.5), g), b0 = sample(AnalyticFunction(m), g);
  for (std::size_t k = 0; k < g.size(); ++k) CHECK(a.values[k] == b0.values[k]);

  // sampling the dilate on g is sampling f on the scaled grid
  for (double lam : {0.5, 2.0, 4.0}) {
    SampledField lhs = sample(dilate(m, lam), g.scaled(1.0 / lam));
    SampledField rhs = sample(AnalyticFunction(m), g);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(lhs.values[k] == rhs.values[k]);
  }
}

TEST_CASE("derivatives against closed forms and finite differences") {
  AnalyticFunction f = gauss1();
  MultiIndex n0{{0, 0}, 1}, n1{{1, 0}, 1}, n2{{2, 0}, 1};
  CHECK(derivative(f, n0)({0.7, 0.0}) == f({0.7, 0.0}));
  CHECK(derivative(f, n1)({0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(derivative(f, n1)({2.0, 0.0}) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-14));
  CHECK(derivative(f, n2)({0.0, 0.0}) == doctest::Approx(-0.5).epsilon(1e-14));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-3.0, 3.0), W(0.1, 2.0), A(-2.0, 2.0);
  for (int dim : {1, 2}) {
    for (int trial = 0; trial < 100; ++trial) {
      GaussianMix g{dim, {}};
      for (int t = 0; t < 2; ++t) g.terms.push_back({A(rng), {U(rng), dim == 2 ? U(rng) : 0.0}, W(rng)});
      AnalyticFunction ff = g;
      Point x{U(rng), dim == 2 ? U(rng) : 0.0};
      for (int order = 1; order <= 2; ++order) {
        for (const MultiIndex& nu : multi_indices(dim, order)) {
          // central difference of the order-(r-1) derivative along the last nonzero axis
          int axis = nu.nu[1] > 0 ? 1 : 0;
          MultiIndex lower = nu;
          --lower.nu[axis];
          const double eps = 1e-5;
          Point xp = x, xm = x;
          xp[axis] += eps;
          xm[axis] -= eps;
          DerivativeEvaluator dl = derivative(ff, lower);
          double fd = (dl(xp) - dl(xm)) / (2 * eps);
          double ex = derivative(ff, nu)(x);
          double scale = std::max(std::abs(ex), 1e-3);
          CHECK(std::abs(fd - ex) / scale <= 1e-4);
        }
      }
    }
  }
}

TEST_CASE("hermite recurrence matches explicit polynomials") {
  for (double s : {-1.3, 0.0, 0.4, 2.2}) {
    CHECK(hermite(0, s) == 1.0);
    CHECK(hermite(1, s) == doctest::Approx(2 * s));
    CHECK(hermite(2, s) == doctest::Approx(4 * s * s - 2));
    CHECK(hermite(3, s) == doctest::Approx(8 * s * s * s - 12 * s));
  }
}

TEST_CASE("grad magnitude") {
  GridSpec g(1, 16.0, 16);  // centres -15, -13, ..., 15
  SampledField d1 = grad_magnitude_field(gauss1(), 1, g);
  CHECK(d1.values[9] == doctest::Approx(1.5 * std::exp(-9.0 / 4.0)).epsilon(1e-14));
  // e^{-1} at x = 2
  CHECK(derivative(gauss1(), MultiIndex{{1, 0}, 1})({2.0, 0.0}) == doctest::Approx(-std::exp(-1.0)));
  // |f''(0)| = 1/2; the gradient of the radial Gaussian vanishes at its centre
  GridSpec g0(1, 16.0, 16);
  SampledField d2 = grad_magnitude_field(gauss1(), 2, g0.scaled(1.0 / 2));  // centres at odd multiples of 1/2
  CHECK(derivative(gauss1(), MultiIndex{{2, 0}, 1})({0.0, 0.0}) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(d2.values[8] == doctest::Approx(std::abs(derivative(gauss1(), MultiIndex{{2, 0}, 1})({0.5, 0.0}))).epsilon(1e-14));
  AnalyticFunction r2 = GaussianMix{2, {{1.0, {0.0, 0.0}, 1.0}}};
  CHECK(derivative(r2, MultiIndex{{1, 0}, 2})({0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(derivative(r2, MultiIndex{{0, 1}, 2})({0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(multi_indices(2, 2).size() == 3);

  GaussianMix m{2, {{1.0, {0.3, -0.2}, 0.6}, {-0.7, {-1.0, 0.5}, 1.1}}};
  GridSpec gg(2, 5.0, 32);
  for (int r = 1; r <= 3; ++r) {
    SampledField s = grad_magnitude_field(m, r, gg);
    for (double v : s.values) CHECK(v >= 0.0);
  }
  AnalyticFunction ball = BallIndicator{1, 3.0, 1.0, {0.0, 0.0}};
  CHECK_THROWS_AS(grad_magnitude_field(ball, 1, g), UnsupportedDerivative);
  CHECK_THROWS_AS(derivative(ball, MultiIndex{{1, 0}, 1}), UnsupportedDerivative);
}

TEST_CASE("default grid leaves a negligible tail") {
  AnalyticFunction f = GaussianMix{1, {{1.0, {1.0, 0.0}, 2.0}}};
  double L = default_half_width(f);
  CHECK(L >= 1.0 + 10 * std::sqrt(4.0));
  // mass outside [-L, L): 2 sqrt(pi a) erfc((L - c)/(2 sqrt a)) on the far side dominates
  double tail = std::sqrt(M_PI * 2.0) * std::erfc((L - 1.0) / (2 * std::sqrt(2.0)));
  CHECK(tail / (2 * std::sqrt(M_PI * 2.0)) < 1e-10);
}

TEST_CASE("embed keeps values and spacing") {
  GridSpec g(2, 4.0, 16);
  SampledField f = sample(AnalyticFunction(GaussianMix{2, {{1.0, {0.2, 0.1}, 0.5}}}), g);
  SampledField e = embed(f, 4);
  CHECK(e.grid.spacing() == g.spacing());
  CHECK(e.grid.points_per_axis() == 64);
  CHECK(e.lp_norm(1.0) == doctest::Approx(f.lp_norm(1.0)).epsilon(1e-14));
  CHECK(e.max_abs() == f.max_abs());
}

TEST_CASE("json round trip") {
  AnalyticFunction f = GaussianMix{2, {{1.5, {0.2, -0.3}, 0.8}, {-0.25, {1.0, 1.0}, 2.0}}};
  nlohmann::json j = f;
  AnalyticFunction back = function_from_json(j);
  CHECK(back.mix().terms.size() == 2);
  CHECK(back({0.1, 0.4}) == f({0.1, 0.4}));
  AnalyticFunction b = function_from_json(nlohmann::json::parse(R"({"family":"ball","height":3,"radius":1,"center":[0]})"));
  CHECK(b.ball().height == 3.0);
  CHECK(b.dim() == 1);
  CHECK_THROWS_AS(function_from_json(nlohmann::json::parse(R"({"family":"spline"})")), UnsupportedFamily);
  CHECK_THROWS_AS(function_from_json(nlohmann::json::parse(R"({"family":"gaussian_mix","terms":[{"amp":1,"center":[0],"width":-1}]})")),
                  InvalidInput);
}
