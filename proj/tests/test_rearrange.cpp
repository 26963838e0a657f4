#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include <doctest.h>

#include "gnforge/rearrange.hpp"

using namespace gnforge;

namespace {

SampledField ball_field(std::size_t N) {
  return sample(AnalyticFunction(BallIndicator{1, 3.0, 1.0, {0.0, 0.0}}), GridSpec(1, 2.0, N));
}

SampledField narrow_gauss(std::size_t N) {  // e^{-x^2}
  return sample(AnalyticFunction(GaussianMix{1, {{1.0, {0.0, 0.0}, 0.25}}}), GridSpec(1, 6.0, N));
}

SampledField random_field(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> v(g.size());
  for (auto& x : v) x = U(rng) * std::abs(U(rng));
  return SampledField(g, std::move(v));
}

}  // namespace

TEST_CASE("profile invariants are enforced") {
  CHECK_THROWS_AS(StepProfile({1.0, 0.5}, {1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(StepProfile({1.0, 2.0}, {1.0, 2.0}), InvalidInput);
  CHECK_THROWS_AS(StepProfile({1.0}, {-1.0}), InvalidInput);
  StepProfile p({1.0, 2.0}, {3.0, 1.0});
  CHECK(p(1.0) == 3.0);  // left-continuous
  CHECK(p.right_limit(1.0) == 1.0);
  CHECK(p(2.5) == 0.0);
}

TEST_CASE("distribution of a ball indicator") {
  for (std::size_t N : {16, 64, 1024}) {
    StepProfile lam = distribution(ball_field(N));
    for (double y : {0.1, 1.0, 2.999}) CHECK(lam.right_limit(y) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lam.right_limit(3.0) == 0.0);
    CHECK(lam.right_limit(7.0) == 0.0);
  }
  SampledField zero(GridSpec(1, 1.0, 16));
  CHECK(distribution(zero).empty());
  CHECK(rearrangement(zero).empty());
}

TEST_CASE("distribution of e^{-x^2} against the closed form") {
  SampledField f = narrow_gauss(4096);
  StepProfile lam = distribution(f);
  const double dx = f.grid.spacing();
  double worst = 0.0;
  for (int i = 1; i < 200; ++i) {
    double y = i / 200.0;
    worst = std::max(worst, std::abs(lam.right_limit(y) - 2 * std::sqrt(std::log(1.0 / y))));
  }
  CHECK(worst <= 2 * dx);
}

TEST_CASE("rearrangement examples") {
  StepProfile fs = rearrangement(ball_field(64));
  CHECK(fs.size() == 1);
  CHECK(fs(1.0) == 3.0);
  CHECK(fs(2.0) == 3.0);
  CHECK(fs(2.0 + 1e-9) == 0.0);

  SampledField f = narrow_gauss(4096);
  StepProfile g = rearrangement(f);
  const double dx = f.grid.spacing(), lip = std::exp(-0.5) / std::sqrt(2.0);
  double worst = 0.0;
  for (double t = dx; t <= 5.0; t += dx / 3) worst = std::max(worst, std::abs(g(t) - std::exp(-t * t / 4)));
  CHECK(worst <= lip * dx);

  StepProfile neg = rearrangement(-1.0 * f);
  CHECK(neg.breakpoints() == g.breakpoints());
  CHECK(neg.values() == g.values());
}

TEST_CASE("double star examples") {
  AveragedProfile a = double_star(StepProfile({1.0}, {1.0}));
  CHECK(a(0.5) == 1.0);
  CHECK(a(1.0) == 1.0);
  CHECK(a(4.0) == 0.25);
  CHECK(double_star(StepProfile())(3.0) == 0.0);

  // f*(t) = e^{-t^2/4} from e^{-x^2}; oracle sqrt(pi) erf(1) / 2
  SampledField f = narrow_gauss(1 << 16);
  AveragedProfile ds = double_star(rearrangement(f));
  CHECK(ds(2.0) == doctest::Approx(std::sqrt(M_PI) * std::erf(1.0) / 2).epsilon(1e-4));
  CHECK(std::sqrt(M_PI) * std::erf(1.0) / 2 == doctest::Approx(0.746824).epsilon(1e-6));
}

TEST_CASE("hardy-littlewood supremum") {
  SampledField b = ball_field(64);
  const double dx = b.grid.spacing();
  CHECK(hardy_littlewood_sup(b, dx) == doctest::Approx(3 * dx).epsilon(1e-15));
  double total = 0.0;
  for (double v : b.values) total += std::abs(v) * dx;
  CHECK(hardy_littlewood_sup(b, 4.0) == doctest::Approx(total).epsilon(1e-14));
  CHECK(rearrangement(b).integral() == doctest::Approx(total).epsilon(1e-14));
  CHECK_THROWS_AS(hardy_littlewood_sup(b, 4.5), DomainExceeded);

  SampledField g = narrow_gauss(4096);
  AveragedProfile ds = double_star(rearrangement(g));
  CHECK(hardy_littlewood_sup(g, 1.0) == doctest::Approx(ds.integral_to(1.0)).epsilon(1e-12));
  for (double t : cell_aligned_times(g.grid, 40))
    CHECK(std::abs(hardy_littlewood_sup(g, t) - ds.integral_to(t)) <= 1e-12 * ds.integral_to(t));
}

TEST_CASE("identity suite on random fields") {
  std::mt19937_64 rng(11);
  GridSpec g(1, 3.0, 512);
  for (int trial = 0; trial < 10; ++trial) {
    SampledField f = random_field(g, rng), h = random_field(g, rng);
    StepProfile fs = rearrangement(f), hs = rearrangement(h), sum = rearrangement(f + h);
    StepProfile lam = distribution(f);
    // equimeasurability, including thresholds equal to sampled values
    std::uniform_real_distribution<double> Y(0.0, f.max_abs());
    for (int i = 0; i < 100; ++i) {
      double y = i % 2 ? Y(rng) : std::abs(f.values[rng() % f.values.size()]);
      std::size_t cnt = std::count_if(f.values.begin(), f.values.end(), [y](double v) { return std::abs(v) > y; });
      CHECK(fs.measure_above(y) == cnt * g.cell_measure());
      CHECK(lam.right_limit(y) == cnt * g.cell_measure());
    }
    double mass = 0.0;
    for (double v : f.values) mass += std::abs(v);
    mass *= g.cell_measure();
    CHECK(std::abs(fs.integral() - mass) <= 1e-12 * mass);

    for (std::size_t k = 1; 2 * k <= g.size(); ++k) {
      double t = k * g.cell_measure();
      CHECK(sum(2 * t) <= fs(t) + hs(t));
    }
    AveragedProfile a = double_star(fs), b = double_star(hs), c = double_star(sum);
    std::uniform_real_distribution<double> T(0.0, 2 * g.box_measure());
    double prev = kInf;
    std::vector<double> ts(50);
    for (auto& t : ts) t = T(rng);
    std::sort(ts.begin(), ts.end());
    for (double t : ts) {
      CHECK(c(t) <= (a(t) + b(t)) * (1 + 1e-14));
      CHECK(a(t) >= fs(t) * (1 - 1e-14));
      CHECK(a(t) <= prev * (1 + 1e-14));
      prev = a(t);
    }
  }
}

TEST_CASE("cell aligned times and csv") {
  GridSpec g(1, 2.0, 64);
  auto ts = cell_aligned_times(g, 20);
  CHECK(ts.front() == g.cell_measure());
  CHECK(ts.back() == doctest::Approx(g.box_measure()));
  for (double t : ts) CHECK(std::abs(t / g.cell_measure() - std::round(t / g.cell_measure())) < 1e-9);
  std::ostringstream os;
  write_csv(os, StepProfile({1.0, 2.0}, {3.0, 1.0}));
  CHECK(os.str() == "t,value\n1,3\n2,1\n");
}
