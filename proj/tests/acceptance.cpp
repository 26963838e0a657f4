// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gnforge/funcspace.hpp"
#include "gnforge/heat.hpp"
#include "gnforge/lemma_kit.hpp"
#include "gnforge/logquad.hpp"
#include "gnforge/lorentz.hpp"
#include "gnforge/rearrange.hpp"
#include "gnforge/smoothnorms.hpp"
#include "gnforge/verifier.hpp"

using namespace gnforge;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// closed-form P_h of a mixture: width w -> w + h, amplitude (w/(w+h))^{n/2}
double heat_oracle(const GaussianMix& f, double h, const Point& x) {
  double v = 0.0;
  for (const auto& t : f.terms) {
    double r2 = 0.0;
    for (int d = 0; d < f.dim; ++d) r2 += (x[d] - t.center[d]) * (x[d] - t.center[d]);
    double w = t.width + h;
    v += t.amp * std::pow(t.width / w, 0.5 * f.dim) * std::exp(-r2 / (4.0 * w));
  }
  return v;
}

SampledField random_field(const GridSpec& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  std::vector<double> v(g.size());
  int mode = static_cast<int>(rng() % 3);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double x = g.point(i)[0];
    if (mode == 0) v[i] = U(rng);
    else if (mode == 1) v[i] = std::round(4 * U(rng)) * std::exp(-x * x);  // many ties
    else v[i] = std::exp(-x * x / (0.1 + std::abs(U(rng)))) * (U(rng) < 0 ? -1 : 1);
  }
  return SampledField(g, std::move(v));
}

double rel_l2(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

// 1 ---------------------------------------------------------------------------

Outcome rearrangement_suite() {
  Outcome o;
  auto t0 = Clock::now();
  GridSpec g(1, 10.0, 4096);
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    SampledField f = random_field(g, rng), h = random_field(g, rng);
    StepProfile fs = rearrangement(f), hs = rearrangement(h);
    StepProfile lam = distribution(f);
    const double dx = g.cell_measure();
    double mx = 0.0, mass = 0.0;
    for (double v : f.values) {
      mx = std::max(mx, std::abs(v));
      mass += std::abs(v) * dx;
    }
    for (int k = 0; k < 100; ++k) {
      double y = mx * k / 100.0;
      std::size_t cnt = 0;
      for (double v : f.values) cnt += std::abs(v) > y;
      double exact = static_cast<double>(cnt) * dx;
      o.require(std::abs(fs.measure_above(y) - exact) <= 1e-14 * (exact + dx),
                fmt("equimeasurability off at y=%g", y));
      o.require(std::abs(lam.right_limit(y) - exact) <= 1e-14 * (exact + dx), fmt("distribution off at y=%g", y));
    }
    o.require(std::abs(fs.integral() - mass) <= 1e-12 * mass, "mass not preserved");
    SampledField sum = f + h;
    StepProfile ss = rearrangement(sum);
    AveragedProfile fss = double_star(fs), hss = double_star(hs), sss = double_star(ss);
    for (int k = 0; k < 50; ++k) {
      double t = g.box_measure() * 0.5 * U(rng);
      o.require(ss(2 * t) <= (fs(t) + hs(t)) * (1 + 1e-12), fmt("(f+g)*(2t) > f*(t)+g*(t) at t=%g", t));
      o.require(sss(t) <= (fss(t) + hss(t)) * (1 + 1e-12), fmt("f** not subadditive at t=%g", t));
    }
  }
  double secs = seconds_since(t0);
  o.require(secs < 10.0, fmt("took %.1f s", secs));
  if (o.pass) o.detail = fmt("10 field pairs, %.2f s", secs);
  return o;
}

// 2 ---------------------------------------------------------------------------

Outcome lorentz_two_forms() {
  Outcome o;
  GridSpec g(1, 8.0, 1024);
  std::mt19937_64 rng(202);
  const std::pair<double, double> idx[] = {{1, 1}, {2, 1}, {2, 4}, {3, 6}, {1.5, 2}, {4, 0.5}};
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    SampledField f = random_field(g, rng);
    StepProfile fs = rearrangement(f), lam = distribution(f);
    for (auto [p, r] : idx) {
      LorentzIndex li(p, r);
      double a = lorentz_norm(fs, li), b = lorentz_norm_via_distribution(lam, li);
      double d = std::abs(a - b) / std::max(a, b);
      worst = std::max(worst, d);
      o.require(d <= 1e-10, fmt("p=%g r=%g rel diff %.3e", p, r, d));
    }
  }
  if (o.pass) o.detail = fmt("max rel diff %.2e over 120 pairs", worst);
  return o;
}

// 3 ---------------------------------------------------------------------------

Outcome heat_suite() {
  Outcome o;
  const GaussianMix mix{1, {{1.0, {0.3, 0.0}, 0.5}, {-0.4, {-1.0, 0.0}, 0.2}}};
  GridSpec g(1, 20.0, 4096);
  SampledField f = sample(AnalyticFunction(mix), g);
  auto interior = [&](std::size_t i) { return std::abs(g.point(i)[0]) <= 5.0; };
  double worst_lin = 0.0, worst_sg = 0.0, worst_fd = 0.0;
  for (double h : {1e-3, 0.1, 1.0}) {
    SampledField p = heat::apply(f, h);
    double mx = 0.0, err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!interior(i)) continue;
      double ex = heat_oracle(mix, h, g.point(i));
      mx = std::max(mx, std::abs(ex));
      err = std::max(err, std::abs(p.values[i] - ex));
    }
    worst_lin = std::max(worst_lin, err / mx);
    o.require(err <= 1e-6 * mx, fmt("P_h closed form off at h=%g: %.2e", h, err / mx));
  }
  for (auto [a, b] : {std::pair{0.1, 0.4}, {0.5, 1.5}}) {
    SampledField two = heat::apply(heat::apply(f, a), b), one = heat::apply(f, a + b);
    double mx = 0.0, err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!interior(i)) continue;
      mx = std::max(mx, std::abs(one.values[i]));
      err = std::max(err, std::abs(two.values[i] - one.values[i]));
    }
    worst_sg = std::max(worst_sg, err / mx);
    o.require(err <= 1e-6 * mx, fmt("semigroup off: %.2e", err / mx));
  }
  for (double h : {0.1, 1.0}) {
    for (int m : {1, 2}) {
      SampledField d = heat::dh_m(f, h, m);
      std::vector<double> fd(g.size());
      if (m == 1) {
        double e = 1e-3 * h;
        SampledField up = heat::apply(f, h + e), dn = heat::apply(f, h - e);
        for (std::size_t i = 0; i < g.size(); ++i) fd[i] = (up.values[i] - dn.values[i]) / (2 * e);
      } else {
        double e = 1e-2 * h;
        SampledField up = heat::apply(f, h + e), mid = heat::apply(f, h), dn = heat::apply(f, h - e);
        for (std::size_t i = 0; i < g.size(); ++i)
          fd[i] = (up.values[i] - 2 * mid.values[i] + dn.values[i]) / (e * e);
      }
      double r = rel_l2(d.values, fd);
      worst_fd = std::max(worst_fd, r);
      o.require(r <= 1e-4, fmt("dh_%g vs finite differences at h=%g: %.2e", m, h, r));
    }
  }
  if (o.pass) o.detail = fmt("P_h %.1e, semigroup %.1e, dh_m %.1e", worst_lin, worst_sg, worst_fd);
  return o;
}

// 4 ---------------------------------------------------------------------------

Outcome reconstruct_suite() {
  Outcome o;
  auto t0 = Clock::now();
  GridSpec g(1, 24.0, 4096);
  double worst = 0.0;
  for (FamilyKind kind : {FamilyKind::positive, FamilyKind::balanced}) {
    for (const auto& mem : gaussian_family(kind, 1, 3, 404)) {
      SampledField f = sample(mem.f, g);
      for (int m : {1, 2}) {
        SampledField r = heat::reconstruct(f, m, 1e-4, 1e3, 200);
        double e = rel_l2(r.values, f.values);
        worst = std::max(worst, e);
        o.require(e <= 1e-3, mem.id + fmt(" m=%g rel L2 %.2e", m, e));
      }
    }
  }
  double secs = seconds_since(t0);
  o.require(secs < 60.0, fmt("took %.1f s", secs));
  if (o.pass) o.detail = fmt("max rel L2 %.2e, %.1f s", worst, secs);
  return o;
}

// 5 ---------------------------------------------------------------------------

double c_n_quadrature(int n) {
  // 2 pi^{-n/2} |S^{n-1}| integral r^n e^{-r^2} dr, composite Simpson on [0, 12]
  const int N = 100000;
  const double R = 12.0, dr = R / N;
  double s = 0.0;
  for (int i = 0; i <= N; ++i) {
    double r = i * dr, w = (i == 0 || i == N) ? 1 : (i % 2 ? 4 : 2);
    s += w * std::pow(r, n) * std::exp(-r * r);
  }
  s *= dr / 3;
  return 2 * std::pow(M_PI, -0.5 * n) * (n == 1 ? 2.0 : 2 * M_PI) * s;
}

Outcome pseudo_poincare_suite() {
  Outcome o;
  const double c1 = 2 / std::sqrt(M_PI), c2 = std::sqrt(M_PI);
  o.require(std::abs(c_n_quadrature(1) - c1) <= 1e-10 * c1, "c_1 quadrature");
  o.require(std::abs(c_n_quadrature(2) - c2) <= 1e-10 * c2, "c_2 quadrature");
  o.require(std::abs(pseudo_poincare_constant(1) - c1) <= 1e-12 * c1, "c_1 closed form");
  o.require(std::abs(pseudo_poincare_constant(2) - c2) <= 1e-12 * c2, "c_2 closed form");
  double worst = 0.0;
  int cases = 0;
  for (int n : {1, 2}) {
    for (FamilyKind kind : {FamilyKind::positive, FamilyKind::balanced}) {
      for (const auto& mem : gaussian_family(kind, n, n == 1 ? 4 : 2, 505)) {
        double cmax = 0.0, amax = 0.0;
        for (const auto& t : mem.f.mix().terms) {
          cmax = std::max({cmax, std::abs(t.center[0]), std::abs(t.center[1])});
          amax = std::max(amax, t.width);
        }
        for (double h : {1e-2, 1e-1, 1.0}) {
          // box large enough to hold P_h f
          GridSpec g(n, cmax + 10 * std::sqrt(2 * (amax + h)), n == 1 ? 4096 : 256);
          PoincareResult p = pseudo_poincare(mem.f, h, g);
          double margin = p.max_ratio / p.c_n;
          worst = std::max(worst, margin);
          ++cases;
          o.require(margin <= 1 + 1e-2, mem.id + fmt(" n=%g h=%g margin %.4f", n, h, margin));
        }
      }
    }
  }
  if (o.pass) o.detail = fmt("c_1, c_2 by quadrature; max margin %.4f over %g cases", worst, cases);
  return o;
}

// 6 ---------------------------------------------------------------------------

Outcome smoothing_suite() {
  Outcome o;
  std::mt19937_64 rng(606);
  double worst = 0.0, worst_star = 0.0;
  for (int n : {1, 2}) {
    GridSpec g(n, 8.0, n == 1 ? 1024 : 64);
    for (int trial = 0; trial < 4; ++trial) {
      std::vector<double> v(g.size());
      std::uniform_real_distribution<double> U(-1.0, 1.0);
      for (std::size_t i = 0; i < v.size(); ++i) {
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) r2 += g.point(i)[d] * g.point(i)[d];
        v[i] = trial == 0 ? (i == g.size() / 2 ? 1.0 : 0.0) : U(rng) * std::exp(-r2);
      }
      SampledField f(g, std::move(v));
      for (double h : {1e-3, 1e-1, 1.0}) {
        for (double q : {1.0, 2.0, kInf}) {
          SmoothingResult s = smoothing_bound(f, h, q);
          double margin = s.lhs / s.rhs;
          worst = std::max(worst, margin);
          o.require(margin <= 1 + 1e-6, fmt("n=%g q=%g margin %.8f", n, q, margin));
        }
        StarComparison sc = smoothing_double_star(f, h);
        worst_star = std::max(worst_star, sc.max_ratio);
        o.require(sc.max_ratio <= 1 + 1e-12, fmt("(P_h f)** / f** = %.8f at h=%g", sc.max_ratio, h));
      }
    }
  }
  if (o.pass) o.detail = fmt("max margin %.6f, max (P_h f)**/f** %.6f", worst, worst_star);
  return o;
}

// 7 ---------------------------------------------------------------------------

Outcome majorize_suite() {
  Outcome o;
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst = 0.0;
  for (double delta : {0.1, 0.3, 1.0}) {
    const double r = std::exp2(-delta);
    for (int trial = 0; trial < 200; ++trial) {
      DiscreteSeq a;
      a.k_lo = static_cast<int>(rng() % 61) - 30;
      a.delta = delta;
      a.alpha.resize(1 + trial % 30);
      for (auto& x : a.alpha) x = U(rng) < 0.3 ? 0.0 : std::exp(8 * U(rng) - 4);
      a.alpha.front() = std::max(a.alpha.front(), 1e-3);
      MajorizedSeq m = seq_majorize(a);
      double total = 0.0;
      for (double x : a.alpha) total += x;
      double id = std::abs(m.sum() / (total / ((1 - r) * (1 - r))) - 1);
      worst = std::max(worst, id);
      o.require(id <= 1e-12, fmt("sum identity off by %.2e (delta %g)", id, delta));
      // (1) alpha_k <= beta_k
      for (int k = a.k_lo; k <= a.k_hi(); ++k) o.require(a.at(k) <= m.at(k), "beta below alpha");
      // (3) 2^{-delta} <= beta_{k+1}/beta_k <= 2^{delta}
      for (int k = m.k_lo - 3; k < m.k_hi() + 3; ++k) {
        double q = m.at(k + 1) / m.at(k);
        o.require(q >= r * (1 - 1e-14) && q <= (1 + 1e-14) / r, fmt("ratio %.6f outside band", q));
      }
      o.require(m.certificate.holds(), "certificate clause fails");
    }
  }
  if (o.pass) o.detail = fmt("600 sequences, sum identity within %.1e", worst);
  return o;
}

// 8 ---------------------------------------------------------------------------

Outcome envelope_suite() {
  Outcome o;
  std::mt19937_64 rng(808);
  std::vector<double> t = log_grid(1e-8, 1e8, 801);
  double worst = 0.0;
  int n = 0;
  for (EnvelopeClass cls : {EnvelopeClass::increasing, EnvelopeClass::decreasing}) {
    for (double q : {1.0, 2.0, kInf}) {
      for (int i = 0; i < 100; ++i) {
        std::uniform_real_distribution<double> G(0.3, 2.0), D(0.1, 1.5);
        EnvelopeProblem pr;
        pr.t = t;
        pr.gamma = G(rng);
        pr.delta = D(rng);
        pr.q = q;
        pr.cls = cls;
        pr.phi = random_envelope_input(t, pr.gamma, cls, rng);
        EnvelopeResult e = envelope(pr);
        ++n;
        o.require(e.certificate.holds(), "certificate clause fails");
        for (std::size_t k = 0; k < t.size(); ++k)
          o.require(pr.phi[k] <= e.phi_tilde[k] * (1 + 1e-12), "phi above its envelope");
        // t^{-delta} phi_tilde nonincreasing and t^{delta} phi_tilde nondecreasing
        for (std::size_t k = 0; k + 1 < t.size(); ++k) {
          double lo = std::pow(t[k + 1] / t[k], -pr.delta), a = e.phi_tilde[k], b = e.phi_tilde[k + 1];
          o.require(b >= lo * a * (1 - 1e-10) && b <= a / lo * (1 + 1e-10), "envelope regularity");
        }
        double expect_c = std::isinf(q) ? 1.0 : std::pow(2 * (1 + pr.gamma / pr.delta), 1 / q);
        o.require(std::abs(e.constant - expect_c) <= 1e-12 * expect_c, "constant");
        double ind = log_lq_norm(t, pr.phi, q);
        o.require(std::abs(ind - e.norm_phi) <= 1e-9 * ind, "norm of phi");
        double margin = e.norm_tilde / (e.constant * e.norm_phi);
        worst = std::max(worst, margin);
        o.require(margin <= 1 + 1e-9, fmt("norm bound margin %.6f", margin));
      }
    }
  }
  if (o.pass) o.detail = fmt("%g inputs, max norm margin %.4f", n, worst);
  return o;
}

// 9 ---------------------------------------------------------------------------

Outcome lemma_sets_suite() {
  Outcome o;
  std::mt19937_64 rng(909);
  GridSpec g(1, 8.0, 512);
  // disjoint sets: 1 <= q <= p < inf; overlapping sets: 1 < p <= q < inf
  const std::pair<double, double> dpq[] = {{1, 1}, {2, 1}, {2, 2}, {3, 1.5}, {4, 2}};
  const std::pair<double, double> opq[] = {{1.5, 1.5}, {2, 2}, {2, 3}, {1.2, 4}, {3, 5}};
  int nd = 0, no = 0;
  for (int i = 0; i < 200; ++i) {
    SampledField f = random_field(g, rng);
    auto [p, q] = dpq[i % 5];
    DisjointFamily fam = random_disjoint_family(g, rng, 2 + i % 7);
    LemmaCheck c = check_disjoint_lemma(f, fam, p, q);
    nd += c.holds;
    o.require(c.holds && c.lhs <= c.rhs * (1 + 1e-12), fmt("disjoint p=%g q=%g lhs/rhs %.6f", p, q, c.lhs / c.rhs));
  }
  for (int i = 0; i < 200; ++i) {
    SampledField f = random_field(g, rng);
    auto [p, q] = opq[i % 5];
    OverlapFamily fam = random_overlap_family(g, rng, 2 + i % 7, 1 + i % 3);
    LemmaCheck c = check_overlap_lemma(f, fam, p, q);
    no += c.holds;
    o.require(c.holds && c.lhs <= c.rhs * (1 + 1e-12), fmt("overlap p=%g q=%g lhs/rhs %.6f", p, q, c.lhs / c.rhs));
  }
  if (o.pass) o.detail = fmt("disjoint %g/200, overlap %g/200", nd, no);
  return o;
}

// 10 --------------------------------------------------------------------------

Outcome estprod_suite() {
  Outcome o;
  double worst = 0.0;
  auto fam = gaussian_family(FamilyKind::positive, 1, 4, 1010);
  for (auto [r, s, m] : {std::tuple{1.0, -1.0, 1}, std::tuple{2.0, -1.0, 2}}) {
    for (const auto& mem : fam) {
      EstprodResult e = verify_pointwise_estprod(mem.f, r, s, m, std::nullopt, {}, default_grid(mem.f, 4096));
      worst = std::max(worst, e.max_margin);
      o.require(e.max_margin <= 1 + 1e-2, mem.id + fmt(" r=%g margin %.4f", r, e.max_margin));
    }
  }
  if (o.pass) o.detail = fmt("max margin %.4f", worst);
  return o;
}

// 11 --------------------------------------------------------------------------

Outcome campaign_suite() {
  Outcome o;
  auto t0 = Clock::now();
  std::ifstream is(std::string(GNFORGE_SOURCE_DIR) + "/configs/campaign.json");
  std::stringstream ss;
  ss << is.rdbuf();
  SweepOutcome res = run_sweep(ss.str());
  double secs = seconds_since(t0);
  const json& th = res.summary["theorems"];
  for (Theorem t : all_theorems()) {
    const std::string tag = theorem_tag(t);
    if (!th.contains(tag)) {
      o.require(false, tag + " missing");
      continue;
    }
    const json& s = th[tag];
    o.require(s["functions"].get<int>() >= 30, tag + " has fewer than 30 functions");
    o.require(s["errors"].get<int>() == 0, tag + " has numeric errors");
    o.require(!s["max_ratio"].is_null() && std::isfinite(s["max_ratio"].get<double>()), tag + " max ratio not finite");
    o.require(s["max_amplitude_deviation"].get<double>() <= 1e-12,
              tag + fmt(" amplitude deviation %.2e", s["max_amplitude_deviation"].get<double>()));
    o.require(s["max_dilation_drift"].get<double>() <= 2e-2,
              tag + fmt(" dilation drift %.2e", s["max_dilation_drift"].get<double>()));
    o.require(s["max_refinement_change"].get<double>() <= 5e-2,
              tag + fmt(" refinement change %.2e", s["max_refinement_change"].get<double>()));
  }
  o.require(res.summary["explicit_failures"].get<int>() == 0, "explicit-constant check failures in the campaign");
  o.require(res.summary["errors"].get<int>() == 0, "numeric errors in the campaign");
  o.require(secs < 1800.0, fmt("campaign took %.0f s", secs));
  if (o.pass) o.detail = fmt("%g rows in %.0f s", static_cast<double>(res.rows.size()), secs);
  return o;
}

// 12 --------------------------------------------------------------------------

Outcome homogeneity_suite() {
  Outcome o;
  double worst = 0.0;
  auto exponent = [](const std::function<double(double)>& norm) {
    return std::log(norm(2.0) / norm(0.5)) / std::log(4.0);
  };
  auto track = [&](double got, double want, const std::string& what) {
    worst = std::max(worst, std::abs(got - want));
    o.require(std::abs(got - want) <= 1e-2, what + fmt(" exponent %.4f, want %.4f", got, want));
  };
  for (int n : {1, 2}) {
    AnalyticFunction f = GaussianMix{n, {{1.0, {0.2, -0.1}, 1.0}, {0.5, {-0.7, 0.4}, 0.5}}};
    GridSpec g = default_grid(f, n == 1 ? 4096 : 256);
    for (auto [p, r] : {std::pair{1.5, 1.5}, {2.0, 1.0}, {3.0, kInf}}) {
      LorentzIndex idx(p, r);
      track(exponent([&](double l) { return lorentz_quasinorm(dilate(f, l), idx, g.scaled(1 / l)); }), -n / p,
            "lorentz");
      for (int k : {1, 2})
        track(exponent([&](double l) { return sobolev_lorentz_seminorm(dilate(f, l), k, idx, g.scaled(1 / l)); }),
              k - n / p, "sobolev");
    }
  }
  const GaussianMix unit{1, {{1.0, {0.0, 0.0}, 1.0}}};
  const GaussianMix bal{1, {{1.0, {0.0, 0.0}, 1.0}, {-1.0 / std::sqrt(2.0), {0.5, 0.0}, 2.0}}};
  const GaussianMix unit2{2, {{1.0, {0.0, 0.0}, 1.0}}};
  struct B {
    GaussianMix f;
    SmoothnessIndex idx;
  };
  for (const B& b : {B{unit, SmoothnessIndex(-0.2, 2.0, 4.0)}, B{unit, SmoothnessIndex(1.0, 2.0, kInf)},
                     B{bal, SmoothnessIndex(-1.0, 2.0, 2.0)}, B{unit2, SmoothnessIndex(-0.5, 2.0, 3.0)}}) {
    const double want = b.idx.s - b.f.dim / b.idx.p;
    track(exponent([&](double l) { return besov_norm(AnalyticSource(dilate(AnalyticFunction(b.f), l).mix()), b.idx).value; }),
          want, "besov");
  }
  GridSpec gb = default_grid(AnalyticFunction(bal), 2048);
  for (const auto& [f, idx] : {std::pair{bal, SmoothnessIndex(-1.0, 2.0, kInf, 0)},
                               std::pair{unit, SmoothnessIndex(1.0, 2.0, 2.0, 1)}}) {
    const double want = idx.s - 1.0 / idx.p;
    track(exponent([&](double l) {
            return tl_lorentz_norm(AnalyticSource(dilate(AnalyticFunction(f), l).mix(), gb.scaled(1 / l)), idx).value;
          }),
          want, "triebel-lizorkin");
  }
  if (o.pass) o.detail = fmt("max exponent error %.2e", worst);
  return o;
}

}  // namespace

// acceptance [N ...] runs only the listed criteria
int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion all[] = {
      {"rearrangement identities", rearrangement_suite},
      {"lorentz two-form agreement", lorentz_two_forms},
      {"heat semigroup and h-derivatives", heat_suite},
      {"reconstruction from dh_m", reconstruct_suite},
      {"pseudo-poincare constant", pseudo_poincare_suite},
      {"smoothing bound", smoothing_suite},
      {"sequence majorization", majorize_suite},
      {"envelope certificates", envelope_suite},
      {"disjoint and overlapping sets", lemma_sets_suite},
      {"pointwise product estimate", estprod_suite},
      {"theorem campaign", campaign_suite},
      {"homogeneity exponents", homogeneity_suite},
  };
  int failed = 0, k = 0, ran = 0;
  for (const auto& c : all) {
    ++k;
    if (!only.empty() && std::find(only.begin(), only.end(), k) == only.end()) continue;
    ++ran;
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("%s  %2d %-34s %8.1fs  %s\n", o.pass ? "PASS" : "FAIL", k, c.name, seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed ? 1 : 0;
}
