#include "gnforge/smoothnorms.hpp"

#include <cstdio>
#include <algorithm>
#include <cmath>
#include <map>

#include "gnforge/heat.hpp"
#include "gnforge/rearrange.hpp"

namespace gnforge {

int default_m(double s) { return std::max(0, static_cast<int>(std::floor(s / 2.0)) + 1); }

SmoothnessIndex::SmoothnessIndex(double s_, double p_, double q_, int m_) : s(s_), p(p_), q(q_), m(m_) {
  if (!std::isfinite(s)) throw InvalidInput("smoothness must be finite");
  if (!(p > 0.0) || !(q > 0.0)) throw UnsupportedIndex("p and q must be positive");
  if (m < 0) throw InvalidInput("m must be nonnegative");
  if (!(2.0 * m > s)) throw InvalidInput("need 2m > s");
}

SmoothnessIndex::SmoothnessIndex(double s_, double p_, double q_) : SmoothnessIndex(s_, p_, q_, default_m(s_)) {}

SmoothnessIndex SmoothnessIndex::with_r(double r_) const {
  if (!(r_ > 0.0)) throw UnsupportedIndex("Lorentz secondary index must be positive");
  SmoothnessIndex out = *this;
  out.r = r_;
  return out;
}

QuadratureSpec::QuadratureSpec(double lo, double hi, int n) : hmin(lo), hmax(hi), nodes(n) {
  if (!(hmin > 0.0) || !(hmax > hmin) || !std::isfinite(hmax)) throw InvalidInput("need 0 < hmin < hmax < inf");
  if (nodes < 50) throw InvalidInput("quadrature needs at least 50 nodes");
}

double QuadratureSpec::du() const { return std::log(hmax / hmin) / (nodes - 1); }

double QuadratureSpec::node(int k) const { return k == nodes - 1 ? hmax : hmin * std::exp(k * du()); }

std::vector<double> ThermicSource::values(double h, int m, const std::vector<std::size_t>& flat) const {
  SampledField f = field(h, m);
  std::vector<double> out(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) out[i] = f.values[flat[i]];
  return out;
}

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// 8-point Gauss-Legendre on [-1, 1]
constexpr double kGLx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                            0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr double kGLw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                            0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

std::size_t pow2_at_least(double x, std::size_t lo, std::size_t hi) {
  std::size_t n = lo;
  while (n < hi && static_cast<double>(n) < x) n *= 2;
  return n;
}

// d^m/dh^m P_h f for a mixture, Laguerre form with per-term constants hoisted.
struct MixEval {
  int n;
  std::vector<double> K, b, c0, c1;
  heat::LaguerrePoly L;

  MixEval(const GaussianMix& f, double h, int m) : n(f.dim), L(m, 0.5 * f.dim - 1.0) {
    const double sign = (m % 2) ? -1.0 : 1.0;
    for (const auto& t : f.terms) {
      double bb = t.width + h;
      K.push_back(t.amp * std::pow(t.width / bb, 0.5 * n) * factorial(m) * sign * std::pow(bb, -m));
      b.push_back(bb);
      c0.push_back(t.center[0]);
      c1.push_back(t.center[1]);
    }
  }

  double operator()(const Point& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < K.size(); ++i) {
      double d0 = x[0] - c0[i];
      double r2 = d0 * d0;
      if (n == 2) {
        double d1 = x[1] - c1[i];
        r2 += d1 * d1;
      }
      double u = r2 / (4.0 * b[i]);
      if (u > 745.0) continue;
      s += K[i] * std::exp(-u) * L(u);
    }
    return s;
  }
};

// coordinate-wise parabolic search for a local max of |g| starting at x
double polish_max(const MixEval& g, Point x, double step) {
  double best = std::abs(g(x));
  for (int it = 0; it < 80 && step > 1e-13 * (1.0 + std::abs(x[0]) + std::abs(x[1])); ++it) {
    bool moved = false;
    for (int d = 0; d < g.n; ++d) {
      Point a = x, c = x;
      a[d] -= step;
      c[d] += step;
      double fa = std::abs(g(a)), fc = std::abs(g(c));
      double den = fa - 2.0 * best + fc;
      if (den < 0.0) {
        double t = std::clamp(0.5 * (fa - fc) / den, -1.0, 1.0);
        Point v = x;
        v[d] += t * step;
        double fv = std::abs(g(v));
        if (fv > best && fv >= fa && fv >= fc) {
          best = fv;
          x = v;
          moved = true;
          continue;
        }
      }
      if (fa > best && fa >= fc) {
        best = fa;
        x = a;
        moved = true;
      } else if (fc > best) {
        best = fc;
        x = c;
        moved = true;
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace

AnalyticSource::AnalyticSource(GaussianMix f, std::optional<GridSpec> g) : f_(std::move(f)), grid_(std::move(g)) {
  for (const auto& t : f_.terms)
    if (!(t.width > 0.0)) throw InvalidInput("gaussian widths must be positive");
  if (grid_ && grid_->dim() != f_.dim) throw InvalidInput("function and grid dimensions differ");
}

AnalyticSource::AnalyticSource(const AnalyticFunction& f, std::optional<GridSpec> g)
    : AnalyticSource(f.mix(), std::move(g)) {}

const GridSpec& AnalyticSource::field_grid() const {
  if (!grid_) throw InvalidInput("pointwise aggregation needs a grid");
  return *grid_;
}

bool AnalyticSource::is_zero() const {
  return std::all_of(f_.terms.begin(), f_.terms.end(), [](const GaussianTerm& t) { return t.amp == 0.0; });
}

SampledField AnalyticSource::field(double h, int m) const {
  const GridSpec& g = field_grid();
  MixEval e(f_, h, m);
  SampledField out(g);
  for (std::size_t k = 0; k < g.size(); ++k) out.values[k] = e(g.point(k));
  return out;
}

std::vector<double> AnalyticSource::values(double h, int m, const std::vector<std::size_t>& flat) const {
  const GridSpec& g = field_grid();
  MixEval e(f_, h, m);
  std::vector<double> out(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) out[i] = e(g.point(flat[i]));
  return out;
}

std::pair<double, double> AnalyticSource::h_hint() const {
  if (f_.terms.empty()) return {1e-2, 1e2};
  double amin = kInf, amax = 0.0, spread = 0.0;
  for (const auto& t : f_.terms) {
    amin = std::min(amin, t.width);
    amax = std::max(amax, t.width);
    for (const auto& u : f_.terms) {
      double d0 = t.center[0] - u.center[0], d1 = t.center[1] - u.center[1];
      spread = std::max(spread, d0 * d0 + d1 * d1);
    }
  }
  return {1e-2 * amin, 1e2 * (amax + spread)};
}

std::optional<double> AnalyticSource::closed_form_norm(double h, int m, double p) const {
  if (m != 0) return std::nullopt;
  if (is_zero()) return 0.0;
  const double n = f_.dim;
  if (f_.terms.size() == 1) {
    const auto& t = f_.terms[0];
    double b = t.width + h;
    double top = std::abs(t.amp) * std::pow(t.width / b, 0.5 * n);
    if (std::isinf(p)) return top;
    return top * std::pow(4.0 * M_PI * b / p, 0.5 * n / p);
  }
  if (p == 2.0) {
    double s = 0.0;
    for (const auto& ti : f_.terms) {
      double bi = ti.width + h, Ai = ti.amp * std::pow(ti.width / bi, 0.5 * n);
      for (const auto& tj : f_.terms) {
        double bj = tj.width + h, Aj = tj.amp * std::pow(tj.width / bj, 0.5 * n);
        double d0 = ti.center[0] - tj.center[0], d1 = ti.center[1] - tj.center[1];
        double r2 = d0 * d0 + (f_.dim == 2 ? d1 * d1 : 0.0);
        s += Ai * Aj * std::pow(4.0 * M_PI * bi * bj / (bi + bj), 0.5 * n) * std::exp(-r2 / (4.0 * (bi + bj)));
      }
    }
    return std::sqrt(std::max(s, 0.0));
  }
  return std::nullopt;
}

double AnalyticSource::grid_norm(double h, int m, double p) const {
  if (is_zero()) return 0.0;
  MixEval g(f_, h, m);
  double bmin = kInf, bmax = 0.0, cmax = 0.0;
  for (const auto& t : f_.terms) {
    bmin = std::min(bmin, t.width + h);
    bmax = std::max(bmax, t.width + h);
    cmax = std::max({cmax, std::abs(t.center[0]), f_.dim == 2 ? std::abs(t.center[1]) : 0.0});
  }
  const double L = cmax + 10.0 * std::sqrt(2.0 * bmax);
  const double sigma = std::sqrt(bmin);
  const int n = f_.dim;

  if (std::isinf(p)) {
    std::size_t N = n == 1 ? pow2_at_least(4.0 * L / sigma, 64, 1 << 14) : pow2_at_least(4.0 * L / sigma, 32, 256);
    GridSpec grid(n, L, N);
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      double v = std::abs(g(grid.point(k)));
      if (v > best) {
        best = v;
        arg = k;
      }
    }
    return std::max(best, polish_max(g, grid.point(arg), 0.5 * grid.spacing()));
  }

  if (n == 1) {
    // Gauss-Legendre panels; cells where g changes sign are split at the root so that
    // each piece integrates a smooth |g|^p
    std::size_t N = pow2_at_least(2.0 * L * (1.0 + 0.5 * m) / sigma, 64, 1 << 14);
    const double d = 2.0 * L / N;
    auto panel = [&](double a, double b) {
      double c = 0.5 * (a + b), r = 0.5 * (b - a), acc = 0.0;
      for (int k = 0; k < 8; ++k) acc += kGLw[k] * std::pow(std::abs(g({c + r * kGLx[k], 0.0})), p);
      return acc * r;
    };
    double s = 0.0, xa = -L, ga = g({xa, 0.0});
    for (std::size_t i = 1; i <= N; ++i) {
      double xb = -L + i * d, gb = g({xb, 0.0});
      if ((ga < 0.0 && gb > 0.0) || (ga > 0.0 && gb < 0.0)) {
        double lo = xa, hi = xb, glo = ga;
        for (int it = 0; it < 60 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
          double mid = 0.5 * (lo + hi), gm = g({mid, 0.0});
          if ((gm < 0.0) == (glo < 0.0)) {
            lo = mid;
            glo = gm;
          } else {
            hi = mid;
          }
        }
        double root = 0.5 * (lo + hi);
        s += panel(xa, root) + panel(root, xb);
      } else {
        s += panel(xa, xb);
      }
      xa = xb;
      ga = gb;
    }
    return std::pow(s, 1.0 / p);
  }
  std::size_t N = pow2_at_least(2.0 * L * (2.0 + m) / sigma, 64, 512);
  GridSpec grid(2, L, N);
  double s = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) s += std::pow(std::abs(g(grid.point(k))), p);
  return std::pow(s * grid.cell_measure(), 1.0 / p);
}

double AnalyticSource::norm(double h, int m, double p) const {
  if (auto c = closed_form_norm(h, m, p)) return *c;
  return grid_norm(h, m, p);
}

SampledSource::SampledSource(const SampledField& f)
    : grid_(f.grid), conv_(std::make_unique<heat::Convolver>(f)) {
  // cells below 1e-13 of the peak do not count towards the support
  const double cut = 1e-13 * f.max_abs();
  zero_ = f.max_abs() == 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (zero_ || std::abs(f.values[k]) <= cut) continue;
    Point x = grid_.point(k);
    double r = std::abs(x[0]);
    if (grid_.dim() == 2) r = std::max(r, std::abs(x[1]));
    support_radius_ = std::max(support_radius_, r + 0.5 * grid_.spacing());
  }
}

SampledSource::~SampledSource() = default;

SampledField SampledSource::field(double h, int m) const { return conv_->dh(h, m); }

double SampledSource::norm(double h, int m, double p) const {
  if (zero_) return 0.0;
  if (std::isfinite(p) && support_radius_ + 10.0 * std::sqrt(2.0 * h) > grid_.half_width())
    throw KernelTooWide("P_h f leaves the box at h = " + std::to_string(h) + "; embed the field in a larger box");
  return conv_->dh(h, m).lp_norm(p);
}

std::pair<double, double> SampledSource::h_hint() const {
  double d = grid_.spacing(), L = grid_.half_width();
  return {1e-2 * d * d, L * L};
}

namespace {

struct Ends {
  bool ok_lo = true, ok_hi = true;
  bool plateau_lo = false, plateau_hi = false;
  double res_lo = 0.0, res_hi = 0.0;
};

// endpoint test for one profile; at_lo_e / at_hi_e are the values one e-fold inside
Ends point_ends(double first, double at_lo_e, double last, double at_hi_e, double peak, double q,
                const AutoRange& ar) {
  Ends e;
  if (!(peak > 0.0)) return e;
  e.res_lo = first / peak;
  e.res_hi = last / peak;
  if (std::isfinite(q)) {
    e.res_lo = std::pow(e.res_lo, q);
    e.res_hi = std::pow(e.res_hi, q);
  }
  e.ok_lo = e.res_lo <= ar.negligible;
  e.ok_hi = e.res_hi <= ar.negligible;
  if (std::isinf(q)) {
    e.ok_lo = e.ok_lo || (e.res_lo <= ar.sup_negligible && first < at_lo_e);
    e.ok_hi = e.ok_hi || (e.res_hi <= ar.sup_negligible && last < at_hi_e);
    const double tol = ar.plateau_tol;
    if (!e.ok_lo && first >= (1.0 - tol) * peak && std::abs(first - at_lo_e) <= tol * first) e.ok_lo = e.plateau_lo = true;
    if (!e.ok_hi && last >= (1.0 - tol) * peak && std::abs(last - at_hi_e) <= tol * last) e.ok_hi = e.plateau_hi = true;
  }
  return e;
}

Ends profile_ends(const std::vector<double>& v, int efold, double q, const AutoRange& ar) {
  double peak = *std::max_element(v.begin(), v.end());
  int e = std::clamp(efold, 1, static_cast<int>(v.size()) - 1);
  return point_ends(v.front(), v[e], v.back(), v[v.size() - 1 - e], peak, q, ar);
}

double integrand(const ThermicSource& src, const SmoothnessIndex& idx, double h) {
  double nv = src.norm(h, idx.m, idx.p);
  if (!(nv > 0.0)) return 0.0;
  return std::exp((idx.m - 0.5 * idx.s) * std::log(h) + std::log(nv));
}

double field_weight(double h, const SmoothnessIndex& idx) { return std::exp((idx.m - 0.5 * idx.s) * std::log(h)); }

double trapezoid_q(const std::vector<double>& v, double du, double q) {
  double peak = *std::max_element(v.begin(), v.end());
  if (!(peak > 0.0)) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    double w = (k == 0 || k + 1 == v.size()) ? 0.5 * du : du;
    s += w * std::pow(v[k] / peak, q);
  }
  return peak * std::pow(s, 1.0 / q);
}

std::string underresolved(const Ends& e) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "endpoint integrand not negligible (lo %.3g, hi %.3g)", e.res_lo, e.res_hi);
  return buf;
}

NormResult finish_scalar(const ThermicSource& src, const SmoothnessIndex& idx, const QuadratureSpec& quad,
                         const std::vector<double>& v, const Ends& e) {
  NormResult out{"besov", idx, quad};
  out.residual_lo = e.res_lo;
  out.residual_hi = e.res_hi;
  out.plateau = e.plateau_lo || e.plateau_hi;
  for (int k = 0; k < quad.nodes; ++k) out.profile.emplace_back(quad.node(k), v[k]);
  const double du = quad.du();
  if (std::isfinite(idx.q)) {
    out.value = trapezoid_q(v, du, idx.q);
    return out;
  }
  auto it = std::max_element(v.begin(), v.end());
  double best = *it;
  if (!(best > 0.0) || out.plateau) {
    out.value = best;
    return out;
  }
  // pattern search in u = ln h around the best node
  const double ulo = std::log(quad.hmin), uhi = std::log(quad.hmax);
  double ub = std::log(quad.node(static_cast<int>(it - v.begin())));
  for (double d = 0.5 * du; d >= 1e-4; d *= 0.5) {
    for (double u : {ub - d, ub + d}) {
      if (u < ulo || u > uhi) continue;
      double val = integrand(src, idx, std::exp(u));
      if (val > best) {
        best = val;
        ub = u;
      }
    }
  }
  out.value = best;
  return out;
}

void check_lattice_span(int klo, int khi, const AutoRange& ar, const Ends& e) {
  if (khi - klo > ar.max_span * ar.per_efold)
    throw QuadratureUnderresolved("h range exceeded " + std::to_string(static_cast<int>(ar.max_span)) + " e-folds: " + underresolved(e));
}

}  // namespace

NormResult besov_norm(const ThermicSource& src, const SmoothnessIndex& idx, const QuadratureSpec& quad) {
  std::vector<double> v(quad.nodes);
  for (int k = 0; k < quad.nodes; ++k) v[k] = integrand(src, idx, quad.node(k));
  Ends e = profile_ends(v, static_cast<int>(std::lround(1.0 / quad.du())), idx.q, AutoRange{});
  if (!e.ok_lo || !e.ok_hi) throw QuadratureUnderresolved(underresolved(e));
  return finish_scalar(src, idx, quad, v, e);
}

NormResult besov_norm(const ThermicSource& src, const SmoothnessIndex& idx, const AutoRange& ar) {
  const int npe = ar.per_efold;
  const double du = 1.0 / npe;
  auto [hl, hh] = src.h_hint();
  int klo = static_cast<int>(std::floor(std::log(hl) * npe));
  int khi = static_cast<int>(std::ceil(std::log(hh) * npe));
  khi = std::max(khi, klo + 7 * npe);
  if (src.is_zero()) {
    NormResult out{"besov", idx, QuadratureSpec(std::exp(klo * du), std::exp(khi * du), khi - klo + 1)};
    return out;
  }
  std::map<int, double> cache;
  auto I = [&](int k) {
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    double v = integrand(src, idx, std::exp(k * du));
    cache.emplace(k, v);
    return v;
  };
  for (;;) {
    std::vector<double> v;
    for (int k = klo; k <= khi; ++k) v.push_back(I(k));
    Ends e = profile_ends(v, npe, idx.q, ar);
    if (e.ok_lo && e.ok_hi) {
      QuadratureSpec quad(std::exp(klo * du), std::exp(khi * du), khi - klo + 1);
      return finish_scalar(src, idx, quad, v, e);
    }
    if (!e.ok_lo) klo -= ar.grow * npe;
    if (!e.ok_hi) khi += ar.grow * npe;
    check_lattice_span(klo, khi, ar, e);
  }
}

NormResult besov_norm(const AnalyticFunction& f, const SmoothnessIndex& idx, const AutoRange& ar) {
  if (!f.is_gaussian_mix()) throw UnsupportedFamily("analytic Besov path needs a gaussian mixture; sample the function");
  return besov_norm(AnalyticSource(f.mix()), idx, ar);
}

NormResult besov_norm(const SampledField& f, const SmoothnessIndex& idx, const AutoRange& ar) {
  return besov_norm(SampledSource(f), idx, ar);
}

namespace {

// Streaming per-point aggregation over the nodes of one quadrature.
class FieldAccumulator {
 public:
  FieldAccumulator(std::size_t npts, double q, int nodes, int efold)
      : q_(q), nodes_(nodes), e_(std::clamp(efold, 1, nodes - 1)),
        acc_(npts, 0.0), best_(npts, 0.0), left_(npts, NAN), right_(npts, NAN), prev_(npts, 0.0),
        bestk_(npts, -1), first_(npts), at_e_(npts), last_(npts), at_end_e_(npts) {}

  void add(int k, double w, const std::vector<double>& v) {
    for (std::size_t x = 0; x < v.size(); ++x) {
      double val = std::abs(v[x]);
      if (k == 0) first_[x] = val;
      if (k == e_) at_e_[x] = val;
      if (k == nodes_ - 1 - e_) at_end_e_[x] = val;
      if (k == nodes_ - 1) last_[x] = val;
      if (std::isfinite(q_)) acc_[x] += w * std::pow(val, q_);
      if (val > best_[x] || bestk_[x] < 0) {
        best_[x] = val;
        bestk_[x] = k;
        left_[x] = k > 0 ? prev_[x] : NAN;
        right_[x] = NAN;
      } else if (bestk_[x] == k - 1) {
        right_[x] = val;
      }
      prev_[x] = val;
    }
  }

  std::vector<double> result() const {
    std::vector<double> out(acc_.size());
    for (std::size_t x = 0; x < out.size(); ++x) {
      if (std::isfinite(q_)) {
        out[x] = std::pow(acc_[x], 1.0 / q_);
        continue;
      }
      double y0 = left_[x], y1 = best_[x], y2 = right_[x];
      out[x] = y1;
      if (std::isfinite(y0) && std::isfinite(y2)) {
        double den = 2.0 * y1 - y0 - y2;
        if (den > 0.0) out[x] = y1 + 0.125 * (y2 - y0) * (y2 - y0) / den;
      }
    }
    return out;
  }

  Ends ends(const AutoRange& ar, std::size_t* plateau_count) const {
    double gpeak = *std::max_element(best_.begin(), best_.end());
    Ends all;
    std::size_t plateaus = 0;
    if (!(gpeak > 0.0)) return all;
    for (std::size_t x = 0; x < best_.size(); ++x) {
      if (best_[x] < 1e-8 * gpeak) continue;
      Ends e = point_ends(first_[x], at_e_[x], last_[x], at_end_e_[x], best_[x], q_, ar);
      all.ok_lo = all.ok_lo && e.ok_lo;
      all.ok_hi = all.ok_hi && e.ok_hi;
      if (!e.plateau_lo) all.res_lo = std::max(all.res_lo, e.res_lo);
      if (!e.plateau_hi) all.res_hi = std::max(all.res_hi, e.res_hi);
      all.plateau_lo = all.plateau_lo || e.plateau_lo;
      all.plateau_hi = all.plateau_hi || e.plateau_hi;
      if (e.plateau_lo || e.plateau_hi) ++plateaus;
    }
    if (plateau_count) *plateau_count = plateaus;
    return all;
  }

 private:
  double q_;
  int nodes_, e_;
  std::vector<double> acc_, best_, left_, right_, prev_;
  std::vector<int> bestk_;
  std::vector<double> first_, at_e_, last_, at_end_e_;
};

template <class Eval>
FieldAccumulator accumulate(std::size_t npts, const SmoothnessIndex& idx, const QuadratureSpec& quad, Eval eval) {
  const double du = quad.du();
  FieldAccumulator acc(npts, idx.q, quad.nodes, static_cast<int>(std::lround(1.0 / du)));
  for (int k = 0; k < quad.nodes; ++k) {
    double h = quad.node(k);
    std::vector<double> v = eval(k, h);
    double w = field_weight(h, idx);
    for (auto& x : v) x *= w;
    acc.add(k, (k == 0 || k == quad.nodes - 1) ? 0.5 * du : du, v);
  }
  return acc;
}

Aggregate build_aggregate(const ThermicSource& src, const QuadratureSpec& quad, const FieldAccumulator& acc,
                          const Ends& e, std::size_t plateaus) {
  Aggregate out{SampledField(src.field_grid(), acc.result()), quad};
  out.residual_lo = e.res_lo;
  out.residual_hi = e.res_hi;
  out.plateau_points = plateaus;
  return out;
}

std::vector<std::size_t> probe_indices(const GridSpec& g) {
  const std::size_t N = g.points_per_axis();
  std::size_t per_axis = g.dim() == 1 ? 1024 : 32;
  std::size_t stride = std::max<std::size_t>(1, N / per_axis);
  std::vector<std::size_t> out;
  if (g.dim() == 1) {
    for (std::size_t i = stride / 2; i < N; i += stride) out.push_back(i);
  } else {
    for (std::size_t i = stride / 2; i < N; i += stride)
      for (std::size_t j = stride / 2; j < N; j += stride) out.push_back(i * N + j);
  }
  return out;
}

}  // namespace

Aggregate tl_pointwise_aggregate(const ThermicSource& src, const SmoothnessIndex& idx, const QuadratureSpec& quad) {
  const GridSpec& g = src.field_grid();
  auto acc = accumulate(g.size(), idx, quad, [&](int, double h) { return src.field(h, idx.m).values; });
  std::size_t plateaus = 0;
  Ends e = acc.ends(AutoRange{}, &plateaus);
  if (!e.ok_lo || !e.ok_hi) throw QuadratureUnderresolved(underresolved(e));
  return build_aggregate(src, quad, acc, e, plateaus);
}

Aggregate tl_pointwise_aggregate(const ThermicSource& src, const SmoothnessIndex& idx, const AutoRange& ar) {
  const GridSpec& g = src.field_grid();
  const int npe = ar.per_efold;
  const double du = 1.0 / npe;
  auto [hl, hh] = src.h_hint();
  int klo = static_cast<int>(std::floor(std::log(hl) * npe));
  int khi = static_cast<int>(std::ceil(std::log(hh) * npe));
  khi = std::max(khi, klo + 7 * npe);
  auto lattice = [&] { return QuadratureSpec(std::exp(klo * du), std::exp(khi * du), khi - klo + 1); };
  if (src.is_zero()) return Aggregate{SampledField(g), lattice()};

  // range finding on a probe subset with cached node values
  const auto probe = probe_indices(g);
  std::map<int, std::vector<double>> cache;
  for (;;) {
    QuadratureSpec quad = lattice();
    auto acc = accumulate(probe.size(), idx, quad, [&](int k, double h) {
      auto it = cache.find(klo + k);
      if (it == cache.end()) it = cache.emplace(klo + k, src.values(h, idx.m, probe)).first;
      return it->second;
    });
    Ends e = acc.ends(ar, nullptr);
    if (e.ok_lo && e.ok_hi) break;
    if (!e.ok_lo) klo -= ar.grow * npe;
    if (!e.ok_hi) khi += ar.grow * npe;
    check_lattice_span(klo, khi, ar, e);
  }
  cache.clear();

  for (int attempt = 0;; ++attempt) {
    QuadratureSpec quad = lattice();
    auto acc = accumulate(g.size(), idx, quad, [&](int, double h) { return src.field(h, idx.m).values; });
    std::size_t plateaus = 0;
    Ends e = acc.ends(ar, &plateaus);
    if (e.ok_lo && e.ok_hi) return build_aggregate(src, quad, acc, e, plateaus);
    if (attempt == 3) throw QuadratureUnderresolved(underresolved(e));
    if (!e.ok_lo) klo -= ar.grow * npe;
    if (!e.ok_hi) khi += ar.grow * npe;
    check_lattice_span(klo, khi, ar, e);
  }
}

namespace {

NormResult tl_from_aggregate(const SmoothnessIndex& idx, const Aggregate& agg) {
  const double r = idx.lorentz_r();
  NormResult out{r == idx.p ? "tl" : "tl_lorentz", idx, agg.quad};
  out.value = lorentz_norm(rearrangement(agg.field), LorentzIndex(idx.p, r));
  out.residual_lo = agg.residual_lo;
  out.residual_hi = agg.residual_hi;
  out.plateau = agg.plateau_points > 0;
  return out;
}

void require_finite_p(const SmoothnessIndex& idx) {
  if (std::isinf(idx.p)) throw UnsupportedIndex("Triebel-Lizorkin quasinorms need p < inf");
}

}  // namespace

NormResult tl_lorentz_norm(const ThermicSource& src, const SmoothnessIndex& idx, const AutoRange& ar) {
  require_finite_p(idx);
  return tl_from_aggregate(idx, tl_pointwise_aggregate(src, idx, ar));
}

NormResult tl_lorentz_norm(const ThermicSource& src, const SmoothnessIndex& idx, const QuadratureSpec& quad) {
  require_finite_p(idx);
  return tl_from_aggregate(idx, tl_pointwise_aggregate(src, idx, quad));
}

double sobolev_lorentz_seminorm(const AnalyticFunction& f, int r, const LorentzIndex& idx, const GridSpec& g) {
  if (r < 1) throw InvalidInput("Sobolev order must be a positive integer");
  return lorentz_norm(rearrangement(grad_magnitude_field(f, r, g)), idx);
}

double lorentz_quasinorm(const AnalyticFunction& f, const LorentzIndex& idx, const GridSpec& g) {
  return lorentz_norm(rearrangement(sample(f, g)), idx);
}

namespace {

nlohmann::json index_value(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

}  // namespace

nlohmann::json NormResult::to_json() const {
  nlohmann::json ind = {{"s", idx.s}, {"p", index_value(idx.p)}, {"q", index_value(idx.q)}};
  if (kind == "tl_lorentz") ind["r"] = index_value(idx.lorentz_r());
  return {{"norm_kind", kind},
          {"indices", ind},
          {"m", idx.m},
          {"quad", {{"hmin", quad.hmin}, {"hmax", quad.hmax}, {"nodes", quad.nodes}}},
          {"value", value},
          {"endpoint_residuals", {residual_lo, residual_hi}},
          {"plateau", plateau}};
}

}  // namespace gnforge
