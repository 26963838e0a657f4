#include "gnforge/heat.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

namespace gnforge::heat {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

double binom(int m, int j) { return factorial(m) / (factorial(j) * factorial(m - j)); }

void check_h(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("heat scale h must be positive and finite");
}

}  // namespace

double kernel_r2(double h, double r2, int n) {
  check_h(h);
  return std::pow(4.0 * M_PI * h, -0.5 * n) * std::exp(-r2 / (4.0 * h));
}

double kernel(double h, const Point& y, int n) {
  double r2 = y[0] * y[0] + (n == 2 ? y[1] * y[1] : 0.0);
  return kernel_r2(h, r2, n);
}

double laguerre(int m, double alpha, double u) {
  if (m < 0) throw InvalidInput("Laguerre degree must be >= 0");
  if (m == 0) return 1.0;
  double lm = 1.0, l = alpha + 1.0 - u;
  for (int k = 1; k < m; ++k) {
    double ln = ((2.0 * k + alpha + 1.0 - u) * l - (k + alpha) * lm) / (k + 1.0);
    lm = l;
    l = ln;
  }
  return l;
}

LaguerrePoly::LaguerrePoly(int degree, double alpha) : degree_(degree), alpha_(alpha) {
  if (degree < 0) throw InvalidInput("Laguerre degree must be >= 0");
  // recurrence on coefficient vectors
  std::vector<double> prev{1.0}, cur{1.0};
  if (degree >= 1) cur = {alpha + 1.0, -1.0};
  for (int k = 1; k < degree; ++k) {
    std::vector<double> next(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      next[i] += (2.0 * k + alpha + 1.0) * cur[i];
      next[i + 1] -= cur[i];
    }
    for (int i = 0; i < k; ++i) next[i] -= (k + alpha) * prev[i];
    for (auto& c : next) c /= (k + 1.0);
    prev = std::move(cur);
    cur = std::move(next);
  }
  c_ = degree == 0 ? std::vector<double>{1.0} : cur;
}

double LaguerrePoly::operator()(double u) const {
  double s = 0.0;
  for (std::size_t i = c_.size(); i-- > 0;) s = s * u + c_[i];
  return s;
}

double dh_kernel_r2(double h, double r2, int n, int m) {
  check_h(h);
  if (m < 0) throw InvalidInput("derivative order must be >= 0");
  double p = kernel_r2(h, r2, n);
  if (m == 0 || p == 0.0) return p;
  double sign = (m % 2) ? -1.0 : 1.0;
  return p * factorial(m) * sign * std::pow(h, -m) * laguerre(m, 0.5 * n - 1.0, r2 / (4.0 * h));
}

GaussianMix apply_analytic(const GaussianMix& f, double h) {
  if (!(h >= 0.0) || !std::isfinite(h)) throw InvalidInput("heat scale h must be >= 0");
  GaussianMix out = f;
  for (auto& t : out.terms) {
    t.amp *= std::pow(t.width / (t.width + h), 0.5 * f.dim);
    t.width += h;
  }
  return out;
}

AnalyticFunction apply_analytic(const AnalyticFunction& f, double h) {
  if (!f.is_gaussian_mix()) throw UnsupportedFamily("closed-form heat evolution needs a gaussian mixture");
  return apply_analytic(f.mix(), h);
}

double dh_m_value(const GaussianMix& f, double h, int m, const Point& x) {
  double s = 0.0;
  for (const auto& t : f.terms) {
    double d0 = x[0] - t.center[0];
    double r2 = d0 * d0;
    if (f.dim == 2) {
      double d1 = x[1] - t.center[1];
      r2 += d1 * d1;
    }
    s += t.amp * std::pow(4.0 * M_PI * t.width, 0.5 * f.dim) * dh_kernel_r2(t.width + h, r2, f.dim, m);
  }
  return s;
}

SampledField dh_m(const GaussianMix& f, double h, int m, const GridSpec& g) {
  if (f.dim != g.dim()) throw InvalidInput("function and grid dimensions differ");
  check_h(h);
  SampledField out(g);
  for (std::size_t k = 0; k < g.size(); ++k) out.values[k] = dh_m_value(f, h, m, g.point(k));
  return out;
}

double resolution_threshold(const GridSpec& g) { return g.spacing() * g.spacing(); }

namespace {

struct RealBuf {
  double* p = nullptr;
  explicit RealBuf(std::size_t n) : p(fftw_alloc_real(n)) { std::memset(p, 0, n * sizeof(double)); }
  ~RealBuf() { fftw_free(p); }
  RealBuf(const RealBuf&) = delete;
  RealBuf& operator=(const RealBuf&) = delete;
};

struct CplxBuf {
  fftw_complex* p = nullptr;
  std::size_t n = 0;
  explicit CplxBuf(std::size_t n_) : p(fftw_alloc_complex(n_)), n(n_) {}
  ~CplxBuf() { fftw_free(p); }
  CplxBuf(const CplxBuf&) = delete;
  CplxBuf& operator=(const CplxBuf&) = delete;
};

// Plans are created once per shape under a lock; execution with the new-array
// interface is thread safe.
fftw_plan get_plan(int dim, std::size_t M, bool forward) {
  static std::mutex mu;
  static std::map<std::tuple<int, std::size_t, bool>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(dim, M, forward);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::size_t nreal = dim == 1 ? M : M * M;
  std::size_t ncplx = dim == 1 ? M / 2 + 1 : M * (M / 2 + 1);
  RealBuf r(nreal);
  CplxBuf c(ncplx);
  int Mi = static_cast<int>(M);
  fftw_plan plan;
  if (dim == 1) {
    plan = forward ? fftw_plan_dft_r2c_1d(Mi, r.p, c.p, FFTW_ESTIMATE)
                   : fftw_plan_dft_c2r_1d(Mi, c.p, r.p, FFTW_ESTIMATE);
  } else {
    plan = forward ? fftw_plan_dft_r2c_2d(Mi, Mi, r.p, c.p, FFTW_ESTIMATE)
                   : fftw_plan_dft_c2r_2d(Mi, Mi, c.p, r.p, FFTW_ESTIMATE);
  }
  cache.emplace(key, plan);
  return plan;
}

// d^j/dh^j of the integral of the 1D kernel over [a, b].
double cell_kernel_1d(double h, double a, double b, int j) {
  const double s4h = std::sqrt(4.0 * h);
  if (j == 0) {
    if (a >= 0.0) return 0.5 * (std::erfc(a / s4h) - std::erfc(b / s4h));
    if (b <= 0.0) return 0.5 * (std::erfc(-b / s4h) - std::erfc(-a / s4h));
    return 0.5 * (std::erf(b / s4h) - std::erf(a / s4h));
  }
  // heat equation: d_h of the cell mass is the flux [d_y^{2j-1} p_h]_a^b
  const int k = 2 * j - 1;
  auto dy = [&](double y) {
    double s = y / s4h;
    if (s * s > 700.0) return 0.0;
    return std::pow(4.0 * M_PI * h, -0.5) * (k % 2 ? -1.0 : 1.0) * std::pow(s4h, -k) * hermite(k, s) *
           std::exp(-s * s);
  };
  return dy(b) - dy(a);
}

}  // namespace

struct Convolver::Impl {
  std::size_t N = 0, M = 0;
  int dim = 1;
  std::unique_ptr<CplxBuf> spec;
  bool zero = true;

  std::size_t nreal() const { return dim == 1 ? M : M * M; }
  std::size_t ncplx() const { return dim == 1 ? M / 2 + 1 : M * (M / 2 + 1); }
  long offset(std::size_t i) const {
    return i <= M / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(M);
  }
};

Convolver::Convolver(const SampledField& f) : g_(f.grid), impl_(std::make_unique<Impl>()) {
  auto& I = *impl_;
  I.N = g_.points_per_axis();
  I.M = 2 * I.N;
  I.dim = g_.dim();
  RealBuf in(I.nreal());
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    double v = f.values[k];
    if (v != 0.0) I.zero = false;
    if (I.dim == 1) {
      in.p[k] = v;
    } else {
      std::size_t i = k / I.N, j = k % I.N;
      in.p[i * I.M + j] = v;
    }
  }
  I.spec = std::make_unique<CplxBuf>(I.ncplx());
  fftw_execute_dft_r2c(get_plan(I.dim, I.M, true), in.p, I.spec->p);
}

Convolver::~Convolver() = default;

SampledField Convolver::dh(double h, int m) const {
  check_h(h);
  if (m < 0) throw InvalidInput("derivative order must be >= 0");
  const auto& I = *impl_;
  SampledField out(g_);
  if (I.zero) return out;
  const double d = g_.spacing();
  const int n = I.dim;
  RealBuf ker(I.nreal());
  if (h >= resolution_threshold(g_)) {
    const double w = g_.cell_measure();
    if (n == 1) {
      for (std::size_t i = 0; i < I.M; ++i) {
        double y = I.offset(i) * d;
        ker.p[i] = dh_kernel_r2(h, y * y, 1, m) * w;
      }
    } else {
      for (std::size_t i = 0; i < I.M; ++i) {
        double yi = I.offset(i) * d;
        for (std::size_t j = 0; j < I.M; ++j) {
          double yj = I.offset(j) * d;
          ker.p[i * I.M + j] = dh_kernel_r2(h, yi * yi + yj * yj, 2, m) * w;
        }
      }
    }
  } else {
    // per-axis cell masses and their h-derivatives; 2D by Leibniz on the product
    std::vector<std::vector<double>> c(m + 1, std::vector<double>(I.M));
    for (int j = 0; j <= m; ++j)
      for (std::size_t i = 0; i < I.M; ++i) {
        double y = I.offset(i) * d;
        c[j][i] = cell_kernel_1d(h, y - 0.5 * d, y + 0.5 * d, j);
      }
    if (n == 1) {
      for (std::size_t i = 0; i < I.M; ++i) ker.p[i] = c[m][i];
    } else {
      for (std::size_t i = 0; i < I.M; ++i)
        for (std::size_t l = 0; l < I.M; ++l) {
          double s = 0.0;
          for (int j = 0; j <= m; ++j) s += binom(m, j) * c[j][i] * c[m - j][l];
          ker.p[i * I.M + l] = s;
        }
    }
  }
  CplxBuf ks(I.ncplx());
  fftw_execute_dft_r2c(get_plan(n, I.M, true), ker.p, ks.p);
  for (std::size_t k = 0; k < I.ncplx(); ++k) {
    double ar = ks.p[k][0], ai = ks.p[k][1];
    double br = I.spec->p[k][0], bi = I.spec->p[k][1];
    ks.p[k][0] = ar * br - ai * bi;
    ks.p[k][1] = ar * bi + ai * br;
  }
  fftw_execute_dft_c2r(get_plan(n, I.M, false), ks.p, ker.p);
  const double norm = 1.0 / static_cast<double>(I.nreal());
  if (n == 1) {
    for (std::size_t i = 0; i < I.N; ++i) out.values[i] = ker.p[i] * norm;
  } else {
    for (std::size_t i = 0; i < I.N; ++i)
      for (std::size_t j = 0; j < I.N; ++j) out.values[i * I.N + j] = ker.p[i * I.M + j] * norm;
  }
  return out;
}

SampledField apply(const SampledField& f, double h) { return Convolver(f).dh(h, 0); }

SampledField dh_m(const SampledField& f, double h, int m) {
  if (m < 1) throw InvalidInput("dh_m needs m >= 1");
  return Convolver(f).dh(h, m);
}

SampledField reconstruct(const SampledField& f, int m, double hmin, double hmax, int nodes, UpperTail tail) {
  if (m < 1) throw InvalidInput("reconstruction needs m >= 1");
  if (!(hmin > 0.0) || !(hmax > hmin)) throw InvalidInput("need 0 < hmin < hmax");
  if (nodes < 2) throw InvalidInput("need at least two nodes");
  Convolver conv(f);
  SampledField acc(f.grid);
  const double du = std::log(hmax / hmin) / (nodes - 1);
  const double pref = ((m % 2) ? -1.0 : 1.0) / factorial(m - 1);
  for (int k = 0; k < nodes; ++k) {
    double h = hmin * std::exp(k * du);
    if (k == nodes - 1) h = hmax;
    double w = du * ((k == 0 || k == nodes - 1) ? 0.5 : 1.0) * std::pow(h, m) * pref;
    SampledField d = conv.dh(h, m);
    for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += w * d.values[i];
  }
  if (tail == UpperTail::by_parts) {
    // integral_b^inf h^{m-1} d^m P = sum_k (-1)^{k+1} (m-1)!/(m-1-k)! b^{m-1-k} d^{m-1-k} P_b
    for (int k = 0; k < m; ++k) {
      int j = m - 1 - k;
      double c = pref * ((k % 2) ? 1.0 : -1.0) * factorial(m - 1) / factorial(j) * std::pow(hmax, j);
      SampledField d = conv.dh(hmax, j);
      for (std::size_t i = 0; i < acc.values.size(); ++i) acc.values[i] += c * d.values[i];
    }
  }
  return acc;
}

}  // namespace gnforge::heat
