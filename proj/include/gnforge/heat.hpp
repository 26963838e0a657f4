#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "gnforge/funcspace.hpp"

namespace gnforge::heat {

// p_h(y) = (4 pi h)^{-n/2} exp(-|y|^2/(4h))
double kernel(double h, const Point& y, int n);
double kernel_r2(double h, double r2, int n);
// d^m/dh^m p_h at |y|^2 = r2 via the Laguerre form; m = 0 gives the kernel itself.
double dh_kernel_r2(double h, double r2, int n, int m);

// Generalised Laguerre L_m^alpha(u) by the three-term recurrence.
double laguerre(int m, double alpha, double u);

class LaguerrePoly {
 public:
  LaguerrePoly(int degree, double alpha);  // coefficients built by the recurrence
  int degree() const { return degree_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& coefficients() const { return c_; }  // ascending powers of u
  double operator()(double u) const;

 private:
  int degree_;
  double alpha_;
  std::vector<double> c_;
};

GaussianMix apply_analytic(const GaussianMix& f, double h);
AnalyticFunction apply_analytic(const AnalyticFunction& f, double h);

// d^m/dh^m P_h f at x for a mixture, m >= 0.
double dh_m_value(const GaussianMix& f, double h, int m, const Point& x);
SampledField dh_m(const GaussianMix& f, double h, int m, const GridSpec& g);

// Below h = spacing^2 a point-sampled kernel is unresolved; the cell-integrated kernel
// (exact for the field read as a simple function) is used there instead.
double resolution_threshold(const GridSpec& g);

// Zero-padded (factor 2) linear convolution of one field with heat kernels.
// The padded spectrum of the field is computed once.
class Convolver {
 public:
  explicit Convolver(const SampledField& f);
  ~Convolver();
  Convolver(const Convolver&) = delete;
  Convolver& operator=(const Convolver&) = delete;

  const GridSpec& grid() const { return g_; }
  // d^m/dh^m P_h f on the field's own grid (m = 0 gives P_h f).
  SampledField dh(double h, int m) const;

 private:
  struct Impl;
  GridSpec g_;
  std::unique_ptr<Impl> impl_;
};

SampledField apply(const SampledField& f, double h);
SampledField dh_m(const SampledField& f, double h, int m);

enum class UpperTail { by_parts, truncate };

// ((-1)^m/(m-1)!) * integral h^{m-1} d^m_h P_h f dh on log-spaced trapezoid nodes over
// [hmin, hmax]; the part beyond hmax is added in closed form by repeated integration by
// parts unless tail == truncate.
SampledField reconstruct(const SampledField& f, int m, double hmin, double hmax, int nodes,
                         UpperTail tail = UpperTail::by_parts);

}  // namespace gnforge::heat
