#include "gnforge/logquad.hpp"

#include <cmath>

#include "gnforge/errors.hpp"

namespace gnforge {

std::vector<double> log_grid(double lo, double hi, int nodes) {
  if (!(lo > 0.0) || !(hi > lo) || nodes < 2) throw InvalidInput("log grid needs 0 < lo < hi and >= 2 nodes");
  std::vector<double> t(nodes);
  const double du = std::log(hi / lo) / (nodes - 1);
  for (int k = 0; k < nodes; ++k) t[k] = lo * std::exp(k * du);
  t.back() = hi;
  return t;
}

double cell_exponent(double t0, double t1, double g0, double g1) {
  if (!(g0 > 0.0) || !(g1 > 0.0)) return 0.0;
  return std::log(g1 / g0) / std::log(t1 / t0);
}

double power_cell_integral(double t0, double t1, double g0, double g1) {
  const double L = std::log(t1 / t0);
  if (!(g0 > 0.0) || !(g1 > 0.0)) return 0.5 * (g0 + g1) * L;
  const double x = std::log(g1 / g0);  // = b L
  if (std::abs(x) < 1e-8) return g0 * L * (1.0 + 0.5 * x + x * x / 6.0);
  return (g1 - g0) * L / x;
}

double power_integral(const std::vector<double>& t, const std::vector<double>& g) {
  double s = 0.0;
  for (std::size_t k = 1; k < t.size(); ++k) s += power_cell_integral(t[k - 1], t[k], g[k - 1], g[k]);
  return s;
}

}  // namespace gnforge
