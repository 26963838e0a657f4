#pragma once

#include <vector>

namespace gnforge {

std::vector<double> log_grid(double lo, double hi, int nodes);

// integral over [t0, t1] of g(u) du/u with g taken as C u^b through both endpoints;
// falls back to the log-trapezoid when an endpoint value is zero.
double power_cell_integral(double t0, double t1, double g0, double g1);

// log-slope of g on the cell [t0, t1]; 0 when undefined
double cell_exponent(double t0, double t1, double g0, double g1);

// Sum of power_cell_integral over consecutive nodes.
double power_integral(const std::vector<double>& t, const std::vector<double>& g);

}  // namespace gnforge
