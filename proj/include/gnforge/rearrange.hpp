#pragma once

#include <ostream>
#include <span>
#include <vector>

#include "gnforge/funcspace.hpp"

namespace gnforge {

// Nonincreasing left-continuous step function on (0, inf):
// value v_j on (t_{j-1}, t_j] with t_0 = 0, zero beyond t_M.
class StepProfile {
 public:
  StepProfile() = default;
  StepProfile(std::vector<double> breakpoints, std::vector<double> values);

  std::size_t size() const { return t_.size(); }
  bool empty() const { return t_.empty(); }
  const std::vector<double>& breakpoints() const { return t_; }
  const std::vector<double>& values() const { return v_; }

  double operator()(double t) const;  // left-continuous value
  double right_limit(double t) const;
  double measure_above(double y) const;  // |{t : profile(t) > y}|
  double integral() const;               // integral over (0, inf)
  double support_end() const { return t_.empty() ? 0.0 : t_.back(); }

 private:
  std::vector<double> t_, v_;
};

// t -> (1/t) * integral_0^t base, exact on steps.
class AveragedProfile {
 public:
  explicit AveragedProfile(StepProfile base);
  double operator()(double t) const;
  double integral_to(double t) const;
  const StepProfile& base() const { return base_; }

 private:
  StepProfile base_;
  std::vector<double> cum_;  // cum_[j] = integral up to t_j
};

// y -> lambda_f(y); evaluate with right_limit to get |{|f| > y}| exactly.
StepProfile distribution(const SampledField& f);
StepProfile rearrangement(const SampledField& f);
// Rearrangement of a bag of cell values each carrying measure cell_measure.
StepProfile rearrangement_of_values(std::span<const double> values, double cell_measure);
AveragedProfile double_star(const StepProfile& fstar);
double hardy_littlewood_sup(const SampledField& f, double t);

// Cell-aligned t grid: t = k * cell_measure for k on a roughly geometric integer ladder.
std::vector<double> cell_aligned_times(const GridSpec& g, std::size_t count, double t_max = -1.0);

void write_csv(std::ostream& os, const StepProfile& p);

}  // namespace gnforge
