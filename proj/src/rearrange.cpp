#include "gnforge/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace gnforge {

StepProfile::StepProfile(std::vector<double> breakpoints, std::vector<double> values)
    : t_(std::move(breakpoints)), v_(std::move(values)) {
  if (t_.size() != v_.size()) throw InvalidInput("profile breakpoints and values differ in length");
  for (std::size_t j = 0; j < t_.size(); ++j) {
    if (!(t_[j] > (j ? t_[j - 1] : 0.0))) throw InvalidInput("profile breakpoints must increase strictly from 0");
    if (!(v_[j] >= 0.0) || !std::isfinite(v_[j])) throw InvalidInput("profile values must be finite and >= 0");
    if (j && v_[j] > v_[j - 1]) throw InvalidInput("profile values must be nonincreasing");
  }
}

double StepProfile::operator()(double t) const {
  if (t <= 0.0) return v_.empty() ? 0.0 : v_.front();
  auto it = std::lower_bound(t_.begin(), t_.end(), t);  // first t_j >= t
  return it == t_.end() ? 0.0 : v_[it - t_.begin()];
}

double StepProfile::right_limit(double t) const {
  auto it = std::upper_bound(t_.begin(), t_.end(), t);  // first t_j > t
  return it == t_.end() ? 0.0 : v_[it - t_.begin()];
}

double StepProfile::measure_above(double y) const {
  // values are nonincreasing: the set is (0, t_J] with J the last index having v_J > y
  auto it = std::partition_point(v_.begin(), v_.end(), [y](double v) { return v > y; });
  std::size_t k = it - v_.begin();
  return k == 0 ? 0.0 : t_[k - 1];
}

double StepProfile::integral() const {
  double s = 0.0, prev = 0.0;
  for (std::size_t j = 0; j < t_.size(); ++j) {
    s += v_[j] * (t_[j] - prev);
    prev = t_[j];
  }
  return s;
}

AveragedProfile::AveragedProfile(StepProfile base) : base_(std::move(base)) {
  const auto& t = base_.breakpoints();
  const auto& v = base_.values();
  cum_.resize(t.size());
  double s = 0.0, prev = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    s += v[j] * (t[j] - prev);
    cum_[j] = s;
    prev = t[j];
  }
}

double AveragedProfile::integral_to(double t) const {
  if (t <= 0.0 || base_.empty()) return 0.0;
  const auto& bp = base_.breakpoints();
  auto it = std::lower_bound(bp.begin(), bp.end(), t);
  if (it == bp.end()) return cum_.back();
  std::size_t j = it - bp.begin();
  double left = j ? bp[j - 1] : 0.0;
  double before = j ? cum_[j - 1] : 0.0;
  return before + base_.values()[j] * (t - left);
}

double AveragedProfile::operator()(double t) const {
  if (t <= 0.0) return base_(0.0);
  return integral_to(t) / t;
}

StepProfile rearrangement_of_values(std::span<const double> values, double cell_measure) {
  std::vector<double> a;
  a.reserve(values.size());
  for (double v : values) {
    double x = std::abs(v);
    if (x > 0.0) a.push_back(x);
  }
  std::sort(a.begin(), a.end(), std::greater<double>());
  std::vector<double> t, v;
  for (std::size_t k = 0; k < a.size(); ++k) {
    // ties merge into one step ending at the last tied cell
    if (k + 1 < a.size() && a[k + 1] == a[k]) continue;
    t.push_back(static_cast<double>(k + 1) * cell_measure);
    v.push_back(a[k]);
  }
  return StepProfile(std::move(t), std::move(v));
}

StepProfile rearrangement(const SampledField& f) {
  return rearrangement_of_values(f.values, f.grid.cell_measure());
}

StepProfile distribution(const SampledField& f) {
  StepProfile fs = rearrangement(f);
  // f* has steps (t_j, w_j) with w descending; lambda on (w_{j+1}, w_j] equals t_j.
  const auto& t = fs.breakpoints();
  const auto& w = fs.values();
  std::vector<double> y(w.rbegin(), w.rend());
  std::vector<double> lam(t.rbegin(), t.rend());
  return StepProfile(std::move(y), std::move(lam));
}

AveragedProfile double_star(const StepProfile& fstar) { return AveragedProfile(fstar); }

double hardy_littlewood_sup(const SampledField& f, double t) {
  const double box = f.grid.box_measure();
  if (t > box * (1.0 + 1e-12)) throw DomainExceeded("t exceeds the box measure");
  if (t <= 0.0) return 0.0;
  const double cm = f.grid.cell_measure();
  std::vector<double> a(f.values.size());
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = std::abs(f.values[k]);
  std::sort(a.begin(), a.end(), std::greater<double>());
  double whole = std::floor(t / cm);
  std::size_t kfull = std::min<std::size_t>(static_cast<std::size_t>(whole), a.size());
  double s = 0.0;
  for (std::size_t k = 0; k < kfull; ++k) s += a[k] * cm;
  double frac = t - static_cast<double>(kfull) * cm;
  if (kfull < a.size() && frac > 0.0) s += a[kfull] * frac;
  return s;
}

std::vector<double> cell_aligned_times(const GridSpec& g, std::size_t count, double t_max) {
  const double cm = g.cell_measure();
  std::size_t kmax = g.size();
  if (t_max > 0.0) kmax = std::min<std::size_t>(kmax, static_cast<std::size_t>(std::floor(t_max / cm)));
  std::set<std::size_t> ks;
  if (kmax == 0) return {};
  double ratio = std::pow(static_cast<double>(kmax), 1.0 / std::max<std::size_t>(1, count - 1));
  double k = 1.0;
  for (std::size_t i = 0; i < count; ++i) {
    ks.insert(std::min<std::size_t>(kmax, static_cast<std::size_t>(std::llround(k))));
    k *= ratio;
  }
  ks.insert(kmax);
  std::vector<double> out;
  for (auto kk : ks) out.push_back(static_cast<double>(kk) * cm);
  return out;
}

void write_csv(std::ostream& os, const StepProfile& p) {
  os << "t,value\n";
  os.precision(17);
  for (std::size_t j = 0; j < p.size(); ++j) os << p.breakpoints()[j] << ',' << p.values()[j] << '\n';
}

}  // namespace gnforge
