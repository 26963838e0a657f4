#include "gnforge/lorentz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gnforge {

LorentzIndex::LorentzIndex(double p_, double r_) : p(p_), r(r_) {
  if (!(p > 0.0) || !(r > 0.0)) throw UnsupportedIndex("Lorentz indices must be positive");
  if (std::isinf(p) && !std::isinf(r)) throw UnsupportedIndex("p = inf is only admitted with r = inf");
}

double pow_diff(double a, double lo, double hi) {
  if (lo <= 0.0) return std::pow(hi, a);
  return std::pow(lo, a) * std::expm1(a * std::log1p((hi - lo) / lo));
}

namespace {

// log of (hi^a - lo^a)
double log_pow_diff(double a, double lo, double hi) {
  if (lo <= 0.0) return a * std::log(hi);
  return a * std::log(lo) + std::log(std::expm1(a * std::log1p((hi - lo) / lo)));
}

double log_sum_exp(const std::vector<double>& x) {
  if (x.empty()) return -kInf;
  double m = *std::max_element(x.begin(), x.end());
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

}  // namespace

double lorentz_norm(const StepProfile& fstar, const LorentzIndex& idx) {
  if (fstar.empty()) return 0.0;
  const auto& t = fstar.breakpoints();
  const auto& v = fstar.values();
  if (std::isinf(idx.p)) return v.front();
  if (std::isinf(idx.r)) {
    double best = 0.0;
    for (std::size_t j = 0; j < t.size(); ++j) best = std::max(best, std::pow(t[j], 1.0 / idx.p) * v[j]);
    return best;
  }
  // sum_j v_j^r (p/r) (t_j^{r/p} - t_{j-1}^{r/p}), accumulated in log space
  const double a = idx.r / idx.p;
  std::vector<double> logs;
  logs.reserve(t.size());
  double prev = 0.0;
  for (std::size_t j = 0; j < t.size(); ++j) {
    if (v[j] > 0.0) logs.push_back(idx.r * std::log(v[j]) + log_pow_diff(a, prev, t[j]));
    prev = t[j];
  }
  double lse = log_sum_exp(logs) + std::log(idx.p / idx.r);
  double out = std::exp(lse / idx.r);
  if (!std::isfinite(out)) throw NonIntegrable("Lorentz integral overflowed");
  return out;
}

double lorentz_norm_via_distribution(const StepProfile& lambda, const LorentzIndex& idx) {
  if (std::isinf(idx.p) || std::isinf(idx.r))
    throw UnsupportedIndex("distribution form needs finite p and r");
  if (lambda.empty()) return 0.0;
  // p * sum_i lambda_i^{r/p} (y_i^r - y_{i-1}^r) / r
  const auto& y = lambda.breakpoints();
  const auto& l = lambda.values();
  std::vector<double> logs;
  logs.reserve(y.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (l[i] > 0.0) logs.push_back((idx.r / idx.p) * std::log(l[i]) + log_pow_diff(idx.r, prev, y[i]));
    prev = y[i];
  }
  double lse = log_sum_exp(logs) + std::log(idx.p / idx.r);
  double out = std::exp(lse / idx.r);
  if (!std::isfinite(out)) throw NonIntegrable("Lorentz integral overflowed");
  return out;
}

namespace {

void check_sets(const GridSpec& g, const std::vector<CellSet>& sets) {
  for (const auto& s : sets) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (s[k] >= g.size()) throw InvalidInput("cell index outside the grid");
      if (k && s[k] <= s[k - 1]) throw InvalidInput("cell sets must be sorted without repeats");
    }
  }
}

bool intersects(const CellSet& a, const CellSet& b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return true;
    if (a[i] < b[j]) ++i;
    else ++j;
  }
  return false;
}

void check_indices(const std::vector<int>& idx, std::size_t nsets) {
  if (idx.size() != nsets) throw InvalidInput("family index count differs from set count");
  for (std::size_t k = 1; k < idx.size(); ++k)
    if (idx[k] <= idx[k - 1]) throw InvalidInput("family indices must increase");
}

std::vector<double> restricted_values(const SampledField& f, const CellSet& s) {
  std::vector<double> v;
  v.reserve(s.size());
  for (auto k : s) v.push_back(f.values[k]);
  return v;
}

}  // namespace

DisjointFamily::DisjointFamily(const GridSpec& g, std::vector<int> idx, std::vector<CellSet> s)
    : indices(std::move(idx)), sets(std::move(s)) {
  check_indices(indices, sets.size());
  check_sets(g, sets);
  for (std::size_t a = 0; a < sets.size(); ++a)
    for (std::size_t b = a + 1; b < sets.size(); ++b)
      if (intersects(sets[a], sets[b])) throw InvalidInput("disjoint family has overlapping sets");
  for (double mu : tail_measures(g))
    if (!(mu > 0.0)) throw InvalidInput("tail measures must be positive");
}

std::vector<double> DisjointFamily::tail_measures(const GridSpec& g) const {
  std::vector<double> mu(sets.size());
  std::size_t count = 0;
  for (std::size_t k = sets.size(); k-- > 0;) {
    count += sets[k].size();
    mu[k] = static_cast<double>(count) * g.cell_measure();
  }
  return mu;
}

OverlapFamily::OverlapFamily(const GridSpec& g, std::vector<int> idx, std::vector<CellSet> s, int n)
    : indices(std::move(idx)), sets(std::move(s)), overlap(n) {
  if (overlap < 1) throw InvalidInput("overlap bound must be positive");
  check_indices(indices, sets.size());
  check_sets(g, sets);
  for (std::size_t a = 0; a < sets.size(); ++a) {
    if (sets[a].empty()) continue;
    for (std::size_t b = a + 1; b < sets.size(); ++b) {
      if (sets[b].empty()) continue;
      if (std::abs(indices[b] - indices[a]) >= overlap && intersects(sets[a], sets[b]))
        throw InvalidInput("sets with |j-k| >= N intersect");
    }
  }
}

LemmaCheck check_disjoint_lemma(const SampledField& f, const DisjointFamily& fam, double p, double q) {
  if (!(q >= 1.0) || !(q <= p) || !std::isfinite(p)) throw IndexViolation("disjoint-set check needs 1 <= q <= p < inf");
  auto mu = fam.tail_measures(f.grid);
  const double cm = f.grid.cell_measure();
  LemmaCheck out;
  for (std::size_t j = 0; j < fam.sets.size(); ++j) {
    double s = 0.0;
    for (auto k : fam.sets[j]) s += std::pow(std::abs(f.values[k]), q);
    out.lhs += std::pow(mu[j], q / p - 1.0) * s * cm;
  }
  // The argument bounds the left side by integral u^{q/p-1} f*(u)^q du, i.e. the Lorentz
  // quasinorm with primary index p and secondary index q.
  out.rhs = std::pow(lorentz_norm(rearrangement(f), LorentzIndex(p, q)), q);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-10);
  return out;
}

LemmaCheck check_overlap_lemma(const SampledField& f, const OverlapFamily& fam, double p, double q) {
  if (!(p > 1.0) || !(p <= q) || !std::isfinite(q)) throw IndexViolation("overlap check needs 1 < p <= q < inf");
  const double cm = f.grid.cell_measure();
  const LorentzIndex idx(p, q);
  LemmaCheck out;
  for (const auto& s : fam.sets) {
    if (s.empty()) continue;
    auto v = restricted_values(f, s);
    out.lhs += std::pow(lorentz_norm(rearrangement_of_values(v, cm), idx), q);
  }
  out.rhs = std::pow(static_cast<double>(fam.overlap), q / p) * std::pow(lorentz_norm(rearrangement(f), idx), q);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-10);
  return out;
}

namespace {

CellSet run(std::size_t a, std::size_t b) {
  CellSet s(b - a);
  std::iota(s.begin(), s.end(), a);
  return s;
}

// count+1 sorted cut points in [0, size]
std::vector<std::size_t> cuts(std::size_t size, std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<std::size_t> u(0, size);
  std::vector<std::size_t> c(count + 1);
  for (auto& x : c) x = u(rng);
  std::sort(c.begin(), c.end());
  return c;
}

}  // namespace

DisjointFamily random_disjoint_family(const GridSpec& g, std::mt19937_64& rng, int count) {
  if (count < 1) throw InvalidInput("family needs at least one set");
  const std::size_t size = g.size();
  for (;;) {
    auto c = cuts(size, rng, 2 * count);
    std::vector<CellSet> sets;
    // sets take alternate gaps, so unions of runs stay disjoint; order is shuffled
    for (int j = 0; j < count; ++j) sets.push_back(run(c[2 * j], c[2 * j + 1]));
    std::shuffle(sets.begin(), sets.end(), rng);
    if (sets.back().empty()) continue;
    std::uniform_int_distribution<int> start(-5, 5);
    std::vector<int> idx(count);
    int k0 = start(rng);
    for (int j = 0; j < count; ++j) idx[j] = k0 + 2 * j;
    return DisjointFamily(g, std::move(idx), std::move(sets));
  }
}

OverlapFamily random_overlap_family(const GridSpec& g, std::mt19937_64& rng, int count, int overlap) {
  if (count < 1 || overlap < 1) throw InvalidInput("family needs count >= 1 and overlap >= 1");
  const std::size_t size = g.size();
  // starts s_0 <= ... <= s_{count+overlap-1}; E_j is a run inside [s_j, s_{j+N})
  auto s = cuts(size, rng, count + overlap - 1);
  std::vector<CellSet> sets;
  for (int j = 0; j < count; ++j) {
    std::size_t a = s[j], b = s[j + overlap];
    std::uniform_int_distribution<std::size_t> end(a, b);
    sets.push_back(run(a, end(rng)));
  }
  std::vector<int> idx(count);
  std::iota(idx.begin(), idx.end(), 0);
  return OverlapFamily(g, std::move(idx), std::move(sets), overlap);
}

}  // namespace gnforge
