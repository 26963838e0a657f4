#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gnforge/rearrange.hpp"

namespace gnforge {

struct LorentzIndex {
  double p;
  double r;
  LorentzIndex(double p_, double r_);
};

double lorentz_norm(const StepProfile& fstar, const LorentzIndex& idx);
double lorentz_norm_via_distribution(const StepProfile& lambda, const LorentzIndex& idx);

// hi^a - lo^a for 0 <= lo < hi, a > 0, without cancellation.
double pow_diff(double a, double lo, double hi);

using CellSet = std::vector<std::size_t>;  // flat cell indices, sorted

struct DisjointFamily {
  std::vector<int> indices;  // J, increasing
  std::vector<CellSet> sets;
  DisjointFamily(const GridSpec& g, std::vector<int> idx, std::vector<CellSet> sets);
  std::vector<double> tail_measures(const GridSpec& g) const;  // mu_j
};

struct OverlapFamily {
  std::vector<int> indices;  // increasing
  std::vector<CellSet> sets;
  int overlap = 1;  // N
  OverlapFamily(const GridSpec& g, std::vector<int> idx, std::vector<CellSet> sets, int overlap);
};

struct LemmaCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

LemmaCheck check_disjoint_lemma(const SampledField& f, const DisjointFamily& fam, double p, double q);
LemmaCheck check_overlap_lemma(const SampledField& f, const OverlapFamily& fam, double p, double q);

// Randomised families built from contiguous runs of flat cell indices.
DisjointFamily random_disjoint_family(const GridSpec& g, std::mt19937_64& rng, int count);
OverlapFamily random_overlap_family(const GridSpec& g, std::mt19937_64& rng, int count, int overlap);

}  // namespace gnforge
