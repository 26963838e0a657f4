#pragma once

#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnforge/funcspace.hpp"

namespace gnforge {

struct Clause {
  std::string name;
  double margin = 0.0;  // >= 0 when the clause holds
  bool holds = false;
};

struct Certificate {
  std::string lemma;
  std::string digest;
  std::vector<Clause> clauses;
  bool holds() const;
  nlohmann::json to_json() const;
};

// 64-bit FNV-1a of the compact dump, hex
std::string inputs_digest(const nlohmann::json& inputs);

// ---- sequence majorization

struct DiscreteSeq {
  int k_lo = 0;
  std::vector<double> alpha;  // alpha[i] is the value at k_lo + i; zero elsewhere
  double delta = 1.0;
  int k_hi() const { return k_lo + static_cast<int>(alpha.size()) - 1; }
  double at(int k) const;
};

struct MajorizedSeq {
  int k_lo = 0;
  std::vector<double> beta;  // on the extended window
  double delta = 1.0;
  double left_tail = 0.0;   // closed-form sum of beta_k for k < k_lo
  double right_tail = 0.0;  // and for k > k_hi
  int k_hi() const { return k_lo + static_cast<int>(beta.size()) - 1; }
  double at(int k) const;  // geometric continuation outside the window
  double sum() const;
  Certificate certificate;
};

MajorizedSeq seq_majorize(const DiscreteSeq& a);

// ---- envelope

enum class EnvelopeClass {
  increasing,  // t^gamma phi nondecreasing
  decreasing   // t^-gamma phi nonincreasing
};

struct EnvelopeProblem {
  std::vector<double> t;  // increasing, log-spaced
  std::vector<double> phi;
  double gamma = 1.0;
  double delta = 1.0;
  double q = 1.0;  // (0, inf]
  EnvelopeClass cls = EnvelopeClass::increasing;
};

struct EnvelopeResult {
  std::vector<double> phi_tilde;  // on prob.t
  double norm_phi = 0.0;          // L^q(dt/t), power-law tails included
  double norm_tilde = 0.0;
  double constant = 1.0;          // (2(1+gamma/delta))^{1/q}, 1 for q = inf
  Certificate certificate;
};

EnvelopeResult envelope(const EnvelopeProblem& prob);

// Random admissible phi on the given grid for the declared class.
std::vector<double> random_envelope_input(const std::vector<double>& t, double gamma, EnvelopeClass cls,
                                          std::mt19937_64& rng);

// ---- balance point z(t) = psi^{-1}(phi(t))

enum class PhiShape {
  power_decreasing,  // t^alpha phi nonincreasing
  power_increasing   // t^-alpha phi nondecreasing
};

struct BalancePointResult {
  std::vector<double> z;  // on the phi grid
  double min_margin = 0.0;  // min over interior t of (|z'|/z)(1+1e-3) t beta/alpha - 1
  Certificate certificate;
};

BalancePointResult balance_point(const std::vector<double>& t, const std::vector<double>& phi, PhiShape shape,
                                 const std::vector<double>& zgrid, const std::vector<double>& psi, double alpha,
                                 double beta);

// ---- balancing infimum

enum class BalanceCase { i, ii, iii };

struct BalanceProblem {
  BalanceCase c = BalanceCase::i;
  double rho = 1.0;
  double sigma = -1.0;
  double p1 = 1.0, p2 = 2.0, q1 = 1.0, q2 = 1.0;
  std::vector<double> z1, phi1;  // phi_1 on its log grid
  std::vector<double> z2, phi2;

  double theta() const { return rho / (rho - sigma); }
  double p() const;
  double q() const;
};

struct BalanceResult {
  std::vector<double> t, f;
  double norm_f = 0.0;  // Lorentz (p, q)
  double norm_phi1 = 0.0, norm_phi2 = 0.0;
  double ratio = 0.0;
};

BalanceResult balance_inf(const BalanceProblem& prob, const std::vector<double>& tgrid);

// L^q(dt/t) norm of samples on a log grid, per-cell power fits plus power-law tails.
double log_lq_norm(const std::vector<double>& t, const std::vector<double>& v, double q);

// ---- semigroup estimates

// 2 pi^{-n/2} integral |v| exp(-|v|^2) dv
double pseudo_poincare_constant(int n);

struct PoincareResult {
  double max_ratio = 0.0;
  double c_n = 0.0;
  bool holds = false;
  std::vector<double> t, ratio;
  Certificate certificate;
};

// (f - P_h f)**(t) <= c_n sqrt(h) (grad f)**(t) on the t grid (cell-aligned times by default).
PoincareResult pseudo_poincare(const AnalyticFunction& f, double h, const GridSpec& g,
                               std::vector<double> tgrid = {});

struct SmoothingResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  Certificate certificate;
};

// ||P_h f||_inf <= (4 pi h)^{-n/(2q)} (q')^{-n/(2q')} ||f||_q
SmoothingResult smoothing_bound(const SampledField& f, double h, double q);

struct StarComparison {
  double max_ratio = 0.0;  // max over t of (P_h f)**(t) / f**(t)
  bool holds = false;
};

// (P_h f)** <= f** at cell-aligned t; the field is zero-extended so that P_h f stays in the box.
StarComparison smoothing_double_star(const SampledField& f, double h, std::size_t count = 100);

}  // namespace gnforge
