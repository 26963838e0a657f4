#include "gnforge/lemma_kit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>

#include "gnforge/heat.hpp"
#include "gnforge/rearrange.hpp"

namespace gnforge {

bool Certificate::holds() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const Clause& c) { return c.holds; });
}

namespace {

nlohmann::json finite_or_string(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

}  // namespace

nlohmann::json Certificate::to_json() const {
  nlohmann::json cl = nlohmann::json::array();
  for (const auto& c : clauses) cl.push_back({{"name", c.name}, {"margin", finite_or_string(c.margin)}, {"holds", c.holds}});
  return {{"lemma", lemma}, {"inputs-digest", digest}, {"clauses", cl}, {"holds", holds()}};
}

std::string inputs_digest(const nlohmann::json& inputs) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : inputs.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

// Neumaier-compensated sum
struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double x) {
    double t = s + x;
    if (std::abs(s) >= std::abs(x)) c += (s - t) + x;
    else c += (x - t) + s;
    s = t;
  }
  double value() const { return s + c; }
};

double log_add(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

// log of the integral over one log cell of width L of a power law through exp(la), exp(lb)
double log_cell(double la, double lb, double L) {
  if (la == -kInf || lb == -kInf) {
    double m = std::max(la, lb);
    return m == -kInf ? -kInf : m + std::log(0.5 * L);
  }
  double x = lb - la;
  if (std::abs(x) < 1e-8) return la + std::log(L) + std::log1p(0.5 * x);
  if (x > 0) return lb + std::log(L) + std::log(-std::expm1(-x) / x);
  return la + std::log(L) + std::log(std::expm1(x) / x);
}

// log of integral of exp(lv) dt/t over (0, t_0] given the first-cell slope b > 0
double log_left_tail(double lv0, double b) {
  if (lv0 == -kInf) return -kInf;
  if (!(b > 0.0)) throw TailDivergent("integrand does not decay as t -> 0");
  return lv0 - std::log(b);
}

double log_right_tail(double lvM, double b) {
  if (lvM == -kInf) return -kInf;
  if (!(b < 0.0)) throw TailDivergent("integrand does not decay as t -> inf");
  return lvM - std::log(-b);
}

double end_slope(double lt0, double lt1, double lv0, double lv1) {
  if (lv0 == -kInf || lv1 == -kInf) return 0.0;
  return (lv1 - lv0) / (lt1 - lt0);
}

// log of integral of exp(lv) dt/t over (0, inf): cells plus power-law tails
double log_integral(const std::vector<double>& lt, const std::vector<double>& lv) {
  const std::size_t M = lt.size();
  double acc = -kInf;
  for (std::size_t i = 1; i < M; ++i) acc = log_add(acc, log_cell(lv[i - 1], lv[i], lt[i] - lt[i - 1]));
  if (lv[0] != -kInf) acc = log_add(acc, log_left_tail(lv[0], end_slope(lt[0], lt[1], lv[0], lv[1])));
  if (lv[M - 1] != -kInf)
    acc = log_add(acc, log_right_tail(lv[M - 1], end_slope(lt[M - 2], lt[M - 1], lv[M - 2], lv[M - 1])));
  return acc;
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : -kInf; }

void check_log_grid(const std::vector<double>& t, const std::vector<double>& v, const char* what) {
  if (t.size() < 3 || t.size() != v.size()) throw InvalidInput(std::string(what) + ": need >= 3 matching samples");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !std::isfinite(t[i])) throw InvalidInput(std::string(what) + ": grid must be positive");
    if (i && !(t[i] > t[i - 1])) throw InvalidInput(std::string(what) + ": grid must increase");
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) throw InvalidInput(std::string(what) + ": samples must be finite and >= 0");
  }
}

}  // namespace

double log_lq_norm(const std::vector<double>& t, const std::vector<double>& v, double q) {
  check_log_grid(t, v, "log_lq_norm");
  if (std::isinf(q)) return *std::max_element(v.begin(), v.end());
  std::vector<double> lt(t.size()), lv(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    lt[i] = std::log(t[i]);
    lv[i] = q * safe_log(v[i]);
  }
  return std::exp(log_integral(lt, lv) / q);
}

// ---- sequence majorization

double DiscreteSeq::at(int k) const {
  if (k < k_lo || k > k_hi()) return 0.0;
  return alpha[k - k_lo];
}

double MajorizedSeq::at(int k) const {
  const double r = std::exp2(-delta);
  if (k < k_lo) return beta.front() * std::pow(r, k_lo - k);
  if (k > k_hi()) return beta.back() * std::pow(r, k - k_hi());
  return beta[k - k_lo];
}

double MajorizedSeq::sum() const {
  KahanSum s;
  for (double b : beta) s.add(b);
  s.add(left_tail);
  s.add(right_tail);
  return s.value();
}

MajorizedSeq seq_majorize(const DiscreteSeq& a) {
  if (!(a.delta > 0.0) || !std::isfinite(a.delta)) throw InvalidInput("delta must be positive");
  if (a.alpha.empty()) throw ZeroSequence("empty sequence");
  KahanSum tot;
  for (double x : a.alpha) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("sequence values must be finite and >= 0");
    tot.add(x);
  }
  const double total = tot.value();
  if (total == 0.0) throw ZeroSequence("all alpha_k vanish");

  const double r = std::exp2(-a.delta);
  const double one_minus_r = -std::expm1(-a.delta * M_LN2);
  const std::size_t n = a.alpha.size();
  std::vector<double> ap(n), b(n);
  for (std::size_t i = 0; i < n; ++i) ap[i] = (i ? r * ap[i - 1] : 0.0) + a.alpha[i];
  // beyond k_hi, alpha' decays like r^j, so beta_{k_hi} sums a geometric series in r^2
  b[n - 1] = ap[n - 1] / (one_minus_r * (1.0 + r));
  for (std::size_t i = n - 1; i-- > 0;) b[i] = ap[i] + r * b[i + 1];

  auto extension = [&](double edge) {
    if (edge <= 1e-15 * total) return 0;
    return static_cast<int>(std::ceil(std::log2(edge / (1e-15 * total)) / a.delta));
  };
  const int L = extension(b.front()), R = extension(b.back());

  MajorizedSeq out;
  out.delta = a.delta;
  out.k_lo = a.k_lo - L;
  out.beta.reserve(n + L + R);
  for (int j = L; j >= 1; --j) out.beta.push_back(b.front() * std::pow(r, j));
  out.beta.insert(out.beta.end(), b.begin(), b.end());
  for (int j = 1; j <= R; ++j) out.beta.push_back(b.back() * std::pow(r, j));
  out.left_tail = b.front() * std::pow(r, L + 1) / one_minus_r;
  out.right_tail = b.back() * std::pow(r, R + 1) / one_minus_r;

  Certificate& c = out.certificate;
  c.lemma = "sequence_majorization";
  c.digest = inputs_digest({{"k_lo", a.k_lo}, {"alpha", a.alpha}, {"delta", a.delta}});

  Clause dom{"beta_dominates_alpha", kInf, true};
  for (std::size_t i = 0; i < n; ++i) {
    double bi = b[i], ai = a.alpha[i];
    if (bi < ai) dom.holds = false;
    if (ai > 0.0) dom.margin = std::min(dom.margin, bi / ai - 1.0);
  }
  c.clauses.push_back(dom);

  const double expected = total / (one_minus_r * one_minus_r);
  const double rel = std::abs(out.sum() - expected) / expected;
  c.clauses.push_back({"sum_identity", 1e-12 - rel, rel <= 1e-12});

  // ratios are exact up to rounding of the recurrences: allow a few ulps
  Clause ratio{"ratio_bounds", kInf, true};
  for (std::size_t i = 0; i + 1 < out.beta.size(); ++i) {
    double q = out.beta[i + 1] / out.beta[i];
    double m = std::min(q / r - 1.0, 1.0 / (r * q) - 1.0);
    ratio.margin = std::min(ratio.margin, m);
    if (m < -1e-14) ratio.holds = false;
  }
  c.clauses.push_back(ratio);
  return out;
}

// ---- envelope

namespace {

struct LogSamples {
  std::vector<double> lt, lv;
};

// append power-law extensions beyond both ends (at most `efolds` each side)
LogSamples extend(const std::vector<double>& t, const std::vector<double>& v, double q, double efolds) {
  LogSamples s;
  const std::size_t M = t.size();
  std::vector<double> lt(M), lv(M);
  for (std::size_t i = 0; i < M; ++i) {
    lt[i] = std::log(t[i]);
    lv[i] = safe_log(v[i]);
  }
  double bl = end_slope(lt[0], lt[1], lv[0], lv[1]);
  double br = end_slope(lt[M - 2], lt[M - 1], lv[M - 2], lv[M - 1]);
  if (lv[0] != -kInf && !(q * bl > 0.0)) throw TailDivergent("phi^q is not integrable as t -> 0");
  if (lv[M - 1] != -kInf && !(q * br < 0.0)) throw TailDivergent("phi^q is not integrable as t -> inf");
  double dl = lt[1] - lt[0], dr = lt[M - 1] - lt[M - 2];
  auto cells = [&](double b, double d) {
    if (b == 0.0) return 0;
    double need = std::min(efolds, 45.0 / std::abs(q * b));
    return static_cast<int>(std::ceil(need / d));
  };
  int nl = lv[0] == -kInf ? 0 : cells(bl, dl);
  int nr = lv[M - 1] == -kInf ? 0 : cells(br, dr);
  for (int j = nl; j >= 1; --j) {
    s.lt.push_back(lt[0] - j * dl);
    s.lv.push_back(lv[0] - j * dl * bl);
  }
  s.lt.insert(s.lt.end(), lt.begin(), lt.end());
  s.lv.insert(s.lv.end(), lv.begin(), lv.end());
  for (int j = 1; j <= nr; ++j) {
    s.lt.push_back(lt[M - 1] + j * dr);
    s.lv.push_back(lv[M - 1] + j * dr * br);
  }
  return s;
}

// increasing class; returns log phi_tilde on the extended grid together with the offset of the data
struct EnvelopeCore {
  LogSamples ext;
  std::vector<double> lphit;
  std::size_t offset = 0;
};

EnvelopeCore envelope_increasing(const std::vector<double>& t, const std::vector<double>& phi, double gamma,
                                 double delta, double q) {
  EnvelopeCore core;
  core.ext = extend(t, phi, q, 200.0);
  const auto& lt = core.ext.lt;
  const auto& lv = core.ext.lv;
  const std::size_t M = lt.size();
  core.offset = static_cast<std::size_t>(std::find(lt.begin(), lt.end(), std::log(t[0])) - lt.begin());

  // J(t) = integral_t^inf phi^q u^{-delta q} du/u
  std::vector<double> lg(M), lJ(M);
  for (std::size_t i = 0; i < M; ++i) lg[i] = q * lv[i] - delta * q * lt[i];
  lJ[M - 1] = lg[M - 1] == -kInf ? -kInf : log_right_tail(lg[M - 1], end_slope(lt[M - 2], lt[M - 1], lg[M - 2], lg[M - 1]));
  for (std::size_t i = M - 1; i-- > 0;) lJ[i] = log_add(lJ[i + 1], log_cell(lg[i], lg[i + 1], lt[i + 1] - lt[i]));

  // phi_1^q = (delta+gamma) q t^{delta q} J;  k = phi_1^q t^{delta q}
  const double c1 = std::log((delta + gamma) * q);
  std::vector<double> lk(M), lK(M);
  for (std::size_t i = 0; i < M; ++i) lk[i] = c1 + 2.0 * delta * q * lt[i] + lJ[i];
  lK[0] = lk[0] == -kInf ? -kInf : log_left_tail(lk[0], end_slope(lt[0], lt[1], lk[0], lk[1]));
  for (std::size_t i = 1; i < M; ++i) lK[i] = log_add(lK[i - 1], log_cell(lk[i - 1], lk[i], lt[i] - lt[i - 1]));

  const double c2 = std::log(2.0 * delta * q);
  core.lphit.resize(M);
  for (std::size_t i = 0; i < M; ++i) core.lphit[i] = (c2 + lK[i]) / q - delta * lt[i];
  return core;
}

}  // namespace

EnvelopeResult envelope(const EnvelopeProblem& prob) {
  check_log_grid(prob.t, prob.phi, "envelope");
  if (!(prob.gamma > 0.0) || !(prob.delta > 0.0) || !(prob.q > 0.0)) throw InvalidInput("gamma, delta, q must be positive");
  const std::size_t M = prob.t.size();
  const bool inc = prob.cls == EnvelopeClass::increasing;

  // declared monotonicity on the grid
  for (std::size_t i = 1; i < M; ++i) {
    double s = inc ? prob.gamma : -prob.gamma;
    double a = std::pow(prob.t[i - 1], s) * prob.phi[i - 1], b = std::pow(prob.t[i], s) * prob.phi[i];
    bool ok = inc ? b >= a * (1.0 - 1e-12) : b <= a * (1.0 + 1e-12);
    if (!ok) throw MonotonicityViolated(inc ? "t^gamma phi decreases somewhere on the grid"
                                            : "t^-gamma phi increases somewhere on the grid");
  }

  EnvelopeResult out;
  Certificate& c = out.certificate;
  c.lemma = "envelope";
  c.digest = inputs_digest({{"t", prob.t}, {"phi", prob.phi}, {"gamma", prob.gamma}, {"delta", prob.delta},
                            {"q", finite_or_string(prob.q)}, {"class", inc ? "increasing" : "decreasing"}});

  std::vector<double> lt(M);
  for (std::size_t i = 0; i < M; ++i) lt[i] = std::log(prob.t[i]);

  if (std::isinf(prob.q)) {
    double sup = *std::max_element(prob.phi.begin(), prob.phi.end());
    out.phi_tilde.assign(M, sup);
    out.norm_phi = out.norm_tilde = sup;
    out.constant = 1.0;
  } else {
    // the decreasing class is the increasing one after t -> 1/t
    std::vector<double> t = prob.t, phi = prob.phi;
    if (!inc) {
      std::reverse(t.begin(), t.end());
      std::reverse(phi.begin(), phi.end());
      for (auto& x : t) x = 1.0 / x;
    }
    EnvelopeCore core = envelope_increasing(t, phi, prob.gamma, prob.delta, prob.q);
    out.phi_tilde.resize(M);
    for (std::size_t i = 0; i < M; ++i) out.phi_tilde[i] = std::exp(core.lphit[core.offset + i]);
    if (!inc) std::reverse(out.phi_tilde.begin(), out.phi_tilde.end());

    std::vector<double> lq_phi(core.ext.lv.size()), lq_tilde(core.ext.lv.size());
    for (std::size_t i = 0; i < lq_phi.size(); ++i) {
      lq_phi[i] = prob.q * core.ext.lv[i];
      lq_tilde[i] = prob.q * core.lphit[i];
    }
    out.norm_phi = std::exp(log_integral(core.ext.lt, lq_phi) / prob.q);
    out.norm_tilde = std::exp(log_integral(core.ext.lt, lq_tilde) / prob.q);
    out.constant = std::pow(2.0 * (1.0 + prob.gamma / prob.delta), 1.0 / prob.q);
  }

  Clause dom{"dominates_phi", kInf, true};
  for (std::size_t i = 0; i < M; ++i) {
    if (prob.phi[i] <= 0.0) continue;
    double m = out.phi_tilde[i] / prob.phi[i] - 1.0;
    dom.margin = std::min(dom.margin, m);
    if (m < -1e-12) dom.holds = false;
  }
  c.clauses.push_back(dom);

  Clause up{"t^delta_tilde_nondecreasing", kInf, true}, down{"t^-delta_tilde_nonincreasing", kInf, true};
  for (std::size_t i = 1; i < M; ++i) {
    double l0 = std::log(out.phi_tilde[i - 1]), l1 = std::log(out.phi_tilde[i]);
    double d = prob.delta * (lt[i] - lt[i - 1]);
    double mu = (l1 + d) - (l0);  // log increment of t^delta phi_tilde
    double md = (l0) - (l1 - d);  // log decrement of t^-delta phi_tilde
    up.margin = std::min(up.margin, mu);
    down.margin = std::min(down.margin, md);
    if (mu < -1e-12) up.holds = false;
    if (md < -1e-12) down.holds = false;
  }
  c.clauses.push_back(up);
  c.clauses.push_back(down);

  double bound = out.constant * (1.0 + 1e-6) * out.norm_phi;
  c.clauses.push_back({"norm_bound", bound / out.norm_tilde - 1.0, out.norm_tilde <= bound});
  return out;
}

std::vector<double> random_envelope_input(const std::vector<double>& t, double gamma, EnvelopeClass cls,
                                          std::mt19937_64& rng) {
  if (t.size() < 3) throw InvalidInput("grid too short");
  double llo = std::log(t.front()), lhi = std::log(t.back());
  double pad = std::min(8.0, 0.25 * (lhi - llo));
  std::uniform_real_distribution<double> ltau(llo + pad, lhi - pad), w(0.1, 1.0), kap(gamma + 0.3, gamma + 3.0);
  std::uniform_int_distribution<int> count(1, 4);
  int n = count(rng);
  std::vector<double> lt(n), wt(n), k(n);
  for (int i = 0; i < n; ++i) {
    lt[i] = ltau(rng);
    wt[i] = w(rng);
    k[i] = kap(rng);
  }
  std::vector<double> phi(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    double x = std::log(t[j]), s = 0.0;
    for (int i = 0; i < n; ++i) {
      double e = k[i] * (x - lt[i]);
      // sigma = 1/(1+e^{-e}), 1 - sigma = 1/(1+e^{e})
      s += wt[i] / (1.0 + std::exp(cls == EnvelopeClass::increasing ? -e : e));
    }
    phi[j] = std::exp((cls == EnvelopeClass::increasing ? -gamma : gamma) * x) * s;
  }
  return phi;
}

// ---- balance point

BalancePointResult balance_point(const std::vector<double>& t, const std::vector<double>& phi, PhiShape shape,
                                 const std::vector<double>& zgrid, const std::vector<double>& psi, double alpha,
                                 double beta) {
  check_log_grid(t, phi, "balance_point phi");
  check_log_grid(zgrid, psi, "balance_point psi");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InvalidInput("alpha and beta must be positive");
  const std::size_t M = t.size(), K = zgrid.size();
  std::vector<double> lz(K), lpsi(K);
  for (std::size_t i = 0; i < K; ++i) {
    if (!(psi[i] > 0.0)) throw NotBijective("psi must be positive");
    lz[i] = std::log(zgrid[i]);
    lpsi[i] = std::log(psi[i]);
    if (i && !(psi[i] > psi[i - 1])) throw MonotonicityViolated("psi must be strictly increasing");
    if (i && (lpsi[i] - beta * lz[i]) > (lpsi[i - 1] - beta * lz[i - 1]) + 1e-12)
      throw MonotonicityViolated("psi(z) z^-beta must be nonincreasing");
  }
  std::vector<double> lt(M), lphi(M);
  for (std::size_t i = 0; i < M; ++i) {
    if (!(phi[i] > 0.0)) throw InvalidInput("phi must be positive");
    lt[i] = std::log(t[i]);
    lphi[i] = std::log(phi[i]);
    if (!i) continue;
    double a = lphi[i - 1], b = lphi[i], d = alpha * (lt[i] - lt[i - 1]);
    bool ok = shape == PhiShape::power_decreasing ? b + d <= a + 1e-12 : b - d >= a - 1e-12;
    if (!ok) throw MonotonicityViolated("phi does not have the declared power monotonicity");
  }

  BalancePointResult out;
  out.z.resize(M);
  std::vector<double> lzt(M);
  for (std::size_t i = 0; i < M; ++i) {
    double y = lphi[i];
    if (y < lpsi.front() || y > lpsi.back()) throw NotBijective("psi's sampled range does not cover phi");
    auto it = std::upper_bound(lpsi.begin(), lpsi.end(), y);
    std::size_t j = it == lpsi.end() ? K - 1 : static_cast<std::size_t>(it - lpsi.begin());
    if (j == 0) j = 1;
    double w = (y - lpsi[j - 1]) / (lpsi[j] - lpsi[j - 1]);
    lzt[i] = lz[j - 1] + w * (lz[j] - lz[j - 1]);
    out.z[i] = std::exp(lzt[i]);
  }

  Clause cl{"log_derivative_bound", kInf, true};
  for (std::size_t i = 1; i + 1 < M; ++i) {
    double slope = std::abs(lzt[i + 1] - lzt[i - 1]) / (lt[i + 1] - lt[i - 1]);  // t |z'| / z
    double m = slope * (1.0 + 1e-3) * beta / alpha - 1.0;
    cl.margin = std::min(cl.margin, m);
    if (m < 0.0) cl.holds = false;
  }
  out.min_margin = cl.margin;
  out.certificate.lemma = "balance_point";
  out.certificate.digest = inputs_digest({{"t", t}, {"phi", phi}, {"z", zgrid}, {"psi", psi}, {"alpha", alpha},
                                          {"beta", beta}, {"shape", shape == PhiShape::power_decreasing ? "dec" : "inc"}});
  out.certificate.clauses.push_back(cl);
  return out;
}

// ---- balancing infimum

namespace {

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

// log-log linear interpolation with end-cell power-law extrapolation
class LogLogInterp {
 public:
  LogLogInterp(const std::vector<double>& x, const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!(y[i] > 0.0)) throw InvalidInput("balance profiles must be positive");
      lx_.push_back(std::log(x[i]));
      ly_.push_back(std::log(y[i]));
    }
  }
  double log_at(double lx) const {
    std::size_t j;
    if (lx <= lx_.front()) j = 1;
    else if (lx >= lx_.back()) j = lx_.size() - 1;
    else j = static_cast<std::size_t>(std::upper_bound(lx_.begin(), lx_.end(), lx) - lx_.begin());
    double w = (lx - lx_[j - 1]) / (lx_[j] - lx_[j - 1]);
    return ly_[j - 1] + w * (ly_[j] - ly_[j - 1]);
  }
  double lo() const { return lx_.front(); }
  double hi() const { return lx_.back(); }

 private:
  std::vector<double> lx_, ly_;
};

void check_power_monotone(const std::vector<double>& t, const std::vector<double>& v, double e, bool increasing,
                          const char* what) {
  for (std::size_t i = 1; i < t.size(); ++i) {
    double a = e * std::log(t[i - 1]) + std::log(v[i - 1]);
    double b = e * std::log(t[i]) + std::log(v[i]);
    if (increasing ? b < a - 1e-12 : b > a + 1e-12) throw MonotonicityViolated(what);
  }
}

}  // namespace

double BalanceProblem::p() const {
  double th = theta();
  return 1.0 / ((1.0 - th) * inv(p1) + th * inv(p2));
}

double BalanceProblem::q() const {
  double th = theta();
  double iq = (1.0 - th) * inv(q1) + th * inv(q2);
  return iq == 0.0 ? kInf : 1.0 / iq;
}

BalanceResult balance_inf(const BalanceProblem& prob, const std::vector<double>& tgrid) {
  if (!(prob.rho > 0.0) || !(prob.sigma < 0.0)) throw InvalidInput("need rho > 0 and sigma < 0");
  for (double x : {prob.p1, prob.p2, prob.q1, prob.q2})
    if (!(x > 0.0)) throw UnsupportedIndex("indices must be positive");
  if (prob.p1 == prob.p2) throw InvalidInput("need p1 != p2");
  check_log_grid(prob.z1, prob.phi1, "phi_1");
  check_log_grid(prob.z2, prob.phi2, "phi_2");
  check_log_grid(tgrid, std::vector<double>(tgrid.size(), 1.0), "t grid");

  const double rho = prob.rho, sig = prob.sigma;
  switch (prob.c) {
    case BalanceCase::i:
      check_power_monotone(prob.z1, prob.phi1, rho, true, "case (i): t^rho phi_1 must increase");
      check_power_monotone(prob.z2, prob.phi2, sig, false, "case (i): t^sigma phi_2 must decrease");
      break;
    case BalanceCase::ii:
      check_power_monotone(prob.z1, prob.phi1, -inv(prob.p1), false, "case (ii): t^{-1/p1} phi_1 must decrease");
      check_power_monotone(prob.z2, prob.phi2, sig, false, "case (ii): t^sigma phi_2 must decrease");
      break;
    case BalanceCase::iii:
      check_power_monotone(prob.z1, prob.phi1, rho, true, "case (iii): t^rho phi_1 must increase");
      check_power_monotone(prob.z2, prob.phi2, -inv(prob.p2), false, "case (iii): t^{-1/p2} phi_2 must decrease");
      break;
  }

  LogLogInterp f1(prob.z1, prob.phi1), f2(prob.z2, prob.phi2);
  const double a1 = inv(prob.p1), a2 = inv(prob.p2);

  // log Phi(e^u, t)
  auto logPhi = [&](double u, double lt) {
    double x1, x2;
    switch (prob.c) {
      case BalanceCase::i:
        x1 = -a1 * lt + rho * u + f1.log_at(u);
        x2 = -a2 * lt + sig * u + f2.log_at(u);
        break;
      case BalanceCase::ii:
        x1 = -a1 * lt + f1.log_at(lt) + rho * u;
        x2 = -a2 * lt + sig * u + f2.log_at(u);
        break;
      default:
        x1 = -a1 * lt + rho * u + f1.log_at(u);
        x2 = -a2 * lt + f2.log_at(lt) + sig * u;
        break;
    }
    return log_add(x1, x2);
  };

  BalanceResult out;
  out.t = tgrid;
  const double du = 1.0 / 8.0;
  double ulo = std::min(f1.lo(), f2.lo()) - 10.0, uhi = std::max(f1.hi(), f2.hi()) + 10.0;
  std::vector<double> lf(tgrid.size());
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    const double lt = std::log(tgrid[i]);
    double best = kInf, ub = 0.0;
    for (int grow = 0;; ++grow) {
      int n = static_cast<int>(std::ceil((uhi - ulo) / du));
      int arg = 0;
      best = kInf;
      for (int k = 0; k <= n; ++k) {
        double v = logPhi(ulo + k * du, lt);
        if (v < best) {
          best = v;
          arg = k;
        }
      }
      ub = ulo + arg * du;
      if ((arg > 0 && arg < n) || grow == 20) break;
      if (arg == 0) ulo -= 20.0;
      if (arg == n) uhi += 20.0;
    }
    for (double d = 0.5 * du; d >= 1e-7; d *= 0.5) {
      for (double u : {ub - d, ub + d}) {
        double v = logPhi(u, lt);
        if (v < best) {
          best = v;
          ub = u;
        }
      }
    }
    lf[i] = best;
  }
  out.f.resize(lf.size());
  for (std::size_t i = 0; i < lf.size(); ++i) out.f[i] = std::exp(lf[i]);

  // f is nonincreasing in t, so f* = f and ||f||_{p,q} = ||t^{1/p} f||_{L^q(dt/t)}
  const double p = prob.p(), q = prob.q();
  std::vector<double> lt(tgrid.size()), lw(tgrid.size());
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    lt[i] = std::log(tgrid[i]);
    lw[i] = lt[i] / p + lf[i];
  }
  if (std::isinf(q)) {
    out.norm_f = std::exp(*std::max_element(lw.begin(), lw.end()));
  } else {
    for (auto& x : lw) x *= q;
    out.norm_f = std::exp(log_integral(lt, lw) / q);
  }
  out.norm_phi1 = log_lq_norm(prob.z1, prob.phi1, prob.q1);
  out.norm_phi2 = log_lq_norm(prob.z2, prob.phi2, prob.q2);
  const double th = prob.theta();
  out.ratio = out.norm_f / (std::pow(out.norm_phi1, 1.0 - th) * std::pow(out.norm_phi2, th));
  return out;
}

// ---- semigroup estimates

double pseudo_poincare_constant(int n) {
  if (n != 1 && n != 2) throw InvalidInput("dimension must be 1 or 2");
  // |S^{n-1}| * integral_0^inf r^n e^{-r^2} dr = |S^{n-1}| Gamma((n+1)/2) / 2
  double sphere = n == 1 ? 2.0 : 2.0 * M_PI;
  return 2.0 * std::pow(M_PI, -0.5 * n) * sphere * std::tgamma(0.5 * (n + 1)) / 2.0;
}

PoincareResult pseudo_poincare(const AnalyticFunction& f, double h, const GridSpec& g, std::vector<double> tgrid) {
  if (!f.is_gaussian_mix()) throw UnsupportedFamily("pseudo-Poincare check needs a gaussian mixture");
  if (!(h > 0.0)) throw InvalidInput("h must be positive");
  const auto& mix = f.mix();
  double cmax = 0.0, amax = 0.0;
  for (const auto& t : mix.terms) {
    cmax = std::max({cmax, std::abs(t.center[0]), mix.dim == 2 ? std::abs(t.center[1]) : 0.0});
    amax = std::max(amax, t.width);
  }
  if (cmax + 10.0 * std::sqrt(2.0 * (amax + h)) > g.half_width())
    throw KernelTooWide("P_h f is not contained in the box; enlarge the grid");

  SampledField diff = sample(f, g) - sample(heat::apply_analytic(f, h), g);
  AveragedProfile lhs = double_star(rearrangement(diff));
  AveragedProfile grad = double_star(rearrangement(gradient_norm_field(f, g)));
  if (tgrid.empty()) tgrid = cell_aligned_times(g, 60);

  PoincareResult out;
  out.c_n = pseudo_poincare_constant(g.dim());
  out.t = tgrid;
  const double sh = std::sqrt(h);
  for (double t : tgrid) {
    double a = lhs(t), b = sh * grad(t);
    double r = a == 0.0 ? 0.0 : (b > 0.0 ? a / b : kInf);
    out.ratio.push_back(r);
    out.max_ratio = std::max(out.max_ratio, r);
  }
  const double bound = out.c_n * (1.0 + 1e-2);
  out.holds = out.max_ratio <= bound;
  out.certificate.lemma = "pseudo_poincare";
  out.certificate.digest = inputs_digest({{"f", f}, {"h", h}, {"grid", grid_to_json(g)}, {"t", tgrid}});
  out.certificate.clauses.push_back({"max_ratio_below_c_n", bound / std::max(out.max_ratio, 1e-300) - 1.0, out.holds});
  return out;
}

SmoothingResult smoothing_bound(const SampledField& f, double h, double q) {
  if (!(q >= 1.0)) throw InvalidInput("smoothing bound needs q in [1, inf]");
  if (!(h > 0.0)) throw InvalidInput("h must be positive");
  const int n = f.grid.dim();
  SmoothingResult out;
  out.lhs = heat::apply(f, h).max_abs();
  double k;
  if (std::isinf(q)) k = 1.0;
  else if (q == 1.0) k = std::pow(4.0 * M_PI * h, -0.5 * n);
  else {
    double qp = q / (q - 1.0);
    k = std::pow(4.0 * M_PI * h, -0.5 * n / q) * std::pow(qp, -0.5 * n / qp);
  }
  out.rhs = k * f.lp_norm(q);
  out.holds = out.lhs <= out.rhs * (1.0 + 1e-6);
  out.certificate.lemma = "smoothing_bound";
  out.certificate.digest = inputs_digest({{"grid", grid_to_json(f.grid)}, {"values", f.values}, {"h", h},
                                          {"q", finite_or_string(q)}});
  double margin = out.lhs > 0.0 ? out.rhs * (1.0 + 1e-6) / out.lhs - 1.0 : kInf;
  out.certificate.clauses.push_back({"sup_bound", margin, out.holds});
  return out;
}

StarComparison smoothing_double_star(const SampledField& f, double h, std::size_t count) {
  if (!(h > 0.0)) throw InvalidInput("h must be positive");
  const GridSpec& g = f.grid;
  const double cut = 1e-13 * f.max_abs();
  double R = 0.0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (std::abs(f.values[k]) <= cut) continue;
    Point x = g.point(k);
    R = std::max({R, std::abs(x[0]), g.dim() == 2 ? std::abs(x[1]) : 0.0});
  }
  R += 0.5 * g.spacing();
  std::size_t factor = 1;
  const std::size_t cap = g.dim() == 1 ? (std::size_t{1} << 18) : 2048;
  while (R + 10.0 * std::sqrt(2.0 * h) > g.half_width() * factor) {
    factor *= 2;
    if (g.points_per_axis() * factor > cap) throw KernelTooWide("P_h f does not fit in any admissible enlarged box");
  }
  SampledField fe = factor > 1 ? embed(f, factor) : f;
  AveragedProfile a = double_star(rearrangement(heat::apply(fe, h)));
  AveragedProfile b = double_star(rearrangement(f));
  StarComparison out;
  for (double t : cell_aligned_times(g, count)) {
    double bt = b(t);
    if (bt <= 0.0) continue;
    out.max_ratio = std::max(out.max_ratio, a(t) / bt);
  }
  out.holds = out.max_ratio <= 1.0 + 1e-10;
  return out;
}

}  // namespace gnforge
