#include "gnforge/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gnforge/lorentz.hpp"
#include "gnforge/rearrange.hpp"

namespace gnforge {

namespace {

const std::vector<std::pair<Theorem, std::string>>& tag_table() {
  static const std::vector<std::pair<Theorem, std::string>> t = {
      {Theorem::sobolev_gn, "sobolev_gn"}, {Theorem::sobolev_lorentz, "sobolev_lorentz"},
      {Theorem::weak_type, "weak_type"},   {Theorem::FF, "FF"},
      {Theorem::BB, "BB"},                 {Theorem::FB, "FB"},
      {Theorem::BF, "BF"},                 {Theorem::wadade1, "wadade1"},
      {Theorem::wadade2, "wadade2"}};
  return t;
}

double inv(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }
double from_inv(double x) { return x == 0.0 ? kInf : 1.0 / x; }

nlohmann::json index_json(double x) {
  if (std::isinf(x)) return "inf";
  return x;
}

double index_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw InvalidInput(std::string("missing parameter '") + key + "'");
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v == "inf" || v == "Infinity")) return kInf;
  throw InvalidInput(std::string("parameter '") + key + "' must be a number or \"inf\"");
}

bool is_integer(double x) { return std::isfinite(x) && x == std::floor(x); }

FactorMeta meta(const std::string& name, const NormResult& nr) {
  return {name, nr.idx.m, nr.quad.nodes, nr.residual_lo, nr.residual_hi, nr.plateau};
}

FactorMeta plain(const std::string& name) { return {name}; }

RatioReport make_report(Theorem t, nlohmann::json params, double lhs, double f1, double f2, double e1, double e2,
                        std::vector<FactorMeta> quad) {
  RatioReport r;
  r.theorem = theorem_tag(t);
  r.params = std::move(params);
  r.lhs = lhs;
  r.factors = {f1, f2};
  r.exponents = {e1, e2};
  r.ratio = lhs / (std::pow(f1, e1) * std::pow(f2, e2));
  r.quad = std::move(quad);
  if (!std::isfinite(r.ratio) || !std::isfinite(lhs) || !std::isfinite(f1) || !std::isfinite(f2))
    throw NonIntegrable(r.theorem + ": ratio or one of its factors is not finite");
  return r;
}

const GaussianMix& mix_of(const AnalyticFunction& f) {
  if (!f.is_gaussian_mix()) throw UnsupportedFamily("theorem checks need a gaussian mixture");
  return f.mix();
}

NormResult besov(const AnalyticFunction& f, double s, double p, double q) {
  return besov_norm(f, SmoothnessIndex(s, p, q, default_m(s)));
}

// Lorentz (p, q) norm of the q = inf aggregate
NormResult tl(const AnalyticFunction& f, double s, double p, double q, int m, const GridSpec& g) {
  return tl_lorentz_norm(AnalyticSource(mix_of(f), g), SmoothnessIndex(s, p, kInf, m).with_r(q));
}

double lorentz(const AnalyticFunction& f, double p, double q, const GridSpec& g) {
  return lorentz_quasinorm(f, LorentzIndex(p, q), g);
}

}  // namespace

std::string theorem_tag(Theorem t) {
  for (const auto& [k, v] : tag_table())
    if (k == t) return v;
  return "unknown";
}

Theorem theorem_from_tag(const std::string& tag) {
  for (const auto& [k, v] : tag_table())
    if (v == tag) return k;
  throw InvalidInput("unknown theorem tag '" + tag + "'");
}

const std::vector<Theorem>& all_theorems() {
  static const std::vector<Theorem> all = [] {
    std::vector<Theorem> v;
    for (const auto& e : tag_table()) v.push_back(e.first);
    return v;
  }();
  return all;
}

double GNParameters::p() const {
  double th = theta();
  return from_inv((1.0 - th) * inv(p1) + th * inv(p2));
}

double GNParameters::q() const {
  double th = theta();
  return from_inv((1.0 - th) * inv(q1) + th * inv(q2));
}

nlohmann::json GNParameters::to_json() const {
  return {{"r", r}, {"s", s}, {"p1", index_json(p1)}, {"q1", index_json(q1)}, {"p2", index_json(p2)},
          {"q2", index_json(q2)}, {"theta", theta()}, {"p", index_json(p())}, {"q", index_json(q())}};
}

GNParameters GNParameters::from_json(const nlohmann::json& j) {
  GNParameters gp;
  gp.r = index_from_json(j, "r");
  gp.s = index_from_json(j, "s");
  gp.p1 = index_from_json(j, "p1");
  gp.q1 = index_from_json(j, "q1");
  gp.p2 = index_from_json(j, "p2");
  gp.q2 = index_from_json(j, "q2");
  return gp;
}

GNParameters sobolev_lorentz_parameters(int n, int r, double p) {
  GNParameters gp;
  gp.r = r;
  gp.s = r - n / p;
  gp.p1 = gp.q1 = gp.q2 = p;
  gp.p2 = kInf;
  return gp;
}

nlohmann::json WadadeParameters::to_json() const {
  return {{"p", p}, {"q", q}, {"r", r}, {"rho", index_json(rho)}};
}

WadadeParameters WadadeParameters::from_json(const nlohmann::json& j) {
  WadadeParameters w;
  w.p = index_from_json(j, "p");
  w.q = index_from_json(j, "q");
  w.r = index_from_json(j, "r");
  w.rho = index_from_json(j, "rho");
  return w;
}

std::optional<std::string> admissibility_issue(Theorem t, const GNParameters& gp, int dim) {
  if (dim != 1 && dim != 2) return "dimension must be 1 or 2";
  if (t == Theorem::wadade1 || t == Theorem::wadade2) return "wadade tags take WadadeParameters";
  if (!(gp.r > 0.0) || !std::isfinite(gp.r)) return "need 0 < r < inf";
  if (!(gp.s < 0.0) || !std::isfinite(gp.s)) return "need -inf < s < 0";
  for (double x : {gp.p1, gp.q1, gp.p2, gp.q2})
    if (!(x > 0.0)) return "indices must be positive";
  auto in1inf = [](double x) { return x >= 1.0; };
  auto fin = [](double x) { return std::isfinite(x); };

  switch (t) {
    case Theorem::sobolev_gn:
    case Theorem::weak_type:
      if (!is_integer(gp.r)) return "r must be a positive integer";
      if (t == Theorem::weak_type && gp.r != 1.0) return "the weak-type inequality is the r = 1 case";
      if (!in1inf(gp.p1) || !in1inf(gp.p2) || !in1inf(gp.q1) || !in1inf(gp.q2)) return "need 1 <= p_i, q_i <= inf";
      if (gp.p1 == gp.p2) return "need p1 != p2";
      if (gp.p1 == 1.0 && gp.q1 != 1.0) return "q1 must be 1 when p1 = 1";
      if (!fin(gp.p1) && fin(gp.q1)) return "q1 must be inf when p1 = inf";
      if (!fin(gp.p2) && fin(gp.q2)) return "q2 must be inf when p2 = inf";
      return std::nullopt;
    case Theorem::sobolev_lorentz: {
      if (dim < 2) return "needs n >= 2";
      if (!is_integer(gp.r) || gp.r >= dim) return "need integer 1 <= r < n";
      const double p = gp.p1;
      if (!(p >= 1.0) || !(p < dim / gp.r)) return "need 1 <= p < n/r";
      GNParameters want = sobolev_lorentz_parameters(dim, static_cast<int>(gp.r), p);
      if (std::abs(want.s - gp.s) > 1e-12 || gp.q1 != p || gp.q2 != p || fin(gp.p2))
        return "parameters do not match s = r - n/p, q1 = q2 = p, p2 = inf";
      return std::nullopt;
    }
    case Theorem::FF:
      if (!fin(gp.p1) || !fin(gp.p2)) return "need 0 < p1, p2 < inf";
      return std::nullopt;
    case Theorem::BB:
      if (!in1inf(gp.p1) || !in1inf(gp.p2) || !in1inf(gp.q1) || !in1inf(gp.q2)) return "need 1 <= p_i, q_i <= inf";
      if (gp.p1 == gp.p2) return "need p1 != p2";
      return std::nullopt;
    case Theorem::FB:
      if (!fin(gp.p1)) return "need 0 < p1 < inf";
      if (!in1inf(gp.p2) || !in1inf(gp.q2)) return "need 1 <= p2, q2 <= inf";
      if (gp.p1 == gp.p2) return "need p1 != p2";
      return std::nullopt;
    case Theorem::BF:
      if (!in1inf(gp.p1) || !in1inf(gp.q1)) return "need 1 <= p1, q1 <= inf";
      if (!fin(gp.p2)) return "need 0 < p2 < inf";
      if (gp.p1 == gp.p2) return "need p1 != p2";
      return std::nullopt;
    default:
      return "unhandled theorem";
  }
}

std::optional<std::string> admissibility_issue(const WadadeParameters& w) {
  if (!(1.0 < w.p && w.p < w.q && std::isfinite(w.q))) return "need 1 < p < q < inf";
  if (!(w.r > 0.0) || !std::isfinite(w.r)) return "need 0 < r < inf";
  if (!(w.rho > 0.0) || !std::isfinite(w.rho)) return "need 0 < rho < inf";
  return std::nullopt;
}

void require_admissible(Theorem t, const GNParameters& gp, int dim) {
  if (auto why = admissibility_issue(t, gp, dim)) throw AdmissibilityViolation(theorem_tag(t) + ": " + *why);
}

nlohmann::json RatioReport::to_json() const {
  nlohmann::json q = nlohmann::json::array();
  for (const auto& m : quad) {
    nlohmann::json e = {{"name", m.name}};
    if (m.m >= 0) {
      e["m"] = m.m;
      e["nodes"] = m.nodes;
      e["endpoint_residuals"] = {m.residual_lo, m.residual_hi};
      e["plateau"] = m.plateau;
    }
    q.push_back(e);
  }
  return {{"theorem", theorem},   {"params", params},   {"function", function_id},
          {"lambda", lambda},     {"lhs", lhs},         {"factors", {factors[0], factors[1]}},
          {"exponents", {exponents[0], exponents[1]}}, {"ratio", ratio}, {"quad", q}};
}

int tl_m(double r) { return std::max(1, static_cast<int>(std::floor(r / 2.0)) + 1); }

RatioReport verify_sobolev_gn(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g) {
  require_admissible(Theorem::sobolev_gn, gp, f.dim());
  const double th = gp.theta();
  double lhs = lorentz(f, gp.p(), gp.q(), g);
  double d = sobolev_lorentz_seminorm(f, static_cast<int>(gp.r), LorentzIndex(gp.p1, gp.q1), g);
  NormResult b = besov(f, gp.s, gp.p2, gp.q2);
  return make_report(Theorem::sobolev_gn, gp.to_json(), lhs, d, b.value, 1.0 - th, th,
                     {plain("lorentz_p_q"), plain("sobolev_p1_q1"), meta("besov_s_p2_q2", b)});
}

RatioReport verify_sobolev_lorentz(const AnalyticFunction& f, int r, double p, const GridSpec& g) {
  const int n = f.dim();
  GNParameters gp = sobolev_lorentz_parameters(n, r, p);
  require_admissible(Theorem::sobolev_lorentz, gp, n);
  const double pstar = n * p / (n - r * p);
  const double e2 = p * r / n;
  double lhs = lorentz(f, pstar, p, g);
  double d = sobolev_lorentz_seminorm(f, r, LorentzIndex(p, p), g);
  NormResult b = besov(f, r - n / p, kInf, p);
  nlohmann::json params = {{"r", r}, {"p", p}, {"n", n}, {"p_star", pstar}};
  return make_report(Theorem::sobolev_lorentz, params, lhs, d, b.value, 1.0 - e2, e2,
                     {plain("lorentz_pstar_p"), plain("sobolev_p"), meta("besov_r-n/p_inf_p", b)});
}

RatioReport verify_weak_type(const AnalyticFunction& f, const GNParameters& gp, const std::vector<double>& tgrid,
                             const GridSpec& g) {
  require_admissible(Theorem::weak_type, gp, f.dim());
  const double th = gp.theta();
  AveragedProfile fss = double_star(rearrangement(sample(f, g)));
  AveragedProfile gss = double_star(rearrangement(gradient_norm_field(f, g)));
  NormResult b = besov(f, gp.s, gp.p2, gp.q2);
  const std::vector<double> ts = tgrid.empty() ? cell_aligned_times(g, 100) : tgrid;
  double best = -1.0, lhs = 0.0, f1 = 0.0, f2 = 0.0;
  for (double t : ts) {
    double a = fss(t), d = gss(t), w = std::pow(t, -inv(gp.p2)) * b.value;
    double v = a / (std::pow(d, 1.0 - th) * std::pow(w, th));
    if (v > best) {
      best = v;
      lhs = a;
      f1 = d;
      f2 = w;
    }
  }
  return make_report(Theorem::weak_type, gp.to_json(), lhs, f1, f2, 1.0 - th, th,
                     {plain("f_double_star"), plain("grad_double_star"), meta("t^-1/p2_besov", b)});
}

RatioReport verify_FF(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g) {
  require_admissible(Theorem::FF, gp, f.dim());
  const double th = gp.theta();
  const int m = tl_m(gp.r);
  double lhs = lorentz(f, gp.p(), gp.q(), g);
  NormResult h = tl(f, gp.r, gp.p1, gp.q1, m, g);
  NormResult k = tl(f, gp.s, gp.p2, gp.q2, m, g);
  return make_report(Theorem::FF, gp.to_json(), lhs, h.value, k.value, 1.0 - th, th,
                     {plain("lorentz_p_q"), meta("tl_r_p1_q1_inf", h), meta("tl_s_p2_q2_inf", k)});
}

RatioReport verify_BB(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g) {
  require_admissible(Theorem::BB, gp, f.dim());
  const double th = gp.theta();
  double lhs = lorentz(f, gp.p(), gp.q(), g);
  NormResult a = besov(f, gp.r, gp.p1, gp.q1);
  NormResult b = besov(f, gp.s, gp.p2, gp.q2);
  return make_report(Theorem::BB, gp.to_json(), lhs, a.value, b.value, 1.0 - th, th,
                     {plain("lorentz_p_q"), meta("besov_r_p1_q1", a), meta("besov_s_p2_q2", b)});
}

RatioReport verify_FB(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g) {
  require_admissible(Theorem::FB, gp, f.dim());
  const double th = gp.theta();
  double lhs = lorentz(f, gp.p(), gp.q(), g);
  NormResult h = tl(f, gp.r, gp.p1, gp.q1, tl_m(gp.r), g);
  NormResult b = besov(f, gp.s, gp.p2, gp.q2);
  return make_report(Theorem::FB, gp.to_json(), lhs, h.value, b.value, 1.0 - th, th,
                     {plain("lorentz_p_q"), meta("tl_r_p1_q1_inf", h), meta("besov_s_p2_q2", b)});
}

RatioReport verify_BF(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g) {
  require_admissible(Theorem::BF, gp, f.dim());
  const double th = gp.theta();
  double lhs = lorentz(f, gp.p(), gp.q(), g);
  NormResult a = besov(f, gp.r, gp.p1, gp.q1);
  NormResult k = tl(f, gp.s, gp.p2, gp.q2, tl_m(gp.r), g);
  return make_report(Theorem::BF, gp.to_json(), lhs, a.value, k.value, 1.0 - th, th,
                     {plain("lorentz_p_q"), meta("besov_r_p1_q1", a), meta("tl_s_p2_q2_inf", k)});
}

namespace {

RatioReport wadade_one(const AnalyticFunction& f, const WadadeParameters& w, const GridSpec& g, bool besov_form,
                       double lq, double lp) {
  const double s = f.dim() / w.r, e = w.p / w.q;
  NormResult a = besov_form ? besov(f, s, w.r, w.rho)
                            : tl_lorentz_norm(AnalyticSource(mix_of(f), g), SmoothnessIndex(s, w.r, kInf, default_m(s)));
  return make_report(besov_form ? Theorem::wadade1 : Theorem::wadade2, w.to_json(), lq, a.value, lp, 1.0 - e, e,
                     {plain("lebesgue_q"), meta(besov_form ? "besov_n/r_r_rho" : "tl_n/r_r_inf", a),
                      plain("lebesgue_p")});
}

}  // namespace

std::array<RatioReport, 2> verify_wadade(const AnalyticFunction& f, const WadadeParameters& w, const GridSpec& g) {
  if (auto why = admissibility_issue(w)) throw AdmissibilityViolation("wadade: " + *why);
  double lq = lorentz(f, w.q, w.q, g), lp = lorentz(f, w.p, w.p, g);
  return {wadade_one(f, w, g, true, lq, lp), wadade_one(f, w, g, false, lq, lp)};
}

RatioReport verify(Theorem t, const AnalyticFunction& f, const nlohmann::json& params, const GridSpec& g) {
  switch (t) {
    case Theorem::wadade1:
    case Theorem::wadade2: {
      WadadeParameters w = WadadeParameters::from_json(params);
      if (auto why = admissibility_issue(w)) throw AdmissibilityViolation("wadade: " + *why);
      double lq = lorentz(f, w.q, w.q, g), lp = lorentz(f, w.p, w.p, g);
      return wadade_one(f, w, g, t == Theorem::wadade1, lq, lp);
    }
    case Theorem::sobolev_lorentz: {
      double r = index_from_json(params, "r"), p = index_from_json(params, "p");
      if (!is_integer(r)) throw AdmissibilityViolation("sobolev_lorentz: r must be an integer");
      return verify_sobolev_lorentz(f, static_cast<int>(r), p, g);
    }
    default:
      break;
  }
  GNParameters gp = GNParameters::from_json(params);
  switch (t) {
    case Theorem::sobolev_gn: return verify_sobolev_gn(f, gp, g);
    case Theorem::weak_type: return verify_weak_type(f, gp, {}, g);
    case Theorem::FF: return verify_FF(f, gp, g);
    case Theorem::BB: return verify_BB(f, gp, g);
    case Theorem::FB: return verify_FB(f, gp, g);
    default: return verify_BF(f, gp, g);
  }
}

nlohmann::json EstprodResult::to_json() const {
  return {{"constant", constant}, {"max_margin", max_margin}, {"holds", holds}};
}

EstprodResult verify_pointwise_estprod(const AnalyticFunction& f, double r, double s, int m,
                                       const std::optional<QuadratureSpec>& quad, std::vector<double> tgrid,
                                       const GridSpec& g) {
  if (!(r > 0.0) || !(s < 0.0)) throw InvalidInput("need r > 0 and s < 0");
  if (m < 1 || !(m > r / 2.0)) throw InvalidInput("need m >= 1 and m > r/2");
  AnalyticSource src(mix_of(f), g);
  SmoothnessIndex ih(r, 1.0, kInf, m), ig(s, 1.0, kInf, m);
  Aggregate H = quad ? tl_pointwise_aggregate(src, ih, *quad) : tl_pointwise_aggregate(src, ih, AutoRange{});
  Aggregate G = quad ? tl_pointwise_aggregate(src, ig, *quad) : tl_pointwise_aggregate(src, ig, AutoRange{});
  StepProfile fs = rearrangement(sample(f, g)), hs = rearrangement(H.field), gs = rearrangement(G.field);

  EstprodResult out;
  const double th = r / (r - s);
  out.constant = 4.0 / (std::tgamma(m) * std::pow(r, 1.0 - th) * std::pow(-s, th));
  out.t = tgrid.empty() ? cell_aligned_times(g, 100) : std::move(tgrid);
  for (double t : out.t) {
    double a = fs(2.0 * t);
    double b = out.constant * std::pow(hs(t), 1.0 - th) * std::pow(gs(t), th);
    out.lhs.push_back(a);
    out.rhs.push_back(b);
    double mg = a == 0.0 ? 0.0 : (b > 0.0 ? a / b : kInf);
    out.max_margin = std::max(out.max_margin, mg);
  }
  out.holds = out.max_margin <= 1.0 + 1e-2;
  return out;
}

std::vector<FamilyMember> gaussian_family(FamilyKind kind, int dim, int count, std::uint64_t seed) {
  if (dim != 1 && dim != 2) throw InvalidInput("dimension must be 1 or 2");
  if (count < 0) throw InvalidInput("family size must be >= 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.5, 2.0), cen(-2.0, 2.0), wid(0.3, 2.0);
  std::uniform_int_distribution<int> terms(1, 3);
  auto term = [&] {
    GaussianTerm t;
    t.amp = amp(rng);
    t.center = {cen(rng), dim == 2 ? cen(rng) : 0.0};
    t.width = wid(rng);
    return t;
  };
  std::vector<FamilyMember> out;
  const bool bal = kind == FamilyKind::balanced;
  for (int i = 0; i < count; ++i) {
    GaussianMix g{dim, {}};
    if (i == 0 && !bal) {
      g.terms.push_back(GaussianTerm{1.0, {0.0, 0.0}, 1.0});
    } else {
      int k = terms(rng);
      for (int j = 0; j < k; ++j) g.terms.push_back(term());
      if (bal) {
        // closing term with the opposite total mass
        GaussianTerm last = term();
        double mass = 0.0;
        for (const auto& t : g.terms) mass += t.amp * std::pow(t.width, 0.5 * dim);
        last.amp = -mass / std::pow(last.width, 0.5 * dim);
        g.terms.push_back(last);
      }
    }
    char id[32];
    std::snprintf(id, sizeof id, "%s-%03d", bal ? "bal" : "pos", i);
    out.push_back({id, AnalyticFunction(g)});
  }
  return out;
}

bool positive_family_ok(Theorem t, const nlohmann::json& params, int dim) {
  const double n = dim;
  // h^{-s/2} ||P_h f||_p ~ h^{-s/2 - n/(2p')} for a positive mixture
  auto besov_ok = [&](double s, double p, double q) {
    double e = -0.5 * s - 0.5 * n * (1.0 - inv(p));
    return e < 0.0 || (e == 0.0 && std::isinf(q));
  };
  // the q = inf aggregate G decays like |x|^{s-n}
  auto tl_ok = [&](double s, double p, double q) {
    if (!(-s < n)) return false;
    double e = (n + s) * p;
    return e > n || (e == n && std::isinf(q));
  };
  switch (t) {
    case Theorem::wadade1:
    case Theorem::wadade2:
    case Theorem::sobolev_lorentz:
      return true;
    default:
      break;
  }
  GNParameters gp = GNParameters::from_json(params);
  switch (t) {
    case Theorem::FF:
    case Theorem::BF:
      return tl_ok(gp.s, gp.p2, gp.q2);
    default:
      return besov_ok(gp.s, gp.p2, gp.q2);
  }
}

}  // namespace gnforge
