#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "gnforge/lemma_kit.hpp"
#include "gnforge/logquad.hpp"
#include "gnforge/lorentz.hpp"
#include "gnforge/verifier.hpp"

namespace gnforge {

namespace {

using json = nlohmann::json;

// Line of each element start inside the top-level arrays "rows" and "checks".
std::map<std::string, std::vector<int>> element_lines(const std::string& text) {
  std::map<std::string, std::vector<int>> out;
  struct Frame {
    char kind;
    std::string key;
  };
  std::vector<Frame> st;
  std::string last, pending;
  bool in_str = false, esc = false, closed = false;
  int line = 1;
  for (char c : text) {
    if (c == '\n') ++line;
    if (in_str) {
      if (esc) esc = false;
      else if (c == '\\') esc = true;
      else if (c == '"') in_str = false, closed = true;
      else last.push_back(c);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '"') {
      in_str = true;
      last.clear();
      continue;
    }
    if (c == ':' && closed) pending = last;
    closed = false;
    if (c == '{' || c == '[') {
      if (st.size() == 2 && st[0].kind == '{' && st[1].kind == '[') out[st[1].key].push_back(line);
      st.push_back({c, st.size() == 1 ? pending : std::string()});
      pending.clear();
    } else if (c == '}' || c == ']') {
      if (!st.empty()) st.pop_back();
    }
  }
  return out;
}

int line_of_byte(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

std::uint64_t fnv(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

double number_or_inf(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && (v == "inf" || v == "Infinity")) return kInf;
  throw InvalidInput("expected a number or \"inf\"");
}

json num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

struct Job {
  std::string id;
  std::function<std::vector<json>()> run;
};

// Config accessors that report the element's line on failure.
class Element {
 public:
  Element(const json& j, std::string where, int line) : j_(j), where_(std::move(where)), line_(line) {
    if (!j_.is_object()) fail("must be an object");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("line " + std::to_string(line_) + ": " + where_ + ": " + msg);
  }
  bool has(const char* k) const { return j_.contains(k); }
  const json& raw(const char* k) const {
    if (!has(k)) fail(std::string("missing key '") + k + "'");
    return j_.at(k);
  }
  std::string str(const char* k) const {
    const json& v = raw(k);
    if (!v.is_string()) fail(std::string("'") + k + "' must be a string");
    return v.get<std::string>();
  }
  std::string str(const char* k, const std::string& def) const { return has(k) ? str(k) : def; }
  double real(const char* k) const {
    try {
      return number_or_inf(raw(k));
    } catch (const InvalidInput&) {
      fail(std::string("'") + k + "' must be a number or \"inf\"");
    }
  }
  double real(const char* k, double def) const { return has(k) ? real(k) : def; }
  long integer(const char* k, long def) const {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_number_integer()) fail(std::string("'") + k + "' must be an integer");
    return v.get<long>();
  }
  bool boolean(const char* k, bool def) const {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_boolean()) fail(std::string("'") + k + "' must be true or false");
    return v.get<bool>();
  }
  std::vector<double> reals(const char* k, std::vector<double> def) const {
    if (!has(k)) return def;
    const json& v = raw(k);
    if (!v.is_array()) fail(std::string("'") + k + "' must be an array");
    std::vector<double> out;
    for (const auto& e : v) {
      try {
        out.push_back(number_or_inf(e));
      } catch (const InvalidInput&) {
        fail(std::string("'") + k + "' entries must be numbers or \"inf\"");
      }
    }
    return out;
  }
  void allow(std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : j_.items()) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) fail("unknown key '" + k + "'");
    }
  }
  const json& j() const { return j_; }

 private:
  const json& j_;
  std::string where_;
  int line_;
};

std::string pad3(int i) {
  char b[16];
  std::snprintf(b, sizeof b, "%03d", i);
  return b;
}

json error_row(const std::string& id, const std::string& what, const std::exception& e) {
  const auto* ge = dynamic_cast<const Error*>(&e);
  return {{"id", id}, {"what", what}, {"error", ge ? ge->kind() : "internal"}, {"message", e.what()}};
}

// ---- theorem rows

std::vector<Job> theorem_jobs(const Element& row, const std::string& rid, std::vector<json>& immediate) {
  row.allow({"id", "theorem", "dim", "params", "count", "points", "dilations", "amplitude", "refine", "family", "seed"});
  Theorem t;
  try {
    t = theorem_from_tag(row.str("theorem"));
  } catch (const InvalidInput& e) {
    row.fail(e.what());
  }
  const std::string tag = theorem_tag(t);
  const int dim = static_cast<int>(row.integer("dim", t == Theorem::sobolev_lorentz ? 2 : 1));
  const json params = row.raw("params");
  if (!params.is_object()) row.fail("'params' must be an object");
  const int count = static_cast<int>(row.integer("count", 30));
  const std::size_t points = static_cast<std::size_t>(row.integer("points", dim == 1 ? 4096 : 256));
  const std::vector<double> dil = row.reals("dilations", {0.5, 2.0});
  const double kappa = row.real("amplitude", 3.0);
  const bool refine = row.boolean("refine", true);
  const std::string fam = row.str("family", "auto");
  const std::uint64_t seed = static_cast<std::uint64_t>(row.integer("seed", static_cast<long>(fnv(rid) & 0xffffff)));
  if (count < 0) row.fail("'count' must be >= 0");
  if (points < 8 || (points & (points - 1))) row.fail("'points' must be a power of two >= 8");
  for (double l : dil)
    if (!(l > 0.0) || !std::isfinite(l)) row.fail("dilations must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) row.fail("'amplitude' must be positive");
  if (fam != "auto" && fam != "positive" && fam != "balanced") row.fail("'family' must be auto, positive or balanced");

  // admissibility gate
  std::optional<std::string> why;
  try {
    if (t == Theorem::wadade1 || t == Theorem::wadade2) {
      why = admissibility_issue(WadadeParameters::from_json(params));
      if (!why && dim != 1 && dim != 2) why = "dimension must be 1 or 2";
    } else if (t == Theorem::sobolev_lorentz) {
      double r = number_or_inf(params.at("r")), p = number_or_inf(params.at("p"));
      if (r != std::floor(r) || !std::isfinite(r)) why = "r must be an integer";
      else why = admissibility_issue(t, sobolev_lorentz_parameters(dim, static_cast<int>(r), p), dim);
    } else {
      why = admissibility_issue(t, GNParameters::from_json(params), dim);
    }
  } catch (const std::exception& e) {
    row.fail(std::string("bad params: ") + e.what());
  }
  if (why) {
    immediate.push_back({{"id", rid}, {"row", rid}, {"theorem", tag}, {"skipped", true}, {"reason", *why}});
    return {};
  }

  FamilyKind kind = FamilyKind::positive;
  if (fam == "balanced" || (fam == "auto" && !positive_family_ok(t, params, dim))) kind = FamilyKind::balanced;
  auto members = gaussian_family(kind, dim, count, seed);

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const std::string fid = members[i].id;
    const AnalyticFunction f = members[i].f;
    jobs.push_back({rid + "/" + fid, [=]() {
                      std::vector<json> out;
                      const GridSpec g = default_grid(f, points);
                      auto emit = [&](const std::string& variant, const AnalyticFunction& h, const GridSpec& gg,
                                      double lambda, double amp) {
                        const std::string id = rid + "/" + fid + "/" + variant;
                        try {
                          RatioReport rep = verify(t, h, params, gg);
                          rep.function_id = fid;
                          rep.lambda = lambda;
                          json j = rep.to_json();
                          j["id"] = id;
                          j["row"] = rid;
                          j["variant"] = variant.substr(0, variant.find('-'));
                          j["kappa"] = amp;
                          j["grid"] = grid_to_json(gg);
                          out.push_back(std::move(j));
                        } catch (const std::exception& e) {
                          json j = error_row(id, tag, e);
                          j["row"] = rid;
                          j["theorem"] = tag;
                          out.push_back(std::move(j));
                        }
                      };
                      emit("base", f, g, 1.0, 1.0);
                      if (kappa != 1.0) emit("amplitude", f.scaled(kappa), g, 1.0, kappa);
                      for (std::size_t k = 0; k < dil.size(); ++k) {
                        if (dil[k] == 1.0) continue;
                        emit("dilation-" + pad3(static_cast<int>(k)), dilate(f, dil[k]), g.scaled(1.0 / dil[k]),
                             dil[k], 1.0);
                      }
                      if (refine) emit("refined", f, g.refined(), 1.0, 1.0);
                      return out;
                    }});
  }
  return jobs;
}

// ---- explicit-constant checks

json check_row(const std::string& id, const std::string& kind, bool holds) {
  return {{"id", id}, {"check", kind}, {"holds", holds}};
}

std::vector<Job> check_jobs(const Element& c, const std::string& cid) {
  const std::string kind = c.str("kind");
  const int dim = static_cast<int>(c.integer("dim", 1));
  const int count = static_cast<int>(c.integer("count", kind == "seq_majorize" || kind == "disjoint_sets" ||
                                                                 kind == "overlapping_sets"
                                                             ? 200
                                                             : (kind == "envelope" ? 100 : 5)));
  const std::size_t points = static_cast<std::size_t>(c.integer("points", dim == 1 ? 4096 : 256));
  const std::uint64_t seed = static_cast<std::uint64_t>(c.integer("seed", static_cast<long>(fnv(cid) & 0xffffff)));
  if (dim != 1 && dim != 2) c.fail("'dim' must be 1 or 2");
  if (count < 0) c.fail("'count' must be >= 0");
  if (points < 8 || (points & (points - 1))) c.fail("'points' must be a power of two >= 8");
  std::vector<Job> jobs;

  auto guarded = [cid, kind](const std::string& id, std::function<json()> fn) {
    return Job{id, [=]() -> std::vector<json> {
                 try {
                   json j = fn();
                   j["id"] = id;
                   j["check"] = kind;
                   j["group"] = cid;
                   return {j};
                 } catch (const std::exception& e) {
                   json j = error_row(id, kind, e);
                   j["check"] = kind;
                   j["group"] = cid;
                   return {j};
                 }
               }};
  };

  if (kind == "estprod") {
    const double r = c.real("r", 1.0), s = c.real("s", -1.0);
    const int m = static_cast<int>(c.integer("m", tl_m(r)));
    for (const auto& mem : gaussian_family(FamilyKind::positive, dim, count, seed)) {
      jobs.push_back(guarded(cid + "/" + mem.id, [=] {
        EstprodResult e = verify_pointwise_estprod(mem.f, r, s, m, std::nullopt, {}, default_grid(mem.f, points));
        json series = json::array();
        for (std::size_t k = 0; k < e.t.size(); ++k)
          series.push_back({e.t[k], e.rhs[k] > 0.0 ? e.lhs[k] / e.rhs[k] : 0.0});
        json j = check_row("", "", e.holds);
        j["function"] = mem.id;
        j["params"] = {{"r", r}, {"s", s}, {"m", m}};
        j["constant"] = e.constant;
        j["value"] = e.max_margin;
        j["bound"] = 1.0 + 1e-2;
        j["series"] = series;
        return j;
      }));
    }
  } else if (kind == "pseudo_poincare") {
    const std::vector<double> hs = c.reals("h", {1e-2, 1e-1, 1.0});
    for (const auto& mem : gaussian_family(FamilyKind::positive, dim, count, seed)) {
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const double h = hs[k];
        jobs.push_back(guarded(cid + "/" + mem.id + "/h" + pad3(static_cast<int>(k)), [=] {
          const auto& mix = mem.f.mix();
          double cmax = 0.0, amax = 0.0;
          for (const auto& t : mix.terms) {
            cmax = std::max({cmax, std::abs(t.center[0]), std::abs(t.center[1])});
            amax = std::max(amax, t.width);
          }
          GridSpec g(dim, cmax + 10.0 * std::sqrt(2.0 * (amax + h)), points);
          PoincareResult p = pseudo_poincare(mem.f, h, g);
          json j = check_row("", "", p.holds);
          j["function"] = mem.id;
          j["params"] = {{"h", h}};
          j["constant"] = p.c_n;
          j["value"] = p.max_ratio;
          j["bound"] = p.c_n * (1.0 + 1e-2);
          j["certificate"] = p.certificate.to_json();
          return j;
        }));
      }
    }
  } else if (kind == "smoothing_bound") {
    const std::vector<double> hs = c.reals("h", {1e-3, 1e-1, 1.0});
    const std::vector<double> qs = c.reals("q", {1.0, 2.0, kInf});
    for (const auto& mem : gaussian_family(FamilyKind::positive, dim, count, seed)) {
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const double h = hs[k];
        jobs.push_back(guarded(cid + "/" + mem.id + "/h" + pad3(static_cast<int>(k)), [=] {
          SampledField f = sample(mem.f, default_grid(mem.f, points));
          bool ok = true;
          json per = json::array();
          double worst = kInf;
          for (double q : qs) {
            SmoothingResult sr = smoothing_bound(f, h, q);
            ok = ok && sr.holds;
            worst = std::min(worst, sr.certificate.clauses.front().margin);
            per.push_back({{"q", num(q)}, {"lhs", sr.lhs}, {"rhs", sr.rhs}, {"holds", sr.holds}});
          }
          StarComparison sc = smoothing_double_star(f, h);
          ok = ok && sc.holds;
          json j = check_row("", "", ok);
          j["function"] = mem.id;
          j["params"] = {{"h", h}};
          j["value"] = worst;
          j["bounds"] = per;
          j["double_star_max_ratio"] = sc.max_ratio;
          return j;
        }));
      }
    }
  } else if (kind == "seq_majorize") {
    const std::vector<double> deltas = c.reals("delta", {0.1, 0.3, 1.0});
    if (deltas.empty()) c.fail("'delta' must not be empty");
    for (int i = 0; i < count * static_cast<int>(deltas.size()); ++i) {
      jobs.push_back(guarded(cid + "/" + pad3(i), [=] {
        std::mt19937_64 rng(seed + 7919u * static_cast<unsigned>(i));
        std::uniform_int_distribution<int> len(1, 30), lo(-20, 20);
        std::uniform_real_distribution<double> mag(-3.0, 3.0), u(0.0, 1.0);
        DiscreteSeq a;
        a.k_lo = lo(rng);
        a.delta = deltas[static_cast<std::size_t>(i) % deltas.size()];
        a.alpha.resize(len(rng));
        for (auto& x : a.alpha) x = u(rng) < 0.2 ? 0.0 : std::pow(10.0, mag(rng));
        if (std::all_of(a.alpha.begin(), a.alpha.end(), [](double x) { return x == 0.0; })) a.alpha[0] = 1.0;
        MajorizedSeq m = seq_majorize(a);
        json j = check_row("", "", m.certificate.holds());
        j["certificate"] = m.certificate.to_json();
        return j;
      }));
    }
  } else if (kind == "envelope") {
    const std::vector<double> qs = c.reals("q", {1.0, 2.0, kInf});
    const auto t = log_grid(1e-8, 1e8, 801);
    for (int cls = 0; cls < 2; ++cls) {
      for (std::size_t qi = 0; qi < qs.size(); ++qi) {
        for (int i = 0; i < count; ++i) {
          const std::string id = cid + "/" + (cls ? "dec" : "inc") + "/q" + pad3(static_cast<int>(qi)) + "/" + pad3(i);
          const double q = qs[qi];
          jobs.push_back(guarded(id, [=] {
            std::mt19937_64 rng(seed ^ fnv(id));
            std::uniform_real_distribution<double> gam(0.2, 2.0), del(0.1, 2.0);
            EnvelopeProblem pr;
            pr.t = t;
            pr.gamma = gam(rng);
            pr.delta = del(rng);
            pr.q = q;
            pr.cls = cls ? EnvelopeClass::decreasing : EnvelopeClass::increasing;
            pr.phi = random_envelope_input(t, pr.gamma, pr.cls, rng);
            EnvelopeResult e = envelope(pr);
            json j = check_row("", "", e.certificate.holds());
            j["params"] = {{"gamma", pr.gamma}, {"delta", pr.delta}, {"q", num(q)}};
            j["certificate"] = e.certificate.to_json();
            return j;
          }));
        }
      }
    }
  } else if (kind == "disjoint_sets" || kind == "overlapping_sets") {
    const bool disjoint = kind == "disjoint_sets";
    for (int i = 0; i < count; ++i) {
      jobs.push_back(guarded(cid + "/" + pad3(i), [=] {
        std::mt19937_64 rng(seed + 104729u * static_cast<unsigned>(i));
        GridSpec g(1, 4.0, 512);
        std::uniform_real_distribution<double> u(0.0, 1.0), pp(1.0, 6.0);
        SampledField f(g);
        for (auto& v : f.values) v = u(rng) < 0.3 ? 0.0 : std::exp(4.0 * u(rng) - 2.0);
        std::uniform_int_distribution<int> sets(1, 12), ov(1, 4);
        double a = pp(rng), b = pp(rng);
        LemmaCheck lc;
        json params;
        if (disjoint) {
          double p = std::max(a, b), q = std::min(a, b);
          lc = check_disjoint_lemma(f, random_disjoint_family(g, rng, sets(rng)), p, q);
          params = {{"p", p}, {"q", q}};
        } else {
          double p = 1.0 + std::min(a, b) - 0.999, q = std::max(a, b) + 0.001;
          int n = ov(rng);
          lc = check_overlap_lemma(f, random_overlap_family(g, rng, sets(rng), n), p, q);
          params = {{"p", p}, {"q", q}, {"N", n}};
        }
        json j = check_row("", "", lc.holds);
        j["params"] = params;
        j["lhs"] = lc.lhs;
        j["rhs"] = lc.rhs;
        return j;
      }));
    }
  } else {
    c.fail("unknown check kind '" + kind + "'");
  }
  return jobs;
}

void run_jobs(std::vector<Job>& jobs, std::vector<std::vector<json>>& results, unsigned threads) {
  results.assign(jobs.size(), {});
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) results[i] = jobs[i].run();
  };
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace

SweepOutcome run_sweep(const std::string& config_text, unsigned threads, std::optional<Theorem> only) {
  json cfg;
  bool blank = std::all_of(config_text.begin(), config_text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  if (blank) {
    cfg = json::object();
  } else {
    try {
      cfg = json::parse(config_text);
    } catch (const json::parse_error& e) {
      throw ConfigError("line " + std::to_string(line_of_byte(config_text, e.byte)) + ": " + e.what());
    }
  }
  if (!cfg.is_object()) throw ConfigError("line 1: config must be a JSON object");
  const auto lines = element_lines(config_text);
  auto line_for = [&](const std::string& key, std::size_t i) {
    auto it = lines.find(key);
    return it != lines.end() && i < it->second.size() ? it->second[i] : 1;
  };
  for (const auto& [k, v] : cfg.items()) {
    if (k != "rows" && k != "checks" && k != "threads")
      throw ConfigError("line 1: unknown top-level key '" + k + "'");
    if ((k == "rows" || k == "checks") && !v.is_array()) throw ConfigError("line 1: '" + k + "' must be an array");
  }
  if (cfg.contains("threads") && threads == 0) {
    if (!cfg["threads"].is_number_unsigned()) throw ConfigError("line 1: 'threads' must be a non-negative integer");
    threads = cfg["threads"].get<unsigned>();
  }

  std::vector<json> immediate;
  std::vector<Job> jobs;
  std::set<std::string> ids;
  auto take_id = [&](const Element& e, const std::string& fallback) {
    std::string id = e.str("id", fallback);
    if (id.empty() || id.find('/') != std::string::npos) e.fail("'id' must be non-empty without '/'");
    if (!ids.insert(id).second) e.fail("duplicate id '" + id + "'");
    return id;
  };
  if (cfg.contains("rows")) {
    const auto& rows = cfg["rows"];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Element e(rows[i], "rows[" + std::to_string(i) + "]", line_for("rows", i));
      std::string rid = take_id(e, "row" + pad3(static_cast<int>(i)));
      if (only) {
        std::string tag = e.str("theorem");
        if (tag != theorem_tag(*only)) continue;
      }
      auto js = theorem_jobs(e, rid, immediate);
      for (auto& j : js) jobs.push_back(std::move(j));
    }
  }
  if (cfg.contains("checks") && !only) {
    const auto& checks = cfg["checks"];
    for (std::size_t i = 0; i < checks.size(); ++i) {
      Element e(checks[i], "checks[" + std::to_string(i) + "]", line_for("checks", i));
      std::string cid = take_id(e, "check" + pad3(static_cast<int>(i)));
      auto js = check_jobs(e, "check-" + cid);
      for (auto& j : js) jobs.push_back(std::move(j));
    }
  }

  std::vector<std::vector<json>> results;
  run_jobs(jobs, results, threads);
  SweepOutcome out;
  out.rows = std::move(immediate);
  for (auto& r : results)
    for (auto& j : r) out.rows.push_back(std::move(j));
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [](const json& a, const json& b) { return a["id"].get<std::string>() < b["id"].get<std::string>(); });
  out.summary = summarize(out.rows);
  out.exit_code = exit_code_for(out.summary);
  return out;
}

json summarize(const std::vector<json>& rows) {
  struct Acc {
    std::set<std::string> rows, functions;
    double max_ratio = 0.0, min_ratio = kInf, amp = 0.0, drift = 0.0, refine = 0.0;
    int errors = 0, skipped = 0;
  };
  std::map<std::string, Acc> th;
  // per (row, function): base ratio and variants
  std::map<std::string, double> base;
  std::map<std::string, std::pair<double, double>> row_max;  // row -> (max base, max refined)
  std::map<std::string, std::string> row_theorem;
  for (const auto& j : rows) {
    if (!j.contains("theorem") || j.contains("check")) continue;
    std::string tag = j["theorem"];
    Acc& a = th[tag];
    std::string row = j.value("row", "");
    a.rows.insert(row);
    row_theorem[row] = tag;
    if (j.contains("skipped")) {
      ++a.skipped;
      continue;
    }
    if (j.contains("error")) {
      ++a.errors;
      continue;
    }
    if (j["variant"] == "base") base[row + "/" + j["function"].get<std::string>()] = j["ratio"];
  }
  for (const auto& j : rows) {
    if (!j.contains("variant") || j.contains("error")) continue;
    std::string tag = j["theorem"], row = j["row"], fn = j["function"], variant = j["variant"];
    Acc& a = th[tag];
    double r = j["ratio"];
    auto& rm = row_max[row];
    if (variant == "refined") {
      rm.second = std::max(rm.second, r);
      continue;
    }
    if (variant == "base") {
      a.functions.insert(row + "/" + fn);
      a.max_ratio = std::max(a.max_ratio, r);
      a.min_ratio = std::min(a.min_ratio, r);
      rm.first = std::max(rm.first, r);
      continue;
    }
    auto it = base.find(row + "/" + fn);
    if (it == base.end()) continue;
    double dev = std::abs(r / it->second - 1.0);
    if (variant == "amplitude") a.amp = std::max(a.amp, dev);
    else if (variant == "dilation") a.drift = std::max(a.drift, dev);
  }
  for (const auto& [row, mm] : row_max) {
    if (mm.first > 0.0 && mm.second > 0.0)
      th[row_theorem[row]].refine = std::max(th[row_theorem[row]].refine, std::abs(mm.second / mm.first - 1.0));
  }

  json theorems = json::object();
  int errors = 0;
  for (const auto& [tag, a] : th) {
    errors += a.errors;
    theorems[tag] = {{"rows", a.rows.size()},
                     {"functions", a.functions.size()},
                     {"max_ratio", a.functions.empty() ? json(nullptr) : json(a.max_ratio)},
                     {"min_ratio", a.functions.empty() ? json(nullptr) : json(a.min_ratio)},
                     {"max_amplitude_deviation", a.amp},
                     {"max_dilation_drift", a.drift},
                     {"max_refinement_change", a.refine},
                     {"errors", a.errors},
                     {"skipped", a.skipped}};
  }

  json checks = json::object();
  int failures = 0;
  for (const auto& j : rows) {
    if (!j.contains("check")) continue;
    std::string kind = j["check"];
    if (!checks.contains(kind)) checks[kind] = {{"count", 0}, {"failures", 0}, {"errors", 0}};
    auto& c = checks[kind];
    c["count"] = c["count"].get<int>() + 1;
    if (j.contains("error")) {
      c["errors"] = c["errors"].get<int>() + 1;
      ++errors;
    } else if (!j["holds"].get<bool>()) {
      c["failures"] = c["failures"].get<int>() + 1;
      ++failures;
    }
  }
  return {{"theorems", theorems}, {"checks", checks}, {"explicit_failures", failures}, {"errors", errors},
          {"rows", rows.size()}};
}

int exit_code_for(const json& summary) {
  if (summary.value("explicit_failures", 0) > 0) return 2;
  if (summary.value("errors", 0) > 0) return 3;
  return 0;
}

void write_plots(const std::vector<json>& rows, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::map<std::string, int> index;
  std::map<std::string, double> base;
  std::map<std::string, double> gap_max;  // theorem|gap -> max ratio
  for (const auto& j : rows) {
    if (j.contains("variant") && !j.contains("error") && j["variant"] == "base") {
      std::string tag = j["theorem"];
      double r = j["ratio"];
      series[tag + "_ratio"].emplace_back(index[tag]++, r);
      base[j["row"].get<std::string>() + "/" + j["function"].get<std::string>()] = r;
      const auto& p = j["params"];
      if (p.contains("p1") && p.contains("p2")) {
        auto iv = [](const json& v) { return v.is_number() ? 1.0 / v.get<double>() : 0.0; };
        double gap = std::abs(iv(p["p1"]) - iv(p["p2"]));
        char key[64];
        std::snprintf(key, sizeof key, "%.12g", gap);
        double& g = gap_max[tag + "|" + key];
        g = std::max(g, r);
      }
    }
  }
  for (const auto& j : rows) {
    if (j.contains("variant") && !j.contains("error") && j["variant"] == "dilation") {
      auto it = base.find(j["row"].get<std::string>() + "/" + j["function"].get<std::string>());
      if (it != base.end())
        series[j["theorem"].get<std::string>() + "_drift"].emplace_back(j["lambda"].get<double>(),
                                                                        j["ratio"].get<double>() / it->second);
    }
    if (j.contains("check") && j.contains("series")) {
      std::string name = j["id"];
      std::replace(name.begin(), name.end(), '/', '_');
      for (const auto& pt : j["series"]) series[name].emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
  }
  for (const auto& [key, g] : gap_max) {
    auto bar = key.find('|');
    series[key.substr(0, bar) + "_ratio_vs_gap"].emplace_back(std::stod(key.substr(bar + 1)), g);
  }
  for (auto& [name, pts] : series) {
    std::ofstream os(dir / (name + ".csv"));
    os.precision(17);
    os << "x,value\n";
    for (const auto& [x, v] : pts) os << x << ',' << v << '\n';
  }
}

}  // namespace gnforge
