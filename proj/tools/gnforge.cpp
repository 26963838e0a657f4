// gnforge command line: norms, theorem verification, sweeps, reports, rearrangements.
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gnforge/funcspace.hpp"
#include "gnforge/lorentz.hpp"
#include "gnforge/rearrange.hpp"
#include "gnforge/smoothnorms.hpp"
#include "gnforge/verifier.hpp"

using namespace gnforge;
using json = nlohmann::json;

namespace {

constexpr int kConfigError = 1;
constexpr int kNumericError = 3;

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

double parse_index(const std::string& s) {
  if (s == "inf" || s == "Infinity") return kInf;
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
}

AnalyticFunction load_function(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    return function_from_json(j);
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void write_rows(const std::vector<json>& rows, std::ostream& os) {
  for (const auto& r : rows) os << r.dump() << '\n';
}

struct NormArgs {
  std::string func, kind = "besov";
  std::string s = "0", p = "2", q = "2", r;
  int m = -1, order = 1;
  std::size_t points = 0;
  double hmin = 0.0, hmax = 0.0;
  int nodes = 0;
};

int cmd_norm(const NormArgs& a) {
  AnalyticFunction f = load_function(a.func);
  const double s = parse_index(a.s), p = parse_index(a.p), q = parse_index(a.q);
  const std::size_t N = a.points ? a.points : (f.dim() == 1 ? 4096 : 256);
  const GridSpec g = default_grid(f, N);
  json out;
  if (a.kind == "lorentz") {
    out = {{"norm_kind", "lorentz"}, {"p", a.p}, {"r", a.q}, {"value", lorentz_quasinorm(f, LorentzIndex(p, q), g)}};
  } else if (a.kind == "sobolev") {
    out = {{"norm_kind", "sobolev_lorentz"}, {"order", a.order}, {"p", a.p}, {"r", a.q},
           {"value", sobolev_lorentz_seminorm(f, a.order, LorentzIndex(p, q), g)}};
  } else if (a.kind == "besov" || a.kind == "tl") {
    const int m = a.m >= 0 ? a.m : default_m(s);
    std::optional<QuadratureSpec> quad;
    if (a.nodes > 0) quad = QuadratureSpec(a.hmin, a.hmax, a.nodes);
    std::unique_ptr<ThermicSource> src;
    if (f.is_gaussian_mix()) src = std::make_unique<AnalyticSource>(f.mix(), g);
    else src = std::make_unique<SampledSource>(sample(f, g));
    auto eval = [&](int mm) {
      SmoothnessIndex idx(s, p, q, mm);
      if (a.kind == "tl") {
        if (!a.r.empty()) idx = idx.with_r(parse_index(a.r));
        return quad ? tl_lorentz_norm(*src, idx, *quad) : tl_lorentz_norm(*src, idx, AutoRange{});
      }
      return quad ? besov_norm(*src, idx, *quad) : besov_norm(*src, idx, AutoRange{});
    };
    out = eval(m).to_json();
    // the same quasinorm with the next admissible m, for comparison
    try {
      out["value_m_plus_1"] = eval(m + 1).value;
    } catch (const Error& e) {
      out["value_m_plus_1"] = nullptr;
      out["m_plus_1_error"] = e.what();
    }
  } else {
    throw ConfigError("unknown --kind '" + a.kind + "' (besov, tl, lorentz, sobolev)");
  }
  out["grid"] = grid_to_json(g);
  std::cout << out.dump() << '\n';
  return 0;
}

int cmd_sweep(const std::string& config, const std::string& out, const std::string& summary, unsigned threads,
              std::optional<Theorem> only) {
  SweepOutcome res = run_sweep(read_file(config), threads, only);
  if (out.empty() || out == "-") {
    write_rows(res.rows, std::cout);
  } else {
    std::ofstream os(out);
    if (!os) throw ConfigError("cannot write '" + out + "'");
    write_rows(res.rows, os);
  }
  if (!summary.empty()) {
    std::ofstream os(summary);
    if (!os) throw ConfigError("cannot write '" + summary + "'");
    os << res.summary.dump(2) << '\n';
  }
  std::cerr << res.summary.dump(2) << '\n';
  return res.exit_code;
}

int cmd_report(const std::string& in, const std::string& summary, const std::string& plots) {
  std::ifstream is(in);
  if (!is) throw ConfigError("cannot open '" + in + "'");
  std::vector<json> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  json s = summarize(rows);
  if (!summary.empty()) {
    std::ofstream os(summary);
    if (!os) throw ConfigError("cannot write '" + summary + "'");
    os << s.dump(2) << '\n';
  } else {
    std::cout << s.dump(2) << '\n';
  }
  if (!plots.empty()) write_plots(rows, plots);
  return exit_code_for(s);
}

int cmd_rearrange(const std::string& func, std::size_t points, const std::string& csv, const std::string& p,
                  const std::string& r) {
  AnalyticFunction f = load_function(func);
  const GridSpec g = default_grid(f, points ? points : (f.dim() == 1 ? 4096 : 256));
  StepProfile fs = rearrangement(sample(f, g));
  if (!csv.empty()) {
    std::ofstream os(csv);
    if (!os) throw ConfigError("cannot write '" + csv + "'");
    write_csv(os, fs);
  }
  json out = {{"steps", fs.size()}, {"support", fs.support_end()}, {"integral", fs.integral()},
              {"sup", fs.empty() ? 0.0 : fs.values().front()}, {"grid", grid_to_json(g)}};
  if (!p.empty()) out["lorentz"] = lorentz_norm(fs, LorentzIndex(parse_index(p), parse_index(r.empty() ? p : r)));
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"interpolation inequalities in heat-semigroup smoothness spaces: norms, checks and sweeps"};
  app.require_subcommand(1);

  NormArgs na;
  auto* norm = app.add_subcommand("norm", "evaluate one quasinorm of a function");
  norm->add_option("--func", na.func, "function descriptor (JSON)")->required();
  norm->add_option("--kind", na.kind, "besov, tl, lorentz or sobolev");
  norm->add_option("--s", na.s, "smoothness");
  norm->add_option("--p", na.p, "integrability (number or inf)");
  norm->add_option("--q", na.q, "secondary index (number or inf)");
  norm->add_option("--r", na.r, "Lorentz index of the TL aggregate (default p)");
  norm->add_option("--m", na.m, "derivative order in h (default smallest admissible)");
  norm->add_option("--order", na.order, "Sobolev order for --kind sobolev");
  norm->add_option("--points", na.points, "grid points per axis");
  norm->add_option("--hmin", na.hmin, "fixed quadrature lower end");
  norm->add_option("--hmax", na.hmax, "fixed quadrature upper end");
  norm->add_option("--nodes", na.nodes, "fixed quadrature node count (>= 50)");

  std::string config, out, summary, theorem, in, plots, func, csv, lp, lr;
  unsigned threads = 0;
  std::size_t points = 0;
  auto* verify = app.add_subcommand("verify", "run the rows of one theorem from a sweep config");
  verify->add_option("--theorem", theorem, "theorem tag")->required();
  verify->add_option("--config", config, "sweep config (JSON)")->required();
  verify->add_option("--out", out, "report file (default stdout)");
  verify->add_option("--summary", summary, "summary file");
  verify->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* sweep = app.add_subcommand("sweep", "run a full campaign");
  sweep->add_option("--config", config, "sweep config (JSON)")->required();
  sweep->add_option("--out", out, "report file (default stdout)");
  sweep->add_option("--summary", summary, "summary file");
  sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* report = app.add_subcommand("report", "summarize a report and export CSV plots");
  report->add_option("--in", in, "report file (JSON lines)")->required();
  report->add_option("--summary", summary, "summary file (default stdout)");
  report->add_option("--plots", plots, "directory for CSV series");

  auto* rearr = app.add_subcommand("rearrange", "decreasing rearrangement of a sampled function");
  rearr->add_option("--func", func, "function descriptor (JSON)")->required();
  rearr->add_option("--points", points, "grid points per axis");
  rearr->add_option("--csv", csv, "write the step profile as CSV");
  rearr->add_option("--lorentz-p", lp, "also report the Lorentz (p, r) norm");
  rearr->add_option("--lorentz-r", lr, "secondary Lorentz index (default p)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*norm) return cmd_norm(na);
    if (*verify) {
      Theorem t;
      try {
        t = theorem_from_tag(theorem);
      } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
      }
      return cmd_sweep(config, out, summary, threads, t);
    }
    if (*sweep) return cmd_sweep(config, out, summary, threads, std::nullopt);
    if (*report) return cmd_report(in, summary, plots);
    if (*rearr) return cmd_rearrange(func, points, csv, lp, lr);
  } catch (const ConfigError& e) {
    std::cerr << "gnforge: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    std::cerr << "gnforge: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "gnforge: internal error: " << e.what() << '\n';
    return kNumericError;
  }
  return 0;
}
