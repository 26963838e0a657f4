#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnforge/funcspace.hpp"
#include "gnforge/smoothnorms.hpp"

namespace gnforge {

enum class Theorem { sobolev_gn, sobolev_lorentz, weak_type, FF, BB, FB, BF, wadade1, wadade2 };

std::string theorem_tag(Theorem t);
Theorem theorem_from_tag(const std::string& tag);  // InvalidInput on unknown tags
const std::vector<Theorem>& all_theorems();

struct GNParameters {
  double r = 1.0;
  double s = -1.0;
  double p1 = 1.0, q1 = 1.0;
  double p2 = kInf, q2 = kInf;

  double theta() const { return r / (r - s); }
  double p() const;  // 1/p = (1-theta)/p1 + theta/p2
  double q() const;
  nlohmann::json to_json() const;
  static GNParameters from_json(const nlohmann::json& j);
};

// Lorentz-Sobolev case as a GN instance: s = r - n/p, p1 = q1 = q2 = p, p2 = inf.
GNParameters sobolev_lorentz_parameters(int n, int r, double p);

struct WadadeParameters {
  double p = 2.0, q = 4.0;  // 1 < p < q < inf
  double r = 2.0, rho = 2.0;
  nlohmann::json to_json() const;
  static WadadeParameters from_json(const nlohmann::json& j);
};

// Empty when admissible, otherwise the reason.
std::optional<std::string> admissibility_issue(Theorem t, const GNParameters& gp, int dim);
std::optional<std::string> admissibility_issue(const WadadeParameters& wp);
void require_admissible(Theorem t, const GNParameters& gp, int dim);  // AdmissibilityViolation

struct FactorMeta {
  std::string name;
  int m = -1;  // -1 for non-thermic quantities
  int nodes = 0;
  double residual_lo = 0.0, residual_hi = 0.0;
  bool plateau = false;
};

struct RatioReport {
  std::string theorem;
  nlohmann::json params;
  std::string function_id;
  double lambda = 1.0;
  double lhs = 0.0;
  std::array<double, 2> factors{};
  std::array<double, 2> exponents{};
  double ratio = 0.0;  // lhs / (factors[0]^exponents[0] factors[1]^exponents[1])
  std::vector<FactorMeta> quad;

  nlohmann::json to_json() const;
};

RatioReport verify_sobolev_gn(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g);
RatioReport verify_sobolev_lorentz(const AnalyticFunction& f, int r, double p, const GridSpec& g);
// max over t of f**(t) / ((grad f)**(t)^{1-theta} t^{-theta/p2} ||f||_B^theta)
RatioReport verify_weak_type(const AnalyticFunction& f, const GNParameters& gp, const std::vector<double>& tgrid,
                             const GridSpec& g);
RatioReport verify_FF(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g);
RatioReport verify_BB(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g);
RatioReport verify_FB(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g);
RatioReport verify_BF(const AnalyticFunction& f, const GNParameters& gp, const GridSpec& g);
std::array<RatioReport, 2> verify_wadade(const AnalyticFunction& f, const WadadeParameters& wp, const GridSpec& g);

// Dispatch on the tag; wadade tags read WadadeParameters from `params`, the rest GNParameters.
RatioReport verify(Theorem t, const AnalyticFunction& f, const nlohmann::json& params, const GridSpec& g);

// m used for the Triebel-Lizorkin aggregates H and G (m > r/2, m >= 1)
int tl_m(double r);

struct EstprodResult {
  double constant = 0.0;    // 4 / ((m-1)! r^{1-theta} |s|^theta)
  double max_margin = 0.0;  // max over t of lhs/rhs
  bool holds = false;       // max_margin <= 1 + 1e-2
  std::vector<double> t, lhs, rhs;
  nlohmann::json to_json() const;
};

// f*(2t) <= C H*(t)^{1-theta} G*(t)^theta on the t grid (cell-aligned times if empty).
EstprodResult verify_pointwise_estprod(const AnalyticFunction& f, double r, double s, int m,
                                       const std::optional<QuadratureSpec>& quad, std::vector<double> tgrid,
                                       const GridSpec& g);

// ---- function families

enum class FamilyKind { positive, balanced };

struct FamilyMember {
  std::string id;
  AnalyticFunction f;
};

// Gaussian mixtures with 1-3 terms; balanced members have zero total mass.
std::vector<FamilyMember> gaussian_family(FamilyKind kind, int dim, int count, std::uint64_t seed);

// whether a positive mixture has finite right-hand factors for this theorem
bool positive_family_ok(Theorem t, const nlohmann::json& params, int dim);

// ---- sweep

struct SweepOutcome {
  std::vector<nlohmann::json> rows;  // sorted by "id"
  nlohmann::json summary;
  int exit_code = 0;  // 0 ok, 2 explicit-constant failure, 3 numeric failure
};

// ConfigError (message starts with "line N:") on malformed configs.
// `only` restricts the run to rows of one theorem (checks are dropped).
SweepOutcome run_sweep(const std::string& config_text, unsigned threads = 0, std::optional<Theorem> only = std::nullopt);
nlohmann::json summarize(const std::vector<nlohmann::json>& rows);
int exit_code_for(const nlohmann::json& summary);
// CSV (x, value) series per theorem and per check
void write_plots(const std::vector<nlohmann::json>& rows, const std::filesystem::path& dir);

}  // namespace gnforge
