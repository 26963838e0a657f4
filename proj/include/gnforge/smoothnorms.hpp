#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gnforge/funcspace.hpp"
#include "gnforge/lorentz.hpp"

namespace gnforge {

namespace heat {
class Convolver;
}

// smallest admissible m (2m > s)
int default_m(double s);

struct SmoothnessIndex {
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  int m = 0;
  double r = 0.0;  // Lorentz secondary index for TL-Lorentz; 0 means r = p

  SmoothnessIndex(double s, double p, double q, int m);
  SmoothnessIndex(double s, double p, double q);  // m = default_m(s)
  double lorentz_r() const { return r > 0.0 ? r : p; }
  SmoothnessIndex with_r(double r) const;
};

struct QuadratureSpec {
  double hmin;
  double hmax;
  int nodes;  // log-spaced, >= 50
  QuadratureSpec(double hmin, double hmax, int nodes);
  double du() const;
  double node(int k) const;
};

// Auto-ranged log lattice h_k = exp(k / per_efold), anchored at h = 1 and grown
// by `grow` e-folds at a time until both ends are negligible.
struct AutoRange {
  int per_efold = 8;
  int grow = 4;
  double max_span = 240.0;  // e-folds
  double negligible = 1e-12;
  double plateau_tol = 1e-4;
  double sup_negligible = 1e-3;  // q = inf: endpoint below this fraction of the peak and falling outward
};

// d^m/dh^m P_h f as a field or through its L^p norm over R^n.
class ThermicSource {
 public:
  virtual ~ThermicSource() = default;
  virtual int dim() const = 0;
  virtual bool has_field_grid() const = 0;
  virtual const GridSpec& field_grid() const = 0;
  virtual SampledField field(double h, int m) const = 0;
  virtual std::vector<double> values(double h, int m, const std::vector<std::size_t>& flat) const;
  virtual double norm(double h, int m, double p) const = 0;
  // starting h window for auto ranging
  virtual std::pair<double, double> h_hint() const = 0;
  virtual bool is_zero() const = 0;
};

class AnalyticSource : public ThermicSource {
 public:
  explicit AnalyticSource(GaussianMix f, std::optional<GridSpec> field_grid = std::nullopt);
  AnalyticSource(const AnalyticFunction& f, std::optional<GridSpec> field_grid = std::nullopt);

  int dim() const override { return f_.dim; }
  bool has_field_grid() const override { return grid_.has_value(); }
  const GridSpec& field_grid() const override;
  SampledField field(double h, int m) const override;
  std::vector<double> values(double h, int m, const std::vector<std::size_t>& flat) const override;
  double norm(double h, int m, double p) const override;
  std::pair<double, double> h_hint() const override;
  bool is_zero() const override;

  const GaussianMix& mix() const { return f_; }
  // grid-free closed form where available (m = 0, p in {1,2,inf} one term; p = 2 any mix)
  std::optional<double> closed_form_norm(double h, int m, double p) const;
  // always the grid / search path
  double grid_norm(double h, int m, double p) const;

 private:
  GaussianMix f_;
  std::optional<GridSpec> grid_;
};

class SampledSource : public ThermicSource {
 public:
  explicit SampledSource(const SampledField& f);
  ~SampledSource() override;

  int dim() const override { return grid_.dim(); }
  bool has_field_grid() const override { return true; }
  const GridSpec& field_grid() const override { return grid_; }
  SampledField field(double h, int m) const override;
  double norm(double h, int m, double p) const override;
  std::pair<double, double> h_hint() const override;
  bool is_zero() const override { return zero_; }

 private:
  GridSpec grid_;
  std::unique_ptr<heat::Convolver> conv_;
  double support_radius_ = 0.0;  // sup-norm radius of the nonzero cells
  bool zero_ = false;
};

struct NormResult {
  std::string kind;
  SmoothnessIndex idx;
  QuadratureSpec quad;
  double value = 0.0;
  double residual_lo = 0.0;  // endpoint integrand relative to the peak
  double residual_hi = 0.0;
  bool plateau = false;      // q = inf sup approached at an end of the range
  std::vector<std::pair<double, double>> profile;  // (h, h^{m-s/2} ||d^m P_h f||_p)

  nlohmann::json to_json() const;
};

struct Aggregate {
  SampledField field;
  QuadratureSpec quad;
  double residual_lo = 0.0;
  double residual_hi = 0.0;
  std::size_t plateau_points = 0;
};

NormResult besov_norm(const ThermicSource& src, const SmoothnessIndex& idx, const QuadratureSpec& quad);
NormResult besov_norm(const ThermicSource& src, const SmoothnessIndex& idx, const AutoRange& ar = {});
NormResult besov_norm(const AnalyticFunction& f, const SmoothnessIndex& idx, const AutoRange& ar = {});
NormResult besov_norm(const SampledField& f, const SmoothnessIndex& idx, const AutoRange& ar = {});

Aggregate tl_pointwise_aggregate(const ThermicSource& src, const SmoothnessIndex& idx, const QuadratureSpec& quad);
Aggregate tl_pointwise_aggregate(const ThermicSource& src, const SmoothnessIndex& idx, const AutoRange& ar = {});

// Lorentz (p, r) norm of the rearranged aggregate; r = p gives the plain TL norm.
NormResult tl_lorentz_norm(const ThermicSource& src, const SmoothnessIndex& idx, const AutoRange& ar = {});
NormResult tl_lorentz_norm(const ThermicSource& src, const SmoothnessIndex& idx, const QuadratureSpec& quad);

double sobolev_lorentz_seminorm(const AnalyticFunction& f, int r, const LorentzIndex& idx, const GridSpec& g);
double lorentz_quasinorm(const AnalyticFunction& f, const LorentzIndex& idx, const GridSpec& g);

}  // namespace gnforge
