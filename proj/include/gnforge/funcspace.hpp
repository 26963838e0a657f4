#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gnforge/errors.hpp"

namespace gnforge {

using Point = std::array<double, 2>;  // second coordinate unused when n = 1

constexpr double kInf = std::numeric_limits<double>::infinity();

// Uniform cell-centred grid over the box [-L, L)^n.
class GridSpec {
 public:
  GridSpec(int dim, double half_width, std::size_t points_per_axis);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  std::size_t points_per_axis() const { return n_; }
  double spacing() const { return spacing_; }
  double cell_measure() const;
  double box_measure() const;
  std::size_t size() const;  // N^n

  double center(std::size_t k) const { return -half_width_ + (k + 0.5) * spacing_; }
  // Flat index is row-major: k = i*N + j for (x_i, y_j).
  Point point(std::size_t flat) const;

  GridSpec scaled(double factor) const { return GridSpec(dim_, half_width_ * factor, n_); }
  GridSpec refined() const { return GridSpec(dim_, half_width_, 2 * n_); }

  bool operator==(const GridSpec& o) const {
    return dim_ == o.dim_ && half_width_ == o.half_width_ && n_ == o.n_;
  }

 private:
  int dim_;
  double half_width_;
  std::size_t n_;
  double spacing_;
};

struct MultiIndex {
  std::array<int, 2> nu{0, 0};
  int dim = 1;
  int order() const { return nu[0] + (dim == 2 ? nu[1] : 0); }
};

// All multi-indices of exact order r in dimension n.
std::vector<MultiIndex> multi_indices(int dim, int order);

struct GaussianTerm {
  double amp = 1.0;
  Point center{0.0, 0.0};
  double width = 1.0;  // a in exp(-|x-c|^2/(4a))
};

struct GaussianMix {
  int dim = 1;
  std::vector<GaussianTerm> terms;

  double operator()(const Point& x) const;
  double total_mass() const;  // integral over R^n
};

struct BallIndicator {
  int dim = 1;
  double height = 1.0;
  double radius = 1.0;
  Point center{0.0, 0.0};

  double operator()(const Point& x) const;
};

class AnalyticFunction {
 public:
  AnalyticFunction(GaussianMix g);
  AnalyticFunction(BallIndicator b);

  int dim() const;
  bool is_gaussian_mix() const { return std::holds_alternative<GaussianMix>(v_); }
  const GaussianMix& mix() const;  // UnsupportedFamily otherwise
  const BallIndicator& ball() const;
  int max_derivative_order() const;  // INT_MAX for mixtures

  double operator()(const Point& x) const;
  AnalyticFunction scaled(double kappa) const;  // x -> kappa f(x)

 private:
  std::variant<GaussianMix, BallIndicator> v_;
};

AnalyticFunction dilate(const AnalyticFunction& f, double lambda);

// Exact D^nu of a Gaussian mixture (Hermite polynomial times Gaussian per term).
class DerivativeEvaluator {
 public:
  DerivativeEvaluator(GaussianMix g, MultiIndex nu);
  double operator()(const Point& x) const;
  const MultiIndex& index() const { return nu_; }

 private:
  GaussianMix g_;
  MultiIndex nu_;
};

DerivativeEvaluator derivative(const AnalyticFunction& f, const MultiIndex& nu);

// Physicists' Hermite polynomial H_k(s).
double hermite(int k, double s);

struct SampledField {
  GridSpec grid;
  std::vector<double> values;

  SampledField(GridSpec g, std::vector<double> v);
  explicit SampledField(GridSpec g) : grid(g), values(g.size(), 0.0) {}

  double max_abs() const;
  double lp_norm(double p) const;  // cell-sum quadrature, p = inf allowed
};

SampledField sample(const AnalyticFunction& f, const GridSpec& g);
SampledField sample(const std::function<double(const Point&)>& f, const GridSpec& g);
SampledField operator-(const SampledField& a, const SampledField& b);
SampledField operator+(const SampledField& a, const SampledField& b);
SampledField operator*(double k, const SampledField& a);

// x -> sum over |nu| = r of |D^nu f(x)|.
SampledField grad_magnitude_field(const AnalyticFunction& f, int r, const GridSpec& g);
// x -> Euclidean length of the gradient.
SampledField gradient_norm_field(const AnalyticFunction& f, const GridSpec& g);

// Box half-width leaving a negligible tail: c_max + 10 sqrt(2 a_max) for mixtures.
double default_half_width(const AnalyticFunction& f);
GridSpec default_grid(const AnalyticFunction& f, std::size_t points_per_axis);

// Zero-extend a field into a larger box with the same spacing (N grows by powers of two).
SampledField embed(const SampledField& f, std::size_t factor);

void to_json(nlohmann::json& j, const AnalyticFunction& f);
AnalyticFunction function_from_json(const nlohmann::json& j);
nlohmann::json grid_to_json(const GridSpec& g);

}  // namespace gnforge
