#include "gnforge/funcspace.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace gnforge {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double dist2(const Point& a, const Point& b, int dim) {
  double d0 = a[0] - b[0];
  double r = d0 * d0;
  if (dim == 2) {
    double d1 = a[1] - b[1];
    r += d1 * d1;
  }
  return r;
}

void check_dim(int dim) {
  if (dim != 1 && dim != 2) throw InvalidInput("dimension must be 1 or 2");
}

}  // namespace

GridSpec::GridSpec(int dim, double half_width, std::size_t points_per_axis)
    : dim_(dim), half_width_(half_width), n_(points_per_axis) {
  check_dim(dim);
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw InvalidInput("grid half-width must be positive and finite");
  if (n_ < 16 || !is_power_of_two(n_))
    throw InvalidInput("points per axis must be a power of two >= 16");
  spacing_ = 2.0 * half_width_ / static_cast<double>(n_);
}

double GridSpec::cell_measure() const { return dim_ == 1 ? spacing_ : spacing_ * spacing_; }

double GridSpec::box_measure() const {
  double w = 2.0 * half_width_;
  return dim_ == 1 ? w : w * w;
}

std::size_t GridSpec::size() const { return dim_ == 1 ? n_ : n_ * n_; }

Point GridSpec::point(std::size_t flat) const {
  if (dim_ == 1) return {center(flat), 0.0};
  return {center(flat / n_), center(flat % n_)};
}

std::vector<MultiIndex> multi_indices(int dim, int order) {
  check_dim(dim);
  std::vector<MultiIndex> out;
  if (dim == 1) {
    out.push_back({{order, 0}, 1});
  } else {
    for (int i = order; i >= 0; --i) out.push_back({{i, order - i}, 2});
  }
  return out;
}

double GaussianMix::operator()(const Point& x) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.amp * std::exp(-dist2(x, t.center, dim) / (4.0 * t.width));
  return s;
}

double GaussianMix::total_mass() const {
  double s = 0.0;
  for (const auto& t : terms) s += t.amp * std::pow(4.0 * M_PI * t.width, dim / 2.0);
  return s;
}

double BallIndicator::operator()(const Point& x) const {
  return dist2(x, center, dim) <= radius * radius ? height : 0.0;
}

AnalyticFunction::AnalyticFunction(GaussianMix g) : v_(std::move(g)) {
  const auto& m = std::get<GaussianMix>(v_);
  check_dim(m.dim);
  for (const auto& t : m.terms) {
    if (!(t.width > 0.0)) throw InvalidInput("gaussian width must be positive");
    if (!std::isfinite(t.amp)) throw InvalidInput("gaussian amplitude must be finite");
  }
}

AnalyticFunction::AnalyticFunction(BallIndicator b) : v_(b) {
  check_dim(b.dim);
  if (!(b.radius > 0.0)) throw InvalidInput("ball radius must be positive");
  if (!(b.height > 0.0)) throw InvalidInput("ball height must be positive");
}

int AnalyticFunction::dim() const {
  return std::visit([](const auto& f) { return f.dim; }, v_);
}

const GaussianMix& AnalyticFunction::mix() const {
  if (!is_gaussian_mix()) throw UnsupportedFamily("operation needs a gaussian mixture");
  return std::get<GaussianMix>(v_);
}

const BallIndicator& AnalyticFunction::ball() const {
  if (is_gaussian_mix()) throw UnsupportedFamily("operation needs a ball indicator");
  return std::get<BallIndicator>(v_);
}

int AnalyticFunction::max_derivative_order() const { return is_gaussian_mix() ? INT_MAX : 0; }

double AnalyticFunction::operator()(const Point& x) const {
  return std::visit([&](const auto& f) { return f(x); }, v_);
}

AnalyticFunction AnalyticFunction::scaled(double kappa) const {
  if (is_gaussian_mix()) {
    GaussianMix g = mix();
    for (auto& t : g.terms) t.amp *= kappa;
    return g;
  }
  if (!(kappa > 0.0)) throw InvalidInput("ball indicator can only be scaled by kappa > 0");
  BallIndicator b = ball();
  b.height *= kappa;
  return b;
}

AnalyticFunction dilate(const AnalyticFunction& f, double lambda) {
  if (!(lambda > 0.0)) throw InvalidInput("dilation factor must be positive");
  if (f.is_gaussian_mix()) {
    GaussianMix g = f.mix();
    for (auto& t : g.terms) {
      t.width /= lambda * lambda;
      t.center = {t.center[0] / lambda, t.center[1] / lambda};
    }
    return g;
  }
  BallIndicator b = f.ball();
  b.radius /= lambda;
  b.center = {b.center[0] / lambda, b.center[1] / lambda};
  return b;
}

double hermite(int k, double s) {
  if (k == 0) return 1.0;
  double hm = 1.0, h = 2.0 * s;
  for (int j = 1; j < k; ++j) {
    double hn = 2.0 * s * h - 2.0 * j * hm;
    hm = h;
    h = hn;
  }
  return h;
}

DerivativeEvaluator::DerivativeEvaluator(GaussianMix g, MultiIndex nu) : g_(std::move(g)), nu_(nu) {
  if (nu_.dim != g_.dim) throw InvalidInput("multi-index dimension does not match function");
  if (nu_.nu[0] < 0 || nu_.nu[1] < 0) throw InvalidInput("multi-index components must be >= 0");
}

double DerivativeEvaluator::operator()(const Point& x) const {
  double sum = 0.0;
  for (const auto& t : g_.terms) {
    double two_sqrt_a = 2.0 * std::sqrt(t.width);
    double v = t.amp;
    for (int ax = 0; ax < g_.dim; ++ax) {
      int k = nu_.nu[ax];
      double s = (x[ax] - t.center[ax]) / two_sqrt_a;
      double f = std::exp(-s * s);
      if (k > 0) f *= (k % 2 ? -1.0 : 1.0) * std::pow(two_sqrt_a, -k) * hermite(k, s);
      v *= f;
    }
    sum += v;
  }
  return sum;
}

DerivativeEvaluator derivative(const AnalyticFunction& f, const MultiIndex& nu) {
  if (!f.is_gaussian_mix()) {
    if (nu.order() == 0) throw UnsupportedDerivative("ball indicator has no derivative evaluator");
    throw UnsupportedDerivative("ball indicator is not differentiable");
  }
  return DerivativeEvaluator(f.mix(), nu);
}

SampledField::SampledField(GridSpec g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw InvalidInput("field length does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw InvalidInput("field contains a non-finite value");
}

double SampledField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

double SampledField::lp_norm(double p) const {
  if (std::isinf(p)) return max_abs();
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v), p);
  return std::pow(s * grid.cell_measure(), 1.0 / p);
}

SampledField sample(const std::function<double(const Point&)>& f, const GridSpec& g) {
  SampledField out(g);
  for (std::size_t k = 0; k < g.size(); ++k) out.values[k] = f(g.point(k));
  return out;
}

SampledField sample(const AnalyticFunction& f, const GridSpec& g) {
  if (f.dim() != g.dim()) throw InvalidInput("function and grid dimensions differ");
  return sample([&](const Point& x) { return f(x); }, g);
}

SampledField operator-(const SampledField& a, const SampledField& b) {
  if (!(a.grid == b.grid)) throw InvalidInput("fields live on different grids");
  SampledField out(a.grid);
  for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = a.values[k] - b.values[k];
  return out;
}

SampledField operator+(const SampledField& a, const SampledField& b) {
  if (!(a.grid == b.grid)) throw InvalidInput("fields live on different grids");
  SampledField out(a.grid);
  for (std::size_t k = 0; k < a.values.size(); ++k) out.values[k] = a.values[k] + b.values[k];
  return out;
}

SampledField operator*(double k, const SampledField& a) {
  SampledField out(a.grid);
  for (std::size_t i = 0; i < a.values.size(); ++i) out.values[i] = k * a.values[i];
  return out;
}

SampledField grad_magnitude_field(const AnalyticFunction& f, int r, const GridSpec& g) {
  if (r < 1) throw InvalidInput("derivative order must be positive");
  if (f.dim() != g.dim()) throw InvalidInput("function and grid dimensions differ");
  std::vector<DerivativeEvaluator> ev;
  for (const auto& nu : multi_indices(f.dim(), r)) ev.push_back(derivative(f, nu));
  return sample(
      [&](const Point& x) {
        double s = 0.0;
        for (const auto& d : ev) s += std::abs(d(x));
        return s;
      },
      g);
}

SampledField gradient_norm_field(const AnalyticFunction& f, const GridSpec& g) {
  if (f.dim() != g.dim()) throw InvalidInput("function and grid dimensions differ");
  std::vector<DerivativeEvaluator> ev;
  for (const auto& nu : multi_indices(f.dim(), 1)) ev.push_back(derivative(f, nu));
  return sample(
      [&](const Point& x) {
        double s = 0.0;
        for (const auto& d : ev) {
          double v = d(x);
          s += v * v;
        }
        return std::sqrt(s);
      },
      g);
}

double default_half_width(const AnalyticFunction& f) {
  if (f.is_gaussian_mix()) {
    double cmax = 0.0, amax = 0.0;
    for (const auto& t : f.mix().terms) {
      for (int ax = 0; ax < f.dim(); ++ax) cmax = std::max(cmax, std::abs(t.center[ax]));
      amax = std::max(amax, t.width);
    }
    if (amax == 0.0) amax = 1.0;
    return cmax + 10.0 * std::sqrt(2.0 * amax);
  }
  const auto& b = f.ball();
  double cmax = std::max(std::abs(b.center[0]), b.dim == 2 ? std::abs(b.center[1]) : 0.0);
  return 2.0 * (cmax + b.radius);
}

GridSpec default_grid(const AnalyticFunction& f, std::size_t points_per_axis) {
  return GridSpec(f.dim(), default_half_width(f), points_per_axis);
}

SampledField embed(const SampledField& f, std::size_t factor) {
  if (factor == 0 || !is_power_of_two(factor)) throw InvalidInput("embed factor must be a power of two");
  const GridSpec& g = f.grid;
  std::size_t n = g.points_per_axis(), big = n * factor, off = (big - n) / 2;
  GridSpec gb(g.dim(), g.half_width() * static_cast<double>(factor), big);
  SampledField out(gb);
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) out.values[i + off] = f.values[i];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.values[(i + off) * big + j + off] = f.values[i * n + j];
  }
  return out;
}

namespace {

nlohmann::json point_json(const Point& p, int dim) {
  nlohmann::json a = nlohmann::json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

Point point_from(const nlohmann::json& j, int& dim) {
  if (!j.is_array() || j.empty() || j.size() > 2) throw InvalidInput("center must be an array of 1 or 2 numbers");
  int d = static_cast<int>(j.size());
  if (dim == 0) dim = d;
  if (d != dim) throw InvalidInput("inconsistent center dimensions");
  Point p{0.0, 0.0};
  for (int i = 0; i < d; ++i) p[i] = j.at(i).get<double>();
  return p;
}

}  // namespace

void to_json(nlohmann::json& j, const AnalyticFunction& f) {
  if (f.is_gaussian_mix()) {
    const auto& g = f.mix();
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : g.terms)
      terms.push_back({{"amp", t.amp}, {"center", point_json(t.center, g.dim)}, {"width", t.width}});
    j = {{"family", "gaussian_mix"}, {"terms", terms}};
  } else {
    const auto& b = f.ball();
    j = {{"family", "ball"}, {"height", b.height}, {"radius", b.radius}, {"center", point_json(b.center, b.dim)}};
  }
}

AnalyticFunction function_from_json(const nlohmann::json& j) {
  try {
    std::string fam = j.at("family").get<std::string>();
    if (fam == "gaussian_mix") {
      GaussianMix g;
      int dim = 0;
      for (const auto& t : j.at("terms")) {
        GaussianTerm term;
        term.amp = t.at("amp").get<double>();
        term.center = point_from(t.at("center"), dim);
        term.width = t.at("width").get<double>();
        g.terms.push_back(term);
      }
      if (g.terms.empty()) throw InvalidInput("gaussian_mix needs at least one term");
      g.dim = dim;
      return g;
    }
    if (fam == "ball") {
      BallIndicator b;
      int dim = 0;
      b.center = point_from(j.at("center"), dim);
      b.dim = dim;
      b.height = j.at("height").get<double>();
      b.radius = j.at("radius").get<double>();
      return b;
    }
    throw UnsupportedFamily("unknown family '" + fam + "'");
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("bad function descriptor: ") + e.what());
  }
}

nlohmann::json grid_to_json(const GridSpec& g) {
  return {{"dim", g.dim()}, {"half_width", g.half_width()}, {"points_per_axis", g.points_per_axis()}};
}

}  // namespace gnforge
