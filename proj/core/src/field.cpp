#include "czx/field.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "czx/error.hpp"
#include "czx/numeric.hpp"

namespace czx {

namespace {

std::size_t product(const std::vector<std::size_t>& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace

Field::Field(std::vector<std::size_t> shape, double h, std::vector<double> origin)
    : shape_(std::move(shape)), h_(h), origin_(std::move(origin)) {
  if (shape_.empty() || shape_.size() > 3) throw Error(Errc::unsupported_dimension, "fields support n = 1, 2, 3");
  if (origin_.size() != shape_.size()) throw Error(Errc::invalid_input, "origin dimension mismatch");
  if (!(h_ > 0.0) || !std::isfinite(h_)) throw Error(Errc::invalid_input, "spacing must be positive");
  for (std::size_t s : shape_) {
    if (s == 0) throw Error(Errc::invalid_input, "empty grid axis");
  }
  values_.assign(product(shape_), 0.0);
}

Field::Field(std::vector<std::size_t> shape, double h, std::vector<double> origin,
             std::vector<double> values)
    : Field(std::move(shape), h, std::move(origin)) {
  if (values.size() != values_.size()) throw Error(Errc::invalid_input, "value count does not match grid shape");
  values_ = std::move(values);
  check_finite();
}

Field Field::sample(std::vector<std::size_t> shape, double h, std::vector<double> origin,
                    const std::function<double(std::span<const double>)>& fn) {
  Field f(std::move(shape), h, std::move(origin));
  std::vector<double> x(static_cast<std::size_t>(f.dim()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.center(i, x);
    f.values_[i] = fn(x);
  }
  f.check_finite();
  return f;
}

double Field::cell_volume() const noexcept { return std::pow(h_, dim()); }

void Field::center(std::size_t flat, std::span<double> out) const noexcept {
  for (int a = dim() - 1; a >= 0; --a) {
    const auto ax = static_cast<std::size_t>(a);
    const std::size_t i = flat % shape_[ax];
    flat /= shape_[ax];
    out[ax] = origin_[ax] + (static_cast<double>(i) + 0.5) * h_;
  }
}

std::vector<double> Field::center(std::size_t flat) const {
  std::vector<double> out(shape_.size());
  center(flat, out);
  return out;
}

std::vector<std::size_t> Field::unravel(std::size_t flat) const {
  std::vector<std::size_t> idx(shape_.size());
  for (int a = dim() - 1; a >= 0; --a) {
    const auto ax = static_cast<std::size_t>(a);
    idx[ax] = flat % shape_[ax];
    flat /= shape_[ax];
  }
  return idx;
}

std::size_t Field::ravel(std::span<const std::size_t> index) const noexcept {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) flat = flat * shape_[a] + index[a];
  return flat;
}

double Field::upper(int axis) const noexcept {
  const auto a = static_cast<std::size_t>(axis);
  return origin_[a] + static_cast<double>(shape_[a]) * h_;
}

bool Field::same_grid(const Field& other) const noexcept {
  return shape_ == other.shape_ && h_ == other.h_ && origin_ == other.origin_;
}

void Field::check_finite() const {
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(Errc::invalid_input, "field contains a non-finite value");
  }
}

ExponentQ::ExponentQ(double q_value) : q(q_value), conjugate(0.0) {
  if (!(q > 1.0) || !std::isfinite(q)) throw Error(Errc::invalid_exponent, "exponent must lie in (1, inf)");
  conjugate = q / (q - 1.0);
}

double lq_norm(const Field& f, double q) {
  if (!(q > 0.0) || std::isnan(q)) throw Error(Errc::invalid_exponent, "exponent must be positive");
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  std::vector<double> powers(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]);
    powers[i] = q == 2.0 ? a * a : (q == 1.0 ? a : std::pow(a, q));
  }
  const double s = pairwise_sum(powers) * f.cell_volume();
  return q == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / q);
}

double distribution_measure(const Field& f, double t) {
  if (std::isnan(t)) throw Error(Errc::invalid_input, "threshold is NaN");
  std::size_t count = 0;
  for (double v : f.values()) count += std::abs(v) > t ? 1 : 0;
  return static_cast<double>(count) * f.cell_volume();
}

double layer_cake_power_sum(std::vector<double> levels, double cell_measure, double p) {
  if (!(p >= 1.0)) throw Error(Errc::invalid_exponent, "layer-cake exponent must be >= 1");
  std::sort(levels.begin(), levels.end());
  // On [v_{k-1}, v_k) the distribution function equals (N - k) cells, and
  // p int t^{p-1} dt over that interval is v_k^p - v_{k-1}^p.
  const std::size_t n = levels.size();
  std::vector<double> terms;
  terms.reserve(n);
  double previous = 0.0;
  double previous_power = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = levels[k];
    if (!std::isfinite(v) || v < 0.0) throw Error(Errc::invalid_input, "layer-cake levels must be finite and >= 0");
    if (v == previous) continue;
    const double vp = std::pow(v, p);
    terms.push_back(static_cast<double>(n - k) * (vp - previous_power));
    previous = v;
    previous_power = vp;
  }
  return pairwise_sum(terms) * cell_measure;
}

double layer_cake_power_norm(const Field& f, double p) {
  std::vector<double> levels(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) levels[i] = std::abs(f[i]);
  return layer_cake_power_sum(std::move(levels), f.cell_volume(), p);
}

std::vector<double> Box::center() const {
  std::vector<double> c(lower.size());
  for (std::size_t a = 0; a < lower.size(); ++a) c[a] = 0.5 * (lower[a] + upper[a]);
  return c;
}

bool Box::contains(std::span<const double> x) const noexcept {
  for (std::size_t a = 0; a < lower.size(); ++a) {
    if (!(x[a] > lower[a] && x[a] < upper[a])) return false;
  }
  return true;
}

bool Box::meets_cell(std::span<const double> cell_lower, double h) const noexcept {
  for (std::size_t a = 0; a < lower.size(); ++a) {
    if (!(cell_lower[a] + h > lower[a] && cell_lower[a] < upper[a])) return false;
  }
  return true;
}

bool Box::inside(const Box& other) const noexcept {
  for (std::size_t a = 0; a < lower.size(); ++a) {
    if (lower[a] < other.lower[a] || upper[a] > other.upper[a]) return false;
  }
  return true;
}

DyadicCube::DyadicCube(int level, std::vector<std::int64_t> index, double root_side,
                       std::vector<double> root_origin)
    : level_(level), index_(std::move(index)), root_side_(root_side), root_origin_(std::move(root_origin)) {
  if (level_ < 0) throw Error(Errc::invalid_input, "dyadic level must be >= 0");
  if (index_.size() != root_origin_.size() || index_.empty()) throw Error(Errc::invalid_input, "dyadic index dimension mismatch");
  if (!(root_side_ > 0.0)) throw Error(Errc::invalid_input, "root side must be positive");
  const std::int64_t cells = std::int64_t{1} << level_;
  for (std::int64_t i : index_) {
    if (i < 0 || i >= cells) throw Error(Errc::out_of_domain, "dyadic index outside the root");
  }
}

DyadicCube DyadicCube::root(std::vector<double> origin, double side) {
  std::vector<std::int64_t> index(origin.size(), 0);
  return DyadicCube(0, std::move(index), side, std::move(origin));
}

double DyadicCube::side() const noexcept { return std::ldexp(root_side_, -level_); }

double DyadicCube::measure() const noexcept { return std::pow(side(), dim()); }

std::vector<double> DyadicCube::lower() const {
  std::vector<double> lo(index_.size());
  const double s = side();
  for (std::size_t a = 0; a < index_.size(); ++a) lo[a] = root_origin_[a] + static_cast<double>(index_[a]) * s;
  return lo;
}

Box DyadicCube::box() const {
  Box b;
  b.lower = lower();
  b.upper = b.lower;
  for (double& u : b.upper) u += side();
  return b;
}

bool DyadicCube::contains(std::span<const double> x) const noexcept {
  const double s = side();
  for (std::size_t a = 0; a < index_.size(); ++a) {
    const double lo = root_origin_[a] + static_cast<double>(index_[a]) * s;
    if (!(x[a] >= lo && x[a] < lo + s)) return false;
  }
  return true;
}

std::vector<DyadicCube> DyadicCube::children() const {
  const std::size_t n = index_.size();
  std::vector<DyadicCube> out;
  out.reserve(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::int64_t> idx(n);
    for (std::size_t a = 0; a < n; ++a) idx[a] = 2 * index_[a] + static_cast<std::int64_t>((mask >> (n - 1 - a)) & 1U);
    out.emplace_back(level_ + 1, std::move(idx), root_side_, root_origin_);
  }
  return out;
}

DyadicCube DyadicCube::parent() const {
  if (level_ == 0) throw Error(Errc::out_of_domain, "the root has no parent");
  std::vector<std::int64_t> idx(index_.size());
  for (std::size_t a = 0; a < index_.size(); ++a) idx[a] = index_[a] / 2;
  return DyadicCube(level_ - 1, std::move(idx), root_side_, root_origin_);
}

Box dilate(const Box& q, double a) {
  if (!(a > 0.0)) throw Error(Errc::invalid_input, "dilation factor must be positive");
  Box out = q;
  for (std::size_t i = 0; i < q.lower.size(); ++i) {
    const double c = 0.5 * (q.lower[i] + q.upper[i]);
    const double half = 0.5 * a * (q.upper[i] - q.lower[i]);
    out.lower[i] = c - half;
    out.upper[i] = c + half;
  }
  return out;
}

Box dilate(const DyadicCube& q, double a) { return dilate(q.box(), a); }

DyadicCube dyadic_cube_at(std::span<const double> x, int level, const DyadicCube& root) {
  if (static_cast<int>(x.size()) != root.dim()) throw Error(Errc::invalid_input, "point dimension mismatch");
  if (!root.contains(x)) throw Error(Errc::out_of_domain, "point outside the root cube");
  const double s = std::ldexp(root.side(), -level);
  const std::int64_t cells = std::int64_t{1} << (root.level() + level);
  std::vector<std::int64_t> idx(x.size());
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double offset = x[a] - root.root_origin()[a];
    idx[a] = std::clamp(static_cast<std::int64_t>(std::floor(offset / s)), std::int64_t{0}, cells - 1);
  }
  return DyadicCube(root.level() + level, std::move(idx), root.root_side(), root.root_origin());
}

std::vector<DyadicCube> dyadic_ancestors(std::span<const double> x, int depth,
                                         const DyadicCube& root) {
  if (depth < 0) throw Error(Errc::invalid_input, "depth must be >= 0");
  if (!root.contains(x)) throw Error(Errc::out_of_domain, "point outside the root cube");
  std::vector<DyadicCube> out;
  out.push_back(dyadic_cube_at(x, depth, root));
  while (out.back().level() > root.level()) out.push_back(out.back().parent());
  return out;
}

Field restrict_outside(const Field& f, const Box& region) {
  if (region.dim() != f.dim()) throw Error(Errc::invalid_input, "region dimension mismatch");
  Field out = f;
  std::vector<double> lo(static_cast<std::size_t>(f.dim()));
  const double h = f.spacing();
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.center(i, lo);
    for (double& c : lo) c -= 0.5 * h;
    if (region.meets_cell(lo, h)) out[i] = 0.0;
  }
  return out;
}

Field restrict_outside(const Field& f, const DyadicCube& q, double a) {
  return restrict_outside(f, dilate(q, a));
}

DyadicCube auto_root(const Field& f) {
  std::size_t m = 1;
  for (std::size_t s : f.shape()) m = std::max(m, s);
  std::size_t cells = 1;
  while (cells < m) cells *= 2;
  return DyadicCube::root(f.origin(), static_cast<double>(cells) * f.spacing());
}

double Support::extent(int axis, double h) const noexcept {
  if (empty) return 0.0;
  const auto a = static_cast<std::size_t>(axis);
  return static_cast<double>(last[a] - first[a] + 1) * h;
}

Support support_of(const Field& f) {
  Support s;
  const auto n = static_cast<std::size_t>(f.dim());
  s.first.assign(n, 0);
  s.last.assign(n, 0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    const auto idx = f.unravel(i);
    if (s.empty) {
      s.first = idx;
      s.last = idx;
      s.empty = false;
    } else {
      for (std::size_t a = 0; a < n; ++a) {
        s.first[a] = std::min(s.first[a], idx[a]);
        s.last[a] = std::max(s.last[a], idx[a]);
      }
    }
  }
  return s;
}

}  // namespace czx
