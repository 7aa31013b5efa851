#include "czx/maximal.hpp"

#include <algorithm>
#include <cmath>

#include "czx/error.hpp"
#include "czx/numeric.hpp"

namespace czx {

namespace {

// Offset of the root origin from the grid origin, in cells; throws when the
// root is not aligned with the grid.
std::vector<std::int64_t> root_offset(const Field& f, const DyadicCube& root, int& depth) {
  if (root.dim() != f.dim()) throw Error(Errc::invalid_input, "root dimension mismatch");
  if (root.level() != 0) throw Error(Errc::invalid_input, "maximal functions need a level-0 root");
  const double h = f.spacing();
  const double cells = root.side() / h;
  const double k = std::round(std::log2(cells));
  if (!(cells >= 1.0) || std::abs(cells - std::ldexp(1.0, static_cast<int>(k))) > 1e-9 * cells) {
    throw Error(Errc::invalid_input, "root side must be a power-of-two multiple of the spacing");
  }
  depth = static_cast<int>(k);
  std::vector<std::int64_t> offset(static_cast<std::size_t>(f.dim()));
  for (std::size_t a = 0; a < offset.size(); ++a) {
    const double d = (root.root_origin()[a] - f.origin()[a]) / h;
    if (std::abs(d - std::round(d)) > 1e-9) throw Error(Errc::invalid_input, "root origin not aligned with the grid");
    offset[a] = static_cast<std::int64_t>(std::llround(d));
  }
  return offset;
}

}  // namespace

Field embed_in_root(const Field& f, const DyadicCube& root) {
  int depth = 0;
  const auto offset = root_offset(f, root, depth);
  const auto n = static_cast<std::size_t>(f.dim());
  const std::size_t side = std::size_t{1} << depth;
  Field out(std::vector<std::size_t>(n, side), f.spacing(), root.root_origin());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    const auto idx = f.unravel(i);
    std::size_t flat = 0;
    for (std::size_t a = 0; a < n; ++a) {
      const std::int64_t j = static_cast<std::int64_t>(idx[a]) - offset[a];
      if (j < 0 || j >= static_cast<std::int64_t>(side)) throw Error(Errc::out_of_domain, "support of f escapes the root cube");
      flat = flat * side + static_cast<std::size_t>(j);
    }
    out[flat] = f[i];
  }
  return out;
}

DyadicPyramid::DyadicPyramid(const Field& f, const DyadicCube& root) : root_(root), h_(f.spacing()) {
  const Field g = embed_in_root(f, root);
  depth_ = static_cast<int>(std::lround(std::log2(static_cast<double>(g.shape()[0]))));
  const auto n = static_cast<std::size_t>(g.dim());
  levels_.resize(static_cast<std::size_t>(depth_) + 1);
  auto& finest = levels_.back();
  finest.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) finest[i] = std::abs(g[i]);
  // Each coarser average is the mean of its 2^n children.
  const double children = std::ldexp(1.0, static_cast<int>(n));
  for (int level = depth_ - 1; level >= 0; --level) {
    const std::size_t side = std::size_t{1} << level;
    const std::size_t fine_side = side * 2;
    auto& cur = levels_[static_cast<std::size_t>(level)];
    const auto& fine = levels_[static_cast<std::size_t>(level) + 1];
    std::size_t count = 1;
    for (std::size_t a = 0; a < n; ++a) count *= side;
    cur.assign(count, 0.0);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t flat = 0; flat < count; ++flat) {
      std::size_t rest = flat;
      for (std::size_t a = n; a-- > 0;) {
        idx[a] = rest % side;
        rest /= side;
      }
      long double sum = 0.0L;
      for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::size_t child = 0;
        for (std::size_t a = 0; a < n; ++a) child = child * fine_side + 2 * idx[a] + ((mask >> (n - 1 - a)) & 1U);
        sum += fine[child];
      }
      cur[flat] = static_cast<double>(sum / children);
    }
  }
  mass_ = levels_[0][0] * root.measure();
}

double DyadicPyramid::average(int level, std::span<const std::int64_t> index) const {
  if (level < 0 || level > depth_) throw Error(Errc::invalid_input, "level outside the pyramid");
  const auto side = static_cast<std::int64_t>(std::size_t{1} << level);
  std::size_t flat = 0;
  for (std::int64_t i : index) {
    if (i < 0 || i >= side) throw Error(Errc::out_of_domain, "cube index outside the root");
    flat = flat * static_cast<std::size_t>(side) + static_cast<std::size_t>(i);
  }
  return levels_[static_cast<std::size_t>(level)][flat];
}

double DyadicPyramid::average(const DyadicCube& q) const {
  if (q.root_side() != root_.root_side() || q.root_origin() != root_.root_origin()) {
    throw Error(Errc::invalid_input, "cube belongs to a different dyadic tree");
  }
  return average(q.level(), q.index());
}

MaximalResult dyadic_maximal(const Field& f, const DyadicCube& root) {
  const DyadicPyramid pyramid(f, root);
  const int depth = pyramid.depth();
  const auto n = static_cast<std::size_t>(f.dim());
  // Running maximum pushed down the tree one level at a time.
  std::vector<double> best{pyramid.average_flat(0, 0)};
  for (int level = 1; level <= depth; ++level) {
    const std::size_t side = std::size_t{1} << level;
    std::size_t count = 1;
    for (std::size_t a = 0; a < n; ++a) count *= side;
    std::vector<double> next(count);
    for (std::size_t flat = 0; flat < count; ++flat) {
      std::size_t rest = flat;
      std::size_t parent = 0;
      std::size_t scale = 1;
      for (std::size_t a = n; a-- > 0;) {
        parent += ((rest % side) / 2) * scale;
        rest /= side;
        scale *= side / 2;
      }
      next[flat] = std::max(best[parent], pyramid.average_flat(level, flat));
    }
    best = std::move(next);
  }
  MaximalResult out;
  const std::size_t side = std::size_t{1} << depth;
  out.mf = Field(std::vector<std::size_t>(n, side), f.spacing(), root.root_origin(), std::move(best));
  out.levels_used = depth;
  out.root = root;
  out.mass = pyramid.mass();
  return out;
}

MaximalResult dyadic_maximal(const Field& f) { return dyadic_maximal(f, auto_root(f)); }

double MaximalResult::measure_above(double t) const {
  if (std::isnan(t)) throw Error(Errc::invalid_input, "threshold is NaN");
  double inside = distribution_measure(mf, t);
  if (t < 0.0) return kInfinity;
  // Exterior shells A_k \ A_{k-1}: M f = mass / |A_k| there.
  const double root_measure = root.measure();
  const double grow = std::ldexp(1.0, root.dim());
  double shell = root_measure;
  for (int k = 1; k < 2000; ++k) {
    const double outer = shell * grow;
    if (!(mass / outer > t)) break;
    inside += outer - shell;
    shell = outer;
  }
  return inside;
}

double MaximalResult::power_integral(double p) const {
  if (!(p > 1.0)) throw Error(Errc::invalid_exponent, "exterior tail of M f needs p > 1");
  const double interior = std::pow(czx::lq_norm(mf, p), p);
  if (mass == 0.0) return interior;
  const int n = root.dim();
  // sum_{k>=1} (m / (G 2^{nk}))^p G (2^{nk} - 2^{n(k-1)})
  //   = m^p G^{1-p} (1 - 2^{-n}) r / (1 - r),  r = 2^{n(1-p)}
  const double r = std::exp2(n * (1.0 - p));
  const double g = root.measure();
  return interior + std::pow(mass, p) * std::pow(g, 1.0 - p) * (1.0 - std::exp2(-n)) * r / (1.0 - r);
}

double MaximalResult::lq_norm(double q) const { return std::pow(power_integral(q), 1.0 / q); }

SweepReport weak11_check(const Field& f, const DyadicCube& root, std::span<const double> lambdas) {
  SweepReport report("weak11", {"lambda", "measure", "bound"});
  const auto m = dyadic_maximal(f, root);
  const double l1 = czx::lq_norm(f, 1.0);
  double worst = 0.0;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw Error(Errc::invalid_input, "lambda must be positive");
    const double measure = m.measure_above(lambda);
    const double bound = l1 / lambda;
    const bool ok = lambda * measure <= l1 * (1.0 + 1e-12);
    if (l1 > 0.0) worst = std::max(worst, lambda * measure / l1);
    report.add_row({lambda, measure, bound}, ok ? Verdict::pass : Verdict::fail);
  }
  report.set_metric("worst_ratio", worst);
  return report;
}

SweepReport weak11_check(const Field& f, std::span<const double> lambdas) {
  return weak11_check(f, auto_root(f), lambdas);
}

SweepReport strong_qq_check(const Field& f, double q) {
  const ExponentQ e(q);
  SweepReport report("strong-qq", {"q", "mf_norm", "f_norm", "ratio", "bound"});
  const auto m = dyadic_maximal(f);
  const double mq = m.lq_norm(q);
  const double fq = czx::lq_norm(f, q);
  const double ratio = fq > 0.0 ? mq / fq : 0.0;
  const bool ok = std::isfinite(ratio) && ratio <= e.conjugate * (1.0 + 1e-12);
  report.add_row({q, mq, fq, ratio, e.conjugate}, ok ? Verdict::pass : Verdict::fail);
  report.set_metric("ratio", ratio);
  return report;
}

}  // namespace czx
