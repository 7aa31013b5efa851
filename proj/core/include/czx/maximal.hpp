#pragma once

#include <span>
#include <vector>

#include "czx/field.hpp"
#include "czx/report.hpp"

namespace czx {

/// Averages of |f| over every dyadic cube of a root aligned with the grid:
/// level k holds 2^{kn} cubes, level `depth` is the grid itself.
class DyadicPyramid {
 public:
  DyadicPyramid(const Field& f, const DyadicCube& root);

  const DyadicCube& root() const noexcept { return root_; }
  int depth() const noexcept { return depth_; }
  int dim() const noexcept { return root_.dim(); }
  double cell_spacing() const noexcept { return h_; }
  /// int |f| over the root.
  double mass() const noexcept { return mass_; }

  /// Average over the cube with the given level and per-axis index.
  double average(int level, std::span<const std::int64_t> index) const;
  double average(const DyadicCube& q) const;
  /// Average stored at flat (row-major) position `flat` of `level`.
  double average_flat(int level, std::size_t flat) const noexcept { return levels_[static_cast<std::size_t>(level)][flat]; }
  std::size_t cubes_per_axis(int level) const noexcept { return std::size_t{1} << level; }

 private:
  DyadicCube root_;
  int depth_ = 0;
  double h_ = 1.0;
  double mass_ = 0.0;
  std::vector<std::vector<double>> levels_;
};

/// Dyadic maximal function on the root grid together with the chain of
/// dyadic ancestors of the root, A_k = root dilated by 2^k from its lower
/// corner, on which M f equals mass / |A_k| on A_k \ A_{k-1}.
struct MaximalResult {
  Field mf;
  int levels_used = 0;
  DyadicCube root;
  double mass = 0.0;

  /// |{M f > t}| over all of R^n.
  double measure_above(double t) const;
  /// int (M f)^p over R^n, p > 1.
  double power_integral(double p) const;
  double lq_norm(double q) const;
};

/// Grid-aligned root with power-of-two side in cells. Throws
/// Errc::out_of_domain when a nonzero cell of f lies outside it and
/// Errc::invalid_input when the root is not aligned with the grid.
MaximalResult dyadic_maximal(const Field& f, const DyadicCube& root);
MaximalResult dyadic_maximal(const Field& f);

/// Copy of f on the cells of the root grid (zero where f has no cell).
Field embed_in_root(const Field& f, const DyadicCube& root);

/// Rows (lambda, measure, bound = ||f||_1 / lambda); a row passes when
/// lambda * measure <= ||f||_1 up to relative rounding 1e-12.
SweepReport weak11_check(const Field& f, std::span<const double> lambdas);
SweepReport weak11_check(const Field& f, const DyadicCube& root, std::span<const double> lambdas);

/// One row (q, ||M f||_q, ||f||_q, ratio, bound) with bound = q / (q - 1),
/// the dyadic (Doob) constant.
SweepReport strong_qq_check(const Field& f, double q);

}  // namespace czx
