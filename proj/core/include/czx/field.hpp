#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace czx {

/// Samples of a real function on a uniform grid of cubic cells. Cell i along
/// axis a is [origin[a] + i h, origin[a] + (i + 1) h); the sample sits at the
/// cell center. Values are stored row-major (last axis fastest) and the
/// function is implicitly zero outside the grid.
class Field {
 public:
  Field() = default;
  Field(std::vector<std::size_t> shape, double h, std::vector<double> origin);
  Field(std::vector<std::size_t> shape, double h, std::vector<double> origin,
        std::vector<double> values);

  static Field sample(std::vector<std::size_t> shape, double h, std::vector<double> origin,
                      const std::function<double(std::span<const double>)>& fn);

  int dim() const noexcept { return static_cast<int>(shape_.size()); }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  double spacing() const noexcept { return h_; }
  const std::vector<double>& origin() const noexcept { return origin_; }
  std::size_t size() const noexcept { return values_.size(); }
  double cell_volume() const noexcept;

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  /// Center of cell `flat`, written into `out` (size dim()).
  void center(std::size_t flat, std::span<double> out) const noexcept;
  std::vector<double> center(std::size_t flat) const;
  std::vector<std::size_t> unravel(std::size_t flat) const;
  std::size_t ravel(std::span<const std::size_t> index) const noexcept;

  /// Upper corner of the grid box along `axis`.
  double upper(int axis) const noexcept;

  bool same_grid(const Field& other) const noexcept;

  /// Throws Errc::invalid_input if any value is NaN or infinite.
  void check_finite() const;

 private:
  std::vector<std::size_t> shape_;
  double h_ = 1.0;
  std::vector<double> origin_;
  std::vector<double> values_;
};

/// Exponent q in (1, inf) together with its conjugate.
struct ExponentQ {
  double q;
  double conjugate;

  explicit ExponentQ(double q_value);
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// (sum |f_i|^q h^n)^{1/q}, or max |f_i| for q = infinity. Throws
/// Errc::invalid_exponent for q <= 0.
double lq_norm(const Field& f, double q);
inline double lq_norm(const Field& f, ExponentQ q) { return lq_norm(f, q.q); }

/// h^n * #{i : |f_i| > t}.
double distribution_measure(const Field& f, double t);

/// p * int_0^inf t^{p-1} |{|f| > t}| dt, summed exactly over the sorted
/// value levels.
double layer_cake_power_norm(const Field& f, double p);

/// Same layer-cake sum for an arbitrary list of nonnegative levels, each
/// carrying measure `cell_measure`.
double layer_cake_power_sum(std::vector<double> levels, double cell_measure, double p);

/// Axis-aligned box (lower, upper) treated as open for geometric tests.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  int dim() const noexcept { return static_cast<int>(lower.size()); }
  std::vector<double> center() const;
  double side() const noexcept { return upper[0] - lower[0]; }
  bool contains(std::span<const double> x) const noexcept;
  /// True when the closed cell [lo, lo + h)^n intersects this open box.
  bool meets_cell(std::span<const double> cell_lower, double h) const noexcept;
  bool inside(const Box& other) const noexcept;

  friend bool operator==(const Box&, const Box&) = default;
};

/// A dyadic cube of the tree rooted at the cube [root_origin, root_origin +
/// root_side)^n: level k has side root_side * 2^{-k}. Membership is
/// half-open so every point of the root belongs to exactly one cube per
/// level.
class DyadicCube {
 public:
  DyadicCube() = default;
  DyadicCube(int level, std::vector<std::int64_t> index, double root_side,
             std::vector<double> root_origin);

  static DyadicCube root(std::vector<double> origin, double side);

  int dim() const noexcept { return static_cast<int>(index_.size()); }
  int level() const noexcept { return level_; }
  const std::vector<std::int64_t>& index() const noexcept { return index_; }
  double root_side() const noexcept { return root_side_; }
  const std::vector<double>& root_origin() const noexcept { return root_origin_; }

  double side() const noexcept;
  double measure() const noexcept;
  std::vector<double> lower() const;
  Box box() const;
  bool contains(std::span<const double> x) const noexcept;

  std::vector<DyadicCube> children() const;
  DyadicCube parent() const;

  friend bool operator==(const DyadicCube&, const DyadicCube&) = default;

 private:
  int level_ = 0;
  std::vector<std::int64_t> index_;
  double root_side_ = 1.0;
  std::vector<double> root_origin_;
};

/// aQ: same center, side a * side(Q).
Box dilate(const Box& q, double a);
Box dilate(const DyadicCube& q, double a);

/// Dyadic cubes containing x, from level `depth` up to the root (level 0).
/// Throws Errc::out_of_domain if x is outside the root.
std::vector<DyadicCube> dyadic_ancestors(std::span<const double> x, int depth,
                                         const DyadicCube& root);

/// The dyadic cube at `level` containing x.
DyadicCube dyadic_cube_at(std::span<const double> x, int level, const DyadicCube& root);

/// Copy of f with every cell meeting the box zeroed.
Field restrict_outside(const Field& f, const Box& region);
Field restrict_outside(const Field& f, const DyadicCube& q, double a);

/// Smallest cube with power-of-two side (in cells) anchored at the grid
/// origin that contains the whole grid.
DyadicCube auto_root(const Field& f);

/// Per-axis index range [first, last] of nonzero cells; empty when f == 0.
struct Support {
  bool empty = true;
  std::vector<std::size_t> first;
  std::vector<std::size_t> last;

  /// Extent of the support along `axis` in length units.
  double extent(int axis, double h) const noexcept;
};
Support support_of(const Field& f);

}  // namespace czx
