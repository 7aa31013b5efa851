#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace czx {

/// Pairwise (tree) summation. The reduction order depends only on the input
/// length, so results are reproducible bit for bit.
double pairwise_sum(std::span<const double> values) noexcept;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rules are computed once per order by Newton iteration on the Legendre
/// recurrence and cached for the life of the process.
const GaussRule& gauss_legendre(int order);

/// J_nu(z) for nu >= 0, z >= 0. Large arguments use the Hankel asymptotic
/// expansion (exact for half-integer orders); the rest defers to
/// std::cyl_bessel_j.
double bessel_j(double nu, double z);

/// Spherical Bessel j_l(z) = sqrt(pi / (2 z)) J_{l + 1/2}(z).
double spherical_bessel_j(int l, double z);

/// Surface measure of the unit sphere S^{n-1} (counting measure for n = 1).
inline double sphere_measure(int n) noexcept {
  // 2 pi^{n/2} / Gamma(n/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

inline double norm2(std::span<const double> x) noexcept {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

/// Relative difference |a - b| / max(|a|, |b|), zero when both vanish.
inline double relative_difference(double a, double b) noexcept {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace czx
