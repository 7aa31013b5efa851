#include "czx/numeric.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>
#include <mutex>

#include "czx/error.hpp"

namespace czx {

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

// Returns (P_order(x), P'_order(x)).
std::pair<double, double> legendre(int order, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (int k = 2; k <= order; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, order * (x * p1 - p0) / (x * x - 1.0)};
}

GaussRule compute_gauss_legendre(int order) {
  GaussRule rule;
  rule.nodes.assign(static_cast<std::size_t>(order), 0.0);
  rule.weights.assign(static_cast<std::size_t>(order), 0.0);
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(order, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(order - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw Error(Errc::invalid_input, "Gauss-Legendre order must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

}  // namespace czx

namespace czx {

namespace {

// Hankel expansion J_nu(z) = sqrt(2 / (pi z)) (P cos w - Q sin w) with
// w = z - (nu / 2 + 1 / 4) pi. Returns false when the series stalls
// before reaching double precision.
bool hankel_j(double nu, double z, double& out) {
  const double mu = 4.0 * nu * nu;
  double p = 1.0;
  double q = 0.0;
  double term = 1.0;
  double previous = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int k = 1; k < 64 && !converged; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * z);
    const double size = std::abs(term);
    if (size == 0.0) {
      converged = true;
      break;
    }
    if (size > previous) return false;
    previous = size;
    // Terms alternate P, Q, P, Q with signs +, -, -, +, +, ...
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      default: p += term; break;
    }
    converged = size < 1e-17;
  }
  if (!converged) return false;
  const double w = z - (0.5 * nu + 0.25) * std::numbers::pi;
  out = std::sqrt(2.0 / (std::numbers::pi * z)) * (p * std::cos(w) - q * std::sin(w));
  return true;
}

}  // namespace

double bessel_j(double nu, double z) {
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  if (z >= 25.0 && z >= 2.0 * nu * nu) {
    double v = 0.0;
    if (hankel_j(nu, z, v)) return v;
  }
  return std::cyl_bessel_j(nu, z);
}

double spherical_bessel_j(int l, double z) {
  if (z == 0.0) return l == 0 ? 1.0 : 0.0;
  if (z >= 25.0 && z >= 2.0 * (l + 0.5) * (l + 0.5)) return std::sqrt(0.5 * std::numbers::pi / z) * bessel_j(l + 0.5, z);
  return std::sph_bessel(static_cast<unsigned>(l), z);
}

}  // namespace czx
