#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace czx {

enum class Parity { odd, even, none };

/// The angular part Omega of a homogeneous kernel, evaluated on unit
/// directions only. Homogeneity of degree zero is realized by `at`, which
/// normalizes its argument before calling `evaluate`.
struct SphereSymbol {
  std::string name;
  std::function<double(std::span<const double>)> evaluate;
  double declared_bound = 1.0;
  Parity parity = Parity::none;
  int min_dim = 1;
  int max_dim = 3;
  /// Analytic modulus of continuity; replaces the sampled estimate when set.
  std::function<double(double)> analytic_modulus;

  bool supports(int n) const noexcept { return n >= min_dim && n <= max_dim; }

  /// Omega(x / |x|). Throws Errc::singularity for x = 0.
  double at(std::span<const double> x) const;
};

/// Built-in symbols: "riesz-1", "riesz-2", "riesz-3", "sign", "const",
/// "cos2theta". Names of the form "table:<path>" load a tabulated n = 2
/// symbol from a two-column CSV of angle,value.
SphereSymbol make_symbol(std::string_view name, int n);

/// Periodic piecewise-linear interpolation of (angle, value) samples.
SphereSymbol load_tabulated_symbol(const std::string& csv_path);
SphereSymbol tabulated_symbol(std::string name, std::vector<double> angles,
                              std::vector<double> values);

enum class CutoffProfile { cosine_ramp };

struct KernelSpec {
  int n = 1;
  double beta = 0.5;
  double epsilon = 0.1;
  double beta0 = 0.01;
  CutoffProfile cutoff = CutoffProfile::cosine_ramp;

  /// Throws Errc::invalid_input unless n >= 1, 0 < beta < n, epsilon > 0 and
  /// 0 < beta0 < 1/2.
  void validate() const;

  /// 0 < beta <= 1 - beta0, the range in which the near-part L^2 bound holds.
  bool in_near_window() const noexcept { return beta > 0.0 && beta <= 1.0 - beta0; }
};

/// chi(s): 1 on |s| <= 1, cos^2(pi (|s| - 1) / 2) on 1 <= |s| <= 2, 0 beyond.
double cutoff(double s) noexcept;
double cutoff_derivative(double s) noexcept;

/// chi_beta(s) = chi(beta * s).
double eval_cutoff(const KernelSpec& spec, double s) noexcept;

/// Omega(y / |y|) / |y|^{n - beta}, no truncation. Throws Errc::singularity
/// at the origin.
double eval_kernel(const SphereSymbol& omega, const KernelSpec& spec,
                   std::span<const double> point);
double eval_k1(const SphereSymbol& omega, const KernelSpec& spec,
               std::span<const double> point);
double eval_k2(const SphereSymbol& omega, const KernelSpec& spec,
               std::span<const double> point);

/// Quadrature on S^{n-1}: points are stored row-major, n coordinates each.
struct SphereRule {
  int n = 0;
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const noexcept { return weights.size(); }
  std::span<const double> point(std::size_t i) const {
    return {points.data() + i * static_cast<std::size_t>(n),
            static_cast<std::size_t>(n)};
  }
};

/// n = 1: the two points {+1, -1}. n = 2: `order` equispaced angles.
/// n = 3: Gauss-Legendre in cos(theta) (order / 2 nodes) times `order`
/// equispaced azimuths.
SphereRule sphere_rule(int n, int order);

struct DiniProfile {
  std::vector<double> deltas;        // ascending, in (0, 1]
  std::vector<double> omega_values;  // nondecreasing
  double dini_integral = 0.0;
};

/// Composite rule for int_0^1 omega(d)/d dd over the stored grid: trapezoid
/// between grid points and omega(d_0) for the segment (0, d_0], which is
/// exact when omega is linear near zero.
double dini_quadrature(std::span<const double> deltas,
                       std::span<const double> omega_values);

struct KernelReport {
  double bound_estimate = 0.0;         // sup |Omega| over all samples
  double cancellation_residual = 0.0;  // int_{S^{n-1}} Omega
  double tolerance = 0.0;
  DiniProfile dini;
  bool admissible = false;
};

/// Samples Omega on the sphere, integrates it, and estimates its modulus of
/// continuity at delta = 2^{-k} by maximizing |Omega(u) - Omega(v)| over
/// pairs at stratified chord lengths up to delta.
KernelReport validate_symbol(const SphereSymbol& omega, int n, int quad_order);

}  // namespace czx
