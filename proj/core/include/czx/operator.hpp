#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "czx/field.hpp"
#include "czx/kernel.hpp"

namespace czx {

/// Which piece of the kernel to integrate against: K, K1 = K chi_beta or
/// K2 = K (1 - chi_beta).
enum class KernelPart { full, near, far };

/// Output grid for the direct path. Its spacing is the source spacing; the
/// origin is arbitrary, so single points can be targeted with shape {1,..}.
struct EvalGrid {
  std::vector<std::size_t> shape;
  std::vector<double> origin;
};

enum class Summation { automatic, direct, fft };

struct QuadraturePlan {
  std::optional<EvalGrid> eval;  // defaults to the source grid
  double outer_radius = kInfinity;
  int refinement_factor = 8;
  Summation summation = Summation::automatic;
  /// Pair count above which automatic summation switches to a zero-padded
  /// FFT convolution of the same weights.
  double direct_pair_limit = 2.0e7;
};

struct Applied {
  Field values;
  /// B1 ||f||_1 sup_{|y| > R} |y|^{beta - n} when some source/target pair is
  /// farther apart than R, else 0.
  double tail_bound = 0.0;
  double outer_radius = kInfinity;
};

/// Quadrature weights W[j] ~ int over cell (d + j h) of the kernel, for
/// offsets j in [lower, lower + extent) per axis, row-major.
struct Stencil {
  std::vector<std::int64_t> lower;
  std::vector<std::size_t> extent;
  std::vector<double> weights;
};

struct StencilOptions {
  KernelPart part = KernelPart::full;
  double outer_radius = kInfinity;
  int refine = 8;
};

/// Midpoint weights h^n K(y_j) on cells lying entirely in eps <= |y| <= R;
/// cells straddling either sphere are split refine^n ways and only subcell
/// centers inside the shell contribute.
Stencil build_stencil(const SphereSymbol& omega, const KernelSpec& spec, double h,
                      std::span<const double> displacement, std::vector<std::int64_t> lower,
                      std::vector<std::size_t> extent, const StencilOptions& options);

/// T_eps f (x) = int_{eps <= |y| <= R} K(y) f(x - y) dy at every eval point.
Applied apply_direct(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                     const QuadraturePlan& plan = {});
Applied apply_t1(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                 const QuadraturePlan& plan = {});
/// Raises R when needed so the tail bound is at most 1e-8 ||f||_1.
Applied apply_t2(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                 const QuadraturePlan& plan = {});
Applied apply_part(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                   KernelPart part, const QuadraturePlan& plan = {});

struct PeriodicOptions {
  KernelPart part = KernelPart::near;
  /// Kernel truncation radius. Unset: 2/beta for the near part, otherwise
  /// the largest radius for which the circular convolution equals the
  /// linear one on the box.
  std::optional<double> kernel_radius;
  int refine = 1;
};

struct PeriodicApplied {
  Field values;
  double kernel_radius = 0.0;
  double tail_bound = 0.0;
};

/// Circular convolution of f with the sampled truncated kernel on the box
/// spanned by f's grid. Throws Errc::wraparound when the box cannot hold
/// the kernel support plus the support of f without aliasing.
PeriodicApplied apply_periodic_fft(const SphereSymbol& omega, const KernelSpec& spec,
                                   const Field& f, const PeriodicOptions& options = {});

/// The stencil used by apply_periodic_fft, laid out on the periodic grid
/// (offset 0 at flat index 0, negative offsets wrapped).
Field periodic_kernel_samples(const SphereSymbol& omega, const KernelSpec& spec,
                              const Field& grid, const PeriodicOptions& options,
                              double* radius_used = nullptr);

/// Fourier multiplier of p.v. x_j / |x|^{n+1}: -i (xi_j / |xi|) / c_n with
/// c_n = Gamma((n+1)/2) / pi^{(n+1)/2}, and 0 at xi = 0. Transform
/// convention: f^(xi) = int f(x) e^{-2 pi i x.xi} dx.
std::complex<double> riesz_multiplier(std::span<const double> xi, int axis);
double riesz_normalization(int n);

/// Applies riesz_multiplier to f viewed as one period of a periodic
/// function. The multiplier is zeroed at the Nyquist frequency of `axis`
/// so the output stays real.
Field riesz_reference(const Field& f, int axis);

/// Discrete Fourier transform of a real field (full complex spectrum,
/// row-major, unnormalized).
std::vector<std::complex<double>> dft(const Field& f);

}  // namespace czx
