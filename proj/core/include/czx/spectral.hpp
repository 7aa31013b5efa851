#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "czx/field.hpp"
#include "czx/kernel.hpp"
#include "czx/report.hpp"

namespace czx {

/// Frequency regimes relative to beta: |y| < beta/2, beta/2 <= |y| <= beta,
/// |y| > beta.
enum class Regime { low, mid, high };

std::string_view to_string(Regime r) noexcept;
Regime classify_regime(double y_norm, double beta) noexcept;

struct SymbolSample {
  std::vector<double> y;
  std::complex<double> value;
  double beta = 0.0;
  Regime regime = Regime::low;
  double quad_error_estimate = 0.0;
  /// False when the sphere integral of Omega does not vanish; the value
  /// then contains the divergent isotropic part.
  bool cancelling = true;
};

struct SymbolOptions {
  int low_order = 8;    // Gauss-Legendre points per panel, coarse pass
  int high_order = 16;  // fine pass; its value is returned
  int max_harmonic = 64;
};

/// Continuum transform int_{|x| <= 2/beta} e^{2 pi i x.y} K1(x) dx. The
/// angular integral is done exactly through the Bessel expansion of the
/// plane wave; the radial integrals use panels no wider than 1/(4|y|),
/// geometrically graded toward the origin. For cancelling symbols the
/// isotropic term is dropped, which is the form int (e^{2 pi i x.y} - 1)
/// K1(x) dx. Throws Errc::out_of_validity for beta >= 1.
SymbolSample symbol_k1(const SphereSymbol& omega, const KernelSpec& spec,
                       std::span<const double> y, const SymbolOptions& options = {});

/// int_0^{2/beta} r^{beta - 1} chi(beta r) dr.
double near_radial_mass(double beta);

/// 0, then 8 points per decade over [beta/10, 1e3 beta] and [0.1, 100].
std::vector<double> default_y_norms(double beta);

struct SweepOptions {
  double uniformity_factor = 2.0;
  double baseline_factor = 1.5;
  double baseline_beta = 0.5;
  double beta0 = 0.01;
  SymbolOptions symbol;
};

/// Samples |K1^(y)| along y = t e_1 for every beta. Rows: one per sample
/// plus one "all" summary row per beta holding its supremum. Passes when
/// max/min of the per-beta suprema is below `uniformity_factor` and no
/// supremum exceeds the baseline (beta = baseline_beta, else the largest
/// beta) by more than `baseline_factor`. Betas above 1 - beta0 are recorded
/// and marked skip. Throws Errc::invalid_input on empty grids.
SweepReport symbol_sweep(const SphereSymbol& omega, int n, std::span<const double> betas,
                         std::optional<std::vector<double>> y_norms = std::nullopt,
                         const SweepOptions& options = {});

struct PlancherelResult {
  double lhs = 0.0;  // ||T1 f||_2 from the direct path
  double rhs = 0.0;  // ||DFT(W) DFT(f)|| with the matching normalization
};

/// Both sides use the stencil built with the same refinement factor; the
/// box spanned by f must hold supp K1 plus supp f (else Errc::wraparound).
PlancherelResult plancherel_check(const SphereSymbol& omega, const KernelSpec& spec,
                                  const Field& f, int refine = 1);

}  // namespace czx
