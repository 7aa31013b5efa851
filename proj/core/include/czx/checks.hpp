#pragma once

#include <span>

#include "czx/field.hpp"
#include "czx/kernel.hpp"
#include "czx/report.hpp"

namespace czx {

/// One row (n, beta, eps, max_residual, scale, relative) comparing
/// T1 f + T2 f with T_eps f pointwise; relative = max_residual / max |T_eps f|.
/// Passes when relative <= tolerance.
SweepReport split_check(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                        double tolerance = 1e-12);

/// Mean-zero radial profile (1 - r^2 / 2 s^2) exp(-r^2 / 2 s^2), cut to zero
/// beyond 6 s, centered in the box [0, side)^n.
Field mexican_hat(int n, double side, double h, double sigma);

/// Relative L2 distance between the periodic T_eps f (full kernel, largest
/// alias-free radius) and the Riesz reference, one row per beta in the
/// given order, plus a trend row that passes when the errors decrease
/// strictly and the last is at most `final_fraction` of the first.
/// Throws Errc::wrong_symbol unless omega is "riesz-<j>".
SweepReport riesz_recovery(const SphereSymbol& omega, const Field& f, double epsilon,
                           std::span<const double> betas, double final_fraction = 1.0 / 3);

}  // namespace czx
