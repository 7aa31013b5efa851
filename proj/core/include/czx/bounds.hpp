#pragma once

#include <optional>
#include <span>
#include <vector>

#include "czx/field.hpp"
#include "czx/kernel.hpp"
#include "czx/operator.hpp"
#include "czx/report.hpp"

namespace czx {

/// c2 = beta^{(q-1)n/q} / (n(q-1) - beta q)^{1/q}. The value is withheld
/// when beta >= n(q-1)/q; `valid` additionally requires beta < 1 - beta0.
struct MainConstant {
  int n = 1;
  double q = 2.0;
  double beta = 0.5;
  double window_edge = 0.0;  // n(q-1)/q
  std::optional<double> c2;
  bool valid = false;
};

/// Throws Errc::invalid_input unless n >= 1 and beta > 0, and
/// Errc::invalid_exponent unless q > 1.
MainConstant c2_constant(int n, double q, double beta, double beta0 = 0.01);

/// (sigma_{n-1} beta^{q(n-beta)-n} / (q(n-beta)-n))^{1/q}, the L^q norm of
/// |y|^{beta-n} over |y| >= 1/beta. Throws Errc::divergent_tail when
/// q(n-beta) <= n.
double t2_tail_constant(int n, double q, double beta);

/// Lq norm of an operator output on the source box padded by `pad` on every
/// side, plus an estimate of the part outside that box.
struct DomainNorm {
  double norm = 0.0;
  double pad = 0.0;
  /// B1 ||f||_1 (int_{|x| >= pad} |x|^{-q(n-beta)})^{1/q}; infinite when the
  /// tail is not q-integrable.
  double tail_estimate = 0.0;
};

EvalGrid padded_grid(const Field& f, double pad);

/// Evaluates T_eps (part = full) or T2 (part = far) of f on the padded box
/// and returns its Lq norm for every q in `qs`.
std::vector<DomainNorm> operator_norms(const SphereSymbol& omega, const KernelSpec& spec,
                                       const Field& f, KernelPart part, double pad,
                                       std::span<const double> qs);

/// Rows (q, beta, t2_norm, bound = B1 A ||f||_1, ratio, c2_ratio, tail_estimate)
/// for every (q, beta); beta comes from each spec entry. The bound is
/// asserted; c2_ratio = t2_norm / (C c2 ||f||_1) is reported and asserted
/// only when `constant` is given. Pairs outside the window are skipped.
/// The far part is evaluated on the source box padded by 4/beta.
SweepReport t2_bound_check(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                           std::span<const double> qs, std::optional<double> constant = std::nullopt);

struct MainSweepOptions {
  std::vector<double> qs{1.5, 2.0, 3.0, 4.0};
  std::vector<double> betas{0.5, 0.1, 0.01};
  std::vector<double> eps_multiples{2.0, 4.0, 16.0};  // in units of h
  double beta0 = 0.01;
  /// Frozen constant; rows pass when ratio <= constant. Unset: rows are
  /// recorded without a cap (calibration runs).
  std::optional<double> constant;
  /// Largest allowed max/min of the per-beta maxima.
  double trend_factor = 2.0;
  /// Output box padding; 0 means min(2/beta, pad_cap).
  double pad = 0.0;
  double pad_cap = 16.0;
};

/// Rows (member, q, beta, eps, t_norm, f_q, f_1, c2, ratio, tail_estimate)
/// with ratio = ||T_eps f||_q / (||f||_q + c2 ||f||_1). Metrics: max_ratio,
/// max_ratio.<beta>, beta_trend_ratio (max/min of the per-beta maxima).
SweepReport main_ratio_sweep(const SphereSymbol& omega, std::span<const Field> corpus,
                             const MainSweepOptions& options);

/// 1.25 times the largest ratio of an uncapped sweep.
double calibrate_main_constant(const SphereSymbol& omega, std::span<const Field> corpus,
                               const MainSweepOptions& options);

/// q = 2 case for Riesz symbols: ||T_eps f||_2 <= C (||f||_2 +
/// beta^{n/2} / sqrt(n - 2 beta) ||f||_1). Throws Errc::wrong_symbol for
/// other symbols and Errc::out_of_validity outside 0 < beta <= 1 - beta0.
SweepReport theorem13_q2_check(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                               double constant, double pad = 0.0, double pad_cap = 16.0);

}  // namespace czx
