#pragma once

#include <span>
#include <vector>

#include "czx/field.hpp"
#include "czx/kernel.hpp"
#include "czx/maximal.hpp"
#include "czx/report.hpp"

namespace czx {

/// sup of the average of g over grid-aligned cubes containing the cell of x
/// (any side in cells, any position); g is zero outside its grid.
double full_cube_maximal_at(const Field& g, std::span<const double> x);

/// A source supported away from 4Q together with T1 f on the whole root grid
/// and the tight values a^2 = M(|T1 f|^2)(x0), b^2 = M(f^2)(x0) of the full
/// grid-cube maximal function.
struct SeparatedInstance {
  DyadicCube root;
  DyadicCube q;
  Field f;    // on the root grid
  Field t1f;  // on the root grid
  std::vector<double> x0;
  double a = 0.0;
  double b = 0.0;
  double beta = 0.0;
};

/// Builds an instance; f must live on the root grid and T1 f is evaluated
/// on that grid, so the maximal functions see |T1 f|^2 restricted to the
/// root. Throws Errc::invalid_instance when f meets a cell of 4Q, when x0
/// is not in 3Q, or when 3Q leaves the root.
SeparatedInstance make_separated_instance(const SphereSymbol& omega, const KernelSpec& spec,
                                          const Field& f, const DyadicCube& root,
                                          const DyadicCube& q, std::vector<double> x0);

/// max over cells of 3Q of |T1 f(y) - T1 f(x0)| / b. Throws
/// Errc::degenerate_instance when b = 0 but T1 f oscillates.
double oscillation_requirement(const SeparatedInstance& inst);

/// 1.25 times the largest requirement over the corpus.
double calibrate_C(std::span<const SeparatedInstance> corpus);

struct GoodLambdaConfig {
  int n = 1;
  double q = 3.0;
  double C_cal = 0.0;
  double N = 0.0;  // N^2 / 4 = max{2 5^n, (2 + C)^2}
  double delta = 1.0;
  double mu = 0.0;  // 1 / (2 q N^q)

  static GoodLambdaConfig make(int n, double q, double C, double delta);
};

struct Lemma31Verdict {
  bool pass = true;
  double max_ratio = 0.0;         // largest average / bound
  std::size_t inner_checks = 0;   // cubes inside 3Q, bound (a + C b)^2
  std::size_t outer_checks = 0;   // other cubes, bound 5^n a^2
  double inner_max_ratio = 0.0;
  double outer_max_ratio = 0.0;
};

/// For every cell x of Q and every dyadic cube Q^ containing x (including
/// the ancestors of the root), checks avg_{Q^} |T1 f|^2 against
/// (a + C b)^2 when Q^ lies in 3Q and against 5^n a^2 otherwise.
Lemma31Verdict lemma31_check(const SeparatedInstance& inst, const GoodLambdaConfig& cfg);

/// Maximal dyadic cubes with average of |f| above lambda. Throws
/// Errc::root_selected when the root average already exceeds lambda.
std::vector<DyadicCube> cz_stopping_cubes(const Field& f, double lambda, const DyadicCube& root);

/// T1 f and the maximal functions G = M(|T1 f|^2), H = M(f^2) on one root.
struct GoodLambdaInput {
  SphereSymbol omega;
  KernelSpec spec;
  Field f;    // on the root grid
  Field t1f;  // on the root grid
  MaximalResult g;
  MaximalResult h;
};

GoodLambdaInput goodlambda_input(const SphereSymbol& omega, const KernelSpec& spec,
                                 const Field& f, const DyadicCube& root);

/// Rows (lambda, lhs = |{G > lambda N^2}|, rhs = 2 mu (|{G > lambda}| +
/// |{H > lambda delta^2}|)); metric "worst_slack" = max lhs / rhs.
SweepReport goodlambda_global_check(const GoodLambdaInput& input, const GoodLambdaConfig& cfg,
                                    std::span<const double> lambdas);

/// Halves delta from 1 until every row of the global check passes on the
/// corpus. Throws Errc::degenerate_instance after 200 halvings.
double calibrate_delta(std::span<const GoodLambdaInput> corpus, int n, double q, double C,
                       std::span<const double> lambdas);

struct CloseResult {
  bool routed = false;     // q <= 2: L^2 multiplier bound instead
  double lhs = 0.0;        // int G^{q/2}, or ||T1 f||_2^2 when routed
  double rhs = 0.0;        // delta^{-q} (p')^p int |f|^q with p = q/2
  double tight_rhs = 0.0;  // delta^{-q} / (q - 1) int H^{q/2}
  double t1f_power = 0.0;  // int |T1 f|^q <= lhs
};

CloseResult layer_cake_close(const GoodLambdaInput& input, double q, const GoodLambdaConfig& cfg);

}  // namespace czx
