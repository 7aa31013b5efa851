// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails.

#include <boost/math/quadrature/exp_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "czx/bounds.hpp"
#include "czx/checks.hpp"
#include "czx/corpus.hpp"
#include "czx/error.hpp"
#include "czx/field_io.hpp"
#include "czx/maximal.hpp"
#include "czx/numeric.hpp"
#include "czx/operator.hpp"
#include "czx/spectral.hpp"
#include "driver.hpp"
#include "gen.hpp"

using namespace czx;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

KernelSpec spec_of(int n, double beta, double eps) {
  KernelSpec s;
  s.n = n;
  s.beta = beta;
  s.epsilon = eps;
  return s;
}

SphereSymbol default_symbol(int n) { return make_symbol(n == 1 ? "sign" : "riesz-1", n); }

constexpr std::uint64_t kSeed = 20240601;

// 1. T1 + T2 = T_eps pointwise on 40 members.
Outcome splitting_identity() {
  const std::vector<double> betas{0.5, 0.3, 0.1};
  double worst = 0.0;
  std::size_t runs = 0;
  for (int n = 1; n <= 2; ++n) {
    const auto omega = default_symbol(n);
    const auto corpus = sweep_corpus(n, kSeed, 0, 20);
    for (std::size_t m = 0; m < corpus.size(); ++m) {
      const Field& f = corpus[m];
      const double beta = betas[m % betas.size()];
      const auto r = split_check(omega, spec_of(n, beta, 4 * f.spacing()), f);
      worst = std::max(worst, r.metric("max_relative_residual"));
      ++runs;
    }
  }
  return {worst <= 1e-12, "max relative residual " + sci(worst) + " (limit 1e-12) over " + std::to_string(runs) + " members"};
}

// 2. Symbol suprema uniform in beta for cancelling symbols, K1^(0) = 0, and
// the constant symbol grows.
Outcome symbol_uniformity() {
  const std::vector<double> betas{0.5, 0.1, 0.01, 0.001};
  bool ok = true;
  std::string detail;
  for (int n = 1; n <= 2; ++n) {
    const auto r = symbol_sweep(default_symbol(n), n, betas);
    double origin = 0.0;
    for (double b : betas) origin = std::max(origin, r.metric("origin_abs." + format_double(b)));
    const double spread = r.metric("cross_beta_ratio");
    ok = ok && r.passed() && spread < 2.0 && origin <= 1e-8;
    detail += (n == 1 ? "sign" : "riesz-1") + std::string(": spread ") + sci(spread) + ", |K1^(0)| " + sci(origin) + "; ";
  }
  const auto c = symbol_sweep(make_symbol("const", 1), 1, betas);
  const double growth = c.metric("sup.0.001") / c.metric("sup.0.5");
  ok = ok && growth > 5.0;
  detail += "const growth " + sci(growth) + " (needs > 5)";
  return {ok, detail};
}

double tail_by_quadrature(int n, double q, double beta) {
  const double power = q * (beta - n) + n;
  boost::math::quadrature::exp_sinh<double> integrator;
  const double radial = integrator.integrate([&](double t) { return std::exp(power * (t - std::log(beta))); }, 0.0,
                                             std::numeric_limits<double>::infinity(), 1e-14);
  return std::pow(sphere_measure(n) * radial, 1.0 / q);
}

// 3. Constant-free T2 bound and the closed-form tail constant.
Outcome t2_bound() {
  const std::vector<double> qs{1.5, 2.0, 3.0};
  bool ok = true;
  double worst = 0.0;
  std::size_t rows = 0;
  for (int n = 1; n <= 2; ++n) {
    const auto omega = default_symbol(n);
    for (const auto& f : sweep_corpus(n, kSeed, 0, 20)) {
      for (double beta : {0.1, 0.3, 0.5}) {
        const auto r = t2_bound_check(omega, spec_of(n, beta, 2 * f.spacing()), f, qs);
        ok = ok && r.passed();
        worst = std::max(worst, r.metric("worst_ratio"));
        rows += r.count(Verdict::pass) + r.count(Verdict::fail);
      }
    }
  }
  testing::Rng rng(kSeed);
  double quad_err = 0.0;
  for (int done = 0; done < 20;) {
    const int n = 1 + static_cast<int>(rng.index(3));
    const double q = rng.uniform(1.2, 5.0);
    const double beta = rng.uniform(0.01, 0.9);
    if (!(beta < n * (q - 1.0) / q) || q * (n - beta) - n < 0.05) continue;
    const double a = t2_tail_constant(n, q, beta);
    quad_err = std::max(quad_err, std::abs(a - tail_by_quadrature(n, q, beta)) / a);
    ++done;
  }
  ok = ok && quad_err <= 1e-10;
  return {ok, "worst ||T2 f||_q / (B1 A ||f||_1) " + sci(worst) + " over " + std::to_string(rows) +
                  " rows; closed form vs quadrature " + sci(quad_err) + " (limit 1e-10)"};
}

// 4. Frozen-C main ratio on held-out members and the beta trend.
Outcome main_ratio() {
  MainSweepOptions opt;  // q {1.5, 2, 3, 4}, beta {0.5, 0.1, 0.01}, eps {2h, 4h, 16h}
  const int dims[] = {1, 2};
  const double C = cli::calibrate_main_bound(dims, kSeed, 20, opt);
  opt.constant = C;
  bool capped = true;
  double worst = 0.0;
  double trend = 0.0;
  std::string per_n;
  for (int n : dims) {
    const auto held = sweep_corpus(n, kSeed, cli::kHeldOutOffset, 50);
    const auto r = main_ratio_sweep(default_symbol(n), held, opt);
    for (const auto& row : r.rows()) {
      if (row.cells[0] != Cell{std::string("all")} && row.verdict == Verdict::fail) capped = false;
    }
    worst = std::max(worst, r.metric("max_ratio"));
    const double hi = r.metric("max_ratio.0.01");
    const double lo = r.metric("max_ratio.0.5");
    trend = std::max(trend, std::max(hi, lo) / std::min(hi, lo));
    per_n += " n=" + std::to_string(n) + ": max(beta=0.5) " + sci(lo) + ", max(beta=0.01) " + sci(hi) + ";";
  }
  const bool ok = capped && trend < 2.0;
  return {ok, "C " + sci(C) + ", worst held-out ratio " + sci(worst) + (capped ? " <= C" : " > C") + ";" + per_n +
                  " beta-trend factor " + sci(trend) + " (needs < 2)"};
}

// 5. Riesz recovery as beta -> 0 on a large periodic box.
Outcome riesz_recovery_check() {
  const Field f = mexican_hat(2, 256.0, 0.25, 8.0);
  const std::vector<double> betas{0.5, 0.2, 0.1, 0.05};
  const auto r = riesz_recovery(make_symbol("riesz-1", 2), f, 0.5, betas, 1.0 / 3);
  std::string errs;
  for (double b : betas) errs += sci(r.metric("error." + format_double(b))) + " ";
  return {r.passed(), "relative L2 errors " + errs + "; last/first " + sci(r.metric("final_fraction")) + " (needs <= 1/3)"};
}

// 6. Weak (1,1) with constant 1 and the layer-cake identity.
Outcome maximal_exactness() {
  testing::Rng rng(kSeed);
  std::size_t violations = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(2));
    const std::size_t cells = n == 1 ? 32 : 8;
    const auto nn = static_cast<std::size_t>(n);
    Field f(std::vector<std::size_t>(nn, cells), 1.0 / static_cast<double>(cells), std::vector<double>(nn, 0.0));
    for (double& v : f.values()) v = rng.uniform() < 0.5 ? 0.0 : rng.uniform(-3.0, 3.0) * std::exp(rng.uniform(-4.0, 4.0));
    const double lambda = std::exp(rng.uniform(-6.0, 6.0));
    const std::vector<double> one{lambda};
    if (!weak11_check(f, one).passed()) ++violations;
  }
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(2));
    const std::size_t cells = n == 1 ? 64 : 16;
    const auto nn = static_cast<std::size_t>(n);
    Field f(std::vector<std::size_t>(nn, cells), 0.125, std::vector<double>(nn, 0.0));
    for (double& v : f.values()) v = rng.uniform(-2.0, 2.0);
    const double p = rng.uniform(1.1, 6.0);
    const Field mf = dyadic_maximal(f).mf;
    for (const Field* g : std::initializer_list<const Field*>{&f, &mf}) {
      double direct = 0.0;
      for (double v : g->values()) direct += std::pow(std::abs(v), p);
      direct *= g->cell_volume();
      worst = std::max(worst, std::abs(layer_cake_power_norm(*g, p) - direct) / direct);
    }
  }
  return {violations == 0 && worst <= 1e-10, std::to_string(violations) + " weak-type violations in 10000 trials; layer-cake vs direct sum " +
                                                 sci(worst) + " (limit 1e-10)"};
}

// 7. Good-lambda suite on held-out data with one frozen configuration.
Outcome goodlambda_suite() {
  cli::GoodLambdaPlan plan;  // n = 1, q = 3, beta {0.5, 0.3, 0.1, 0.01}
  plan.seed = kSeed;
  plan.instances = 20;
  plan.globals = 20;
  const auto cal = cli::calibrate_goodlambda(plan);
  cli::GoodLambdaPlan held = plan;
  held.instances = 100;
  held.globals = 10;
  const auto v = cli::verify_goodlambda(held, cal.cfg);
  std::size_t l31_fail = 0, global_rows = 0, global_fail = 0, close_rows = 0, close_fail = 0;
  for (const auto& row : v.rows()) {
    const auto& q = std::get<std::string>(row.cells[3]);
    const bool failed = row.verdict == Verdict::fail;
    if (q == "lemma31_ratio") {
      l31_fail += failed;
    } else if (q.rfind("global@", 0) == 0) {
      ++global_rows;
      global_fail += failed;
    } else {
      ++close_rows;
      close_fail += failed;
    }
  }
  const bool ok = l31_fail == 0 && global_fail == 0 && close_fail == 0 && global_rows >= 100;
  return {ok, "C " + sci(cal.cfg.C_cal) + ", delta " + sci(cal.cfg.delta) + ", N " + sci(cal.cfg.N) + "; separated " +
                  std::to_string(100 - l31_fail) + "/100, global " + std::to_string(global_rows - global_fail) + "/" +
                  std::to_string(global_rows) + ", layer-cake " + std::to_string(close_rows - close_fail) + "/" +
                  std::to_string(close_rows)};
}

// 8. ||T1 f||_2 against the symbol side on smooth members.
Outcome plancherel() {
  double worst = 0.0;
  std::size_t runs = 0;
  for (int n = 1; n <= 2; ++n) {
    const auto omega = default_symbol(n);
    for (std::uint64_t idx : {0, 2, 4, 6}) {  // gaussian and bump members
      const Field f = sweep_member(n, kSeed, idx);
      for (double beta : {0.5, 0.3}) {
        const auto cells = static_cast<std::size_t>(std::ceil(2.0 / beta / f.spacing())) + 2;
        std::vector<std::size_t> shape = f.shape();
        std::vector<double> origin = f.origin();
        for (std::size_t a = 0; a < shape.size(); ++a) {
          shape[a] += 2 * cells;
          origin[a] -= static_cast<double>(cells) * f.spacing();
        }
        Field box(shape, f.spacing(), origin);
        for (std::size_t i = 0; i < f.size(); ++i) {
          auto idx2 = f.unravel(i);
          for (auto& v : idx2) v += cells;
          box[box.ravel(idx2)] = f[i];
        }
        const auto p = plancherel_check(omega, spec_of(n, beta, 2 * f.spacing()), box);
        worst = std::max(worst, std::abs(p.lhs - p.rhs) / std::max(p.lhs, p.rhs));
        ++runs;
      }
    }
  }
  return {worst <= 1e-5, "max relative gap " + sci(worst) + " (limit 1e-5) over " + std::to_string(runs) + " runs"};
}

// 9. Window arithmetic.
Outcome window_arithmetic() {
  testing::Rng rng(kSeed);
  std::size_t wrong = 0;
  for (int trial = 0; trial < 100000; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(3));
    const double q = rng.uniform(1.01, 8.0);
    const double beta = rng.uniform() < 0.1 ? n * (q - 1.0) / q : rng.uniform(1e-4, 1.0);
    if (c2_constant(n, q, beta).c2.has_value() != (beta < n * (q - 1.0) / q)) ++wrong;
  }
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(3));
    const double beta = rng.uniform(1e-6, 0.49999);
    const double expected = std::pow(beta, n / 2.0) / std::sqrt(n - 2 * beta);
    worst = std::max(worst, std::abs(*c2_constant(n, 2.0, beta).c2 - expected) / expected);
  }
  return {wrong == 0 && worst <= 4 * std::numeric_limits<double>::epsilon(),
          std::to_string(wrong) + " misclassified pairs; q = 2 identity off by " + sci(worst) + " relative"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"splitting identity", splitting_identity},
      {"symbol uniformity", symbol_uniformity},
      {"T2 constant-free bound", t2_bound},
      {"main uniform ratio", main_ratio},
      {"Riesz recovery", riesz_recovery_check},
      {"dyadic maximal exactness", maximal_exactness},
      {"good-lambda suite", goodlambda_suite},
      {"Plancherel consistency", plancherel},
      {"window arithmetic", window_arithmetic},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %zu %s %s: %s [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
