#include "czx/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "czx/error.hpp"
#include "czx/field_io.hpp"
#include "czx/numeric.hpp"

namespace czx {

namespace {

std::string window_reason(const MainConstant& mc, double beta0) {
  if (!mc.c2) return "beta >= n(q-1)/q = " + format_double(mc.window_edge);
  return "beta >= 1 - beta0 = " + format_double(1.0 - beta0);
}

double pad_for(double beta, double pad, double pad_cap) {
  return pad > 0.0 ? pad : std::min(2.0 / beta, pad_cap);
}

}  // namespace

MainConstant c2_constant(int n, double q, double beta, double beta0) {
  if (n < 1) throw Error(Errc::invalid_input, "dimension must be at least 1");
  if (!(q > 1.0) || !std::isfinite(q)) throw Error(Errc::invalid_exponent, "q must lie in (1, inf)");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(Errc::invalid_input, "beta must be positive");
  MainConstant mc;
  mc.n = n;
  mc.q = q;
  mc.beta = beta;
  mc.window_edge = n * (q - 1.0) / q;
  if (beta < mc.window_edge) {
    mc.c2 = std::pow(beta, mc.window_edge) / std::pow(n * (q - 1.0) - beta * q, 1.0 / q);
  }
  mc.valid = mc.c2.has_value() && beta < 1.0 - beta0;
  return mc;
}

double t2_tail_constant(int n, double q, double beta) {
  if (n < 1) throw Error(Errc::invalid_input, "dimension must be at least 1");
  if (!(q > 1.0) || !std::isfinite(q)) throw Error(Errc::invalid_exponent, "q must lie in (1, inf)");
  if (!(beta > 0.0)) throw Error(Errc::invalid_input, "beta must be positive");
  const double e = q * (n - beta) - n;
  if (!(e > 0.0)) {
    throw Error(Errc::divergent_tail, "|y|^{beta-n} is not q-integrable at infinity: q(n - beta) <= n");
  }
  return std::pow(sphere_measure(n) * std::pow(beta, e) / e, 1.0 / q);
}

EvalGrid padded_grid(const Field& f, double pad) {
  if (!(pad >= 0.0)) throw Error(Errc::invalid_input, "padding must be nonnegative");
  const double h = f.spacing();
  const auto cells = static_cast<std::size_t>(std::ceil(pad / h - 1e-9));
  EvalGrid grid{f.shape(), f.origin()};
  for (std::size_t a = 0; a < grid.shape.size(); ++a) {
    grid.shape[a] += 2 * cells;
    grid.origin[a] -= static_cast<double>(cells) * h;
  }
  return grid;
}

std::vector<DomainNorm> operator_norms(const SphereSymbol& omega, const KernelSpec& spec,
                                       const Field& f, KernelPart part, double pad,
                                       std::span<const double> qs) {
  QuadraturePlan plan;
  plan.eval = padded_grid(f, pad);
  const Applied out = part == KernelPart::far ? apply_t2(omega, spec, f, plan) : apply_part(omega, spec, f, part, plan);
  const double l1 = lq_norm(f, 1.0);
  const double reach = static_cast<double>((plan.eval->shape[0] - f.shape()[0]) / 2) * f.spacing();
  std::vector<DomainNorm> norms;
  for (double q : qs) {
    DomainNorm d;
    d.norm = lq_norm(out.values, q);
    d.pad = reach;
    const double e = q * (spec.n - spec.beta) - spec.n;
    if (l1 == 0.0) {
      d.tail_estimate = 0.0;
    } else if (e > 0.0 && reach > 0.0) {
      d.tail_estimate = omega.declared_bound * l1 * std::pow(sphere_measure(spec.n) * std::pow(reach, -e) / e, 1.0 / q);
    } else {
      d.tail_estimate = std::numeric_limits<double>::infinity();
    }
    norms.push_back(d);
  }
  return norms;
}

SweepReport t2_bound_check(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                           std::span<const double> qs, std::optional<double> constant) {
  spec.validate();
  SweepReport report("t2-bound", {"q", "beta", "t2_norm", "bound", "ratio", "c2_ratio", "tail_estimate"});
  const double l1 = lq_norm(f, 1.0);
  std::vector<double> valid_qs;
  for (double q : qs) {
    if (c2_constant(spec.n, q, spec.beta, spec.beta0).c2) valid_qs.push_back(q);
  }
  std::vector<DomainNorm> norms;
  if (!valid_qs.empty()) norms = operator_norms(omega, spec, f, KernelPart::far, 4.0 / spec.beta, valid_qs);

  double worst = 0.0;
  std::size_t k = 0;
  for (double q : qs) {
    const auto mc = c2_constant(spec.n, q, spec.beta, spec.beta0);
    if (!mc.c2) {
      report.add_row({q, spec.beta, {}, {}, {}, {}, {}}, Verdict::skip, window_reason(mc, spec.beta0));
      continue;
    }
    const DomainNorm& d = norms[k++];
    const double bound = omega.declared_bound * t2_tail_constant(spec.n, q, spec.beta) * l1;
    const double ratio = bound > 0.0 ? d.norm / bound : 0.0;
    bool ok = d.norm <= bound * (1.0 + 1e-12);
    Cell c2_cell;
    if (constant) {
      const double shaped = *constant * *mc.c2 * l1;
      const double c2_ratio = shaped > 0.0 ? d.norm / shaped : 0.0;
      c2_cell = c2_ratio;
      ok = ok && d.norm <= shaped * (1.0 + 1e-12);
    }
    worst = std::max(worst, ratio);
    report.add_row({q, spec.beta, d.norm, bound, ratio, c2_cell, d.tail_estimate}, ok ? Verdict::pass : Verdict::fail);
  }
  report.set_metric("worst_ratio", worst);
  return report;
}

SweepReport main_ratio_sweep(const SphereSymbol& omega, std::span<const Field> corpus,
                             const MainSweepOptions& options) {
  SweepReport report("main-sweep", {"member", "q", "beta", "eps", "t_norm", "f_q", "f_1", "c2", "ratio", "tail_estimate"});
  if (options.qs.empty() || options.betas.empty() || options.eps_multiples.empty()) {
    throw Error(Errc::invalid_input, "main sweep needs nonempty q, beta and eps lists");
  }
  std::map<double, double> per_beta;
  double max_ratio = 0.0;
  for (std::size_t m = 0; m < corpus.size(); ++m) {
    const Field& f = corpus[m];
    const double l1 = lq_norm(f, 1.0);
    for (double beta : options.betas) {
      std::vector<double> valid_qs;
      for (double q : options.qs) {
        if (c2_constant(f.dim(), q, beta, options.beta0).valid) valid_qs.push_back(q);
      }
      for (double mult : options.eps_multiples) {
        KernelSpec spec;
        spec.n = f.dim();
        spec.beta = beta;
        spec.epsilon = mult * f.spacing();
        spec.beta0 = options.beta0;
        std::vector<DomainNorm> norms;
        if (!valid_qs.empty()) {
          norms = operator_norms(omega, spec, f, KernelPart::full, pad_for(beta, options.pad, options.pad_cap), valid_qs);
        }
        std::size_t k = 0;
        for (double q : options.qs) {
          const auto mc = c2_constant(f.dim(), q, beta, options.beta0);
          const auto member = static_cast<std::int64_t>(m);
          if (!mc.valid) {
            report.add_row({member, q, beta, mult, {}, {}, {}, {}, {}, {}}, Verdict::skip,
                           window_reason(mc, options.beta0));
            continue;
          }
          const DomainNorm& d = norms[k++];
          const double fq = lq_norm(f, q);
          const double denom = fq + *mc.c2 * l1;
          const double ratio = denom > 0.0 ? d.norm / denom : 0.0;
          max_ratio = std::max(max_ratio, ratio);
          per_beta[beta] = std::max(per_beta[beta], ratio);
          const bool ok = !options.constant || ratio <= *options.constant;
          report.add_row({member, q, beta, mult, d.norm, fq, l1, *mc.c2, ratio, d.tail_estimate},
                         ok ? Verdict::pass : Verdict::fail);
        }
      }
    }
  }
  report.set_metric("max_ratio", max_ratio);
  double hi = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& [beta, value] : per_beta) {
    report.set_metric("max_ratio." + format_double(beta), value);
    hi = std::max(hi, value);
    lo = std::min(lo, value);
  }
  if (!per_beta.empty() && lo > 0.0) {
    const double trend = hi / lo;
    report.set_metric("beta_trend_ratio", trend);
    report.add_row({std::string("all"), {}, {}, {}, {}, {}, {}, {}, trend, {}},
                   trend < options.trend_factor ? Verdict::pass : Verdict::fail,
                   "max/min of the per-beta maxima");
  }
  if (options.constant) report.set_metric("constant", *options.constant);
  return report;
}

double calibrate_main_constant(const SphereSymbol& omega, std::span<const Field> corpus,
                               const MainSweepOptions& options) {
  if (corpus.empty()) throw Error(Errc::invalid_input, "calibration corpus is empty");
  MainSweepOptions uncapped = options;
  uncapped.constant.reset();
  return 1.25 * main_ratio_sweep(omega, corpus, uncapped).metric("max_ratio");
}

SweepReport theorem13_q2_check(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                               double constant, double pad, double pad_cap) {
  if (omega.name.rfind("riesz", 0) != 0) throw Error(Errc::wrong_symbol, "the q = 2 estimate is stated for Riesz symbols");
  spec.validate();
  if (!spec.in_near_window()) throw Error(Errc::out_of_validity, "beta must lie in (0, 1 - beta0]");
  SweepReport report("theorem13-q2", {"beta", "t_norm", "f_2", "f_1", "coefficient", "bound", "ratio"});
  const double n = spec.n;
  const double coefficient = std::pow(spec.beta, n / 2) / std::sqrt(n - 2 * spec.beta);
  const std::vector<double> two{2.0};
  const double t = operator_norms(omega, spec, f, KernelPart::full, pad_for(spec.beta, pad, pad_cap), two)[0].norm;
  const double f2 = lq_norm(f, 2.0);
  const double f1 = lq_norm(f, 1.0);
  const double bound = constant * (f2 + coefficient * f1);
  const double ratio = bound > 0.0 ? t / bound : 0.0;
  report.add_row({spec.beta, t, f2, f1, coefficient, bound, ratio},
                 t <= bound * (1.0 + 1e-12) ? Verdict::pass : Verdict::fail);
  report.set_metric("coefficient", coefficient);
  report.set_metric("ratio", ratio);
  return report;
}

}  // namespace czx
