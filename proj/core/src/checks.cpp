#include "czx/checks.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "czx/error.hpp"
#include "czx/field_io.hpp"
#include "czx/operator.hpp"

namespace czx {

SweepReport split_check(const SphereSymbol& omega, const KernelSpec& spec, const Field& f, double tolerance) {
  SweepReport report("split-check", {"n", "beta", "eps", "max_residual", "scale", "relative"});
  const auto t = apply_direct(omega, spec, f);
  const auto t1 = apply_t1(omega, spec, f);
  const auto t2 = apply_t2(omega, spec, f);
  double scale = 0.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    scale = std::max(scale, std::abs(t.values[i]));
    worst = std::max(worst, std::abs(t1.values[i] + t2.values[i] - t.values[i]));
  }
  const double relative = scale > 0.0 ? worst / scale : worst;
  report.add_row({static_cast<std::int64_t>(spec.n), spec.beta, spec.epsilon, worst, scale, relative},
                 relative <= tolerance ? Verdict::pass : Verdict::fail);
  report.set_metric("max_relative_residual", relative);
  return report;
}

Field mexican_hat(int n, double side, double h, double sigma) {
  if (!(sigma > 0.0) || !(h > 0.0) || !(side > 0.0)) throw Error(Errc::invalid_input, "side, h and sigma must be positive");
  const auto nn = static_cast<std::size_t>(n);
  const auto cells = static_cast<std::size_t>(std::llround(side / h));
  const double c = side / 2;
  const double s2 = 2 * sigma * sigma;
  return Field::sample(std::vector<std::size_t>(nn, cells), h, std::vector<double>(nn, 0.0),
                       [&](std::span<const double> x) {
                         double r2 = 0.0;
                         for (double v : x) r2 += (v - c) * (v - c);
                         if (r2 > 36 * sigma * sigma) return 0.0;
                         return (1 - r2 / s2) * std::exp(-r2 / s2);
                       });
}

SweepReport riesz_recovery(const SphereSymbol& omega, const Field& f, double epsilon,
                           std::span<const double> betas, double final_fraction) {
  if (omega.name.rfind("riesz-", 0) != 0) throw Error(Errc::wrong_symbol, "recovery compares against a Riesz transform");
  const int axis = std::stoi(omega.name.substr(6)) - 1;
  if (axis < 0 || axis >= f.dim()) throw Error(Errc::wrong_symbol, "Riesz axis exceeds the dimension");
  if (betas.empty()) throw Error(Errc::invalid_input, "recovery needs at least one beta");

  SweepReport report("recovery", {"beta", "eps", "kernel_radius", "rel_l2_error"});
  const Field ref = riesz_reference(f, axis);
  const double ref_norm = lq_norm(ref, 2.0);
  if (ref_norm == 0.0) throw Error(Errc::degenerate_instance, "Riesz reference vanishes");

  std::vector<double> errors;
  for (double beta : betas) {
    KernelSpec spec;
    spec.n = f.dim();
    spec.beta = beta;
    spec.epsilon = epsilon;
    PeriodicOptions po;
    po.part = KernelPart::full;
    const auto out = apply_periodic_fft(omega, spec, f, po);
    Field diff = out.values;
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] -= ref[i];
    const double err = lq_norm(diff, 2.0) / ref_norm;
    errors.push_back(err);
    report.add_row({beta, epsilon, out.kernel_radius, err}, Verdict::pass);
    report.set_metric("error." + format_double(beta), err);
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < errors.size(); ++k) decreasing = decreasing && errors[k] < errors[k - 1];
  const double fraction = errors.back() / errors.front();
  report.set_metric("final_fraction", fraction);
  const bool ok = decreasing && fraction <= final_fraction;
  report.add_row({std::string("trend"), {}, {}, fraction}, ok ? Verdict::pass : Verdict::fail,
                 decreasing ? "last/first error" : "errors not strictly decreasing");
  return report;
}

}  // namespace czx
