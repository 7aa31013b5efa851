#include "czx/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "czx/error.hpp"
#include "czx/field_io.hpp"
#include "czx/numeric.hpp"
#include "czx/operator.hpp"

namespace czx {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kGradedPanels = 60;

struct Radial {
  double value = 0.0;
  double error = 0.0;
};

// int_0^{2/beta} r^{beta-1} chi(beta r) (g(r) - g0) dr. Panels grow
// geometrically away from the origin and are capped at a quarter period of
// the oscillation; breakpoints sit where chi starts and stops varying.
template <class G>
Radial radial_integral(double beta, double rho, G&& g, double g0, const SymbolOptions& opt) {
  const double mid = 1.0 / beta;
  const double end = 2.0 / beta;
  const double quarter = rho > 0.0 ? 0.25 / rho : kInf;
  const double r0 = std::min({mid, quarter, 1.0});
  const GaussRule& lo = gauss_legendre(opt.low_order);
  const GaussRule& hi = gauss_legendre(opt.high_order);

  auto integrand = [&](double r) {
    double w = std::pow(r, beta - 1.0);
    if (r > mid) w *= cutoff(beta * r);
    return w * (g(r) - g0);
  };
  long double total = 0.0L;
  long double error = 0.0L;
  auto panel = [&](double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    long double coarse = 0.0L;
    long double fine = 0.0L;
    for (std::size_t i = 0; i < lo.nodes.size(); ++i) coarse += lo.weights[i] * integrand(c + half * lo.nodes[i]);
    for (std::size_t i = 0; i < hi.nodes.size(); ++i) fine += hi.weights[i] * integrand(c + half * hi.nodes[i]);
    total += fine * half;
    error += std::abs(fine - coarse) * half;
  };

  double b = r0;
  for (int m = 0; m < kGradedPanels; ++m) {
    panel(0.5 * b, b);
    b *= 0.5;
  }
  for (const auto& [from, to] : {std::pair{r0, mid}, std::pair{mid, end}}) {
    double a = from;
    while (a < to) {
      const double width = std::min({a, quarter, to - a});
      const double next = (to - a - width) < 1e-12 * to ? to : a + width;
      panel(a, next);
      a = next;
    }
  }
  return {static_cast<double>(total), static_cast<double>(error)};
}

struct Harmonic {
  int order;
  std::complex<double> coefficient;
};

// Fourier coefficients a_k of theta -> Omega(cos theta, sin theta), paired
// as the factor multiplying the radial J_k integral:
//   c_k = 2 pi i^k (a_k e^{i k phi} + a_{-k} e^{-i k phi}),  c_0 = 2 pi a_0.
std::vector<Harmonic> planar_harmonics(const SphereSymbol& omega, double phi, int max_k, double& mean) {
  const int samples = std::max(512, 8 * max_k);
  std::vector<double> values(static_cast<std::size_t>(samples));
  for (int m = 0; m < samples; ++m) {
    const double t = 2.0 * kPi * m / samples;
    const double u[2] = {std::cos(t), std::sin(t)};
    values[static_cast<std::size_t>(m)] = omega.evaluate(u);
    if (!std::isfinite(values[static_cast<std::size_t>(m)])) throw Error(Errc::invalid_symbol, "non-finite symbol value");
  }
  auto coefficient = [&](int k) {
    std::complex<long double> s = 0.0L;
    for (int m = 0; m < samples; ++m) {
      const long double t = -2.0L * std::numbers::pi_v<long double> * k * m / samples;
      s += std::complex<long double>(std::cos(t), std::sin(t)) * static_cast<long double>(values[static_cast<std::size_t>(m)]);
    }
    return std::complex<double>(s / static_cast<long double>(samples));
  };
  const double floor = 1e-15 * std::max(omega.declared_bound, 1e-300);
  std::vector<Harmonic> out;
  const auto a0 = coefficient(0);
  mean = 2.0 * kPi * a0.real();
  out.push_back({0, {2.0 * kPi * a0.real(), 0.0}});
  std::complex<double> ik{1.0, 0.0};
  for (int k = 1; k <= max_k; ++k) {
    ik *= std::complex<double>{0.0, 1.0};
    const auto ap = coefficient(k);
    const auto am = coefficient(-k);
    if (std::abs(ap) + std::abs(am) <= floor) continue;
    const std::complex<double> rot{std::cos(k * phi), std::sin(k * phi)};
    out.push_back({k, 2.0 * kPi * ik * (ap * rot + am * std::conj(rot))});
  }
  return out;
}

// b_l = (2l + 1) int_{S^2} P_l(u . e) Omega(u) dsigma(u), times i^l.
std::vector<Harmonic> spherical_harmonics(const SphereSymbol& omega, std::span<const double> axis, int max_l,
                                          double& mean) {
  // Orthonormal frame (e, p, q) with e = axis.
  const double e[3] = {axis[0], axis[1], axis[2]};
  double p[3];
  if (std::abs(e[0]) < 0.9) {
    p[0] = 0.0; p[1] = -e[2]; p[2] = e[1];
  } else {
    p[0] = -e[2]; p[1] = 0.0; p[2] = e[0];
  }
  const double pn = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  for (double& c : p) c /= pn;
  const double q[3] = {e[1] * p[2] - e[2] * p[1], e[2] * p[0] - e[0] * p[2], e[0] * p[1] - e[1] * p[0]};

  const int nt = std::max(48, 2 * max_l + 8);
  const int npsi = 2 * nt;
  const GaussRule& rule = gauss_legendre(nt);
  std::vector<double> ring(static_cast<std::size_t>(nt));
  for (int i = 0; i < nt; ++i) {
    const double t = rule.nodes[static_cast<std::size_t>(i)];
    const double s = std::sqrt(std::max(0.0, 1.0 - t * t));
    long double acc = 0.0L;
    for (int j = 0; j < npsi; ++j) {
      const double psi = 2.0 * kPi * j / npsi;
      double u[3];
      for (int a = 0; a < 3; ++a) u[a] = t * e[a] + s * (std::cos(psi) * p[a] + std::sin(psi) * q[a]);
      const double v = omega.evaluate(u);
      if (!std::isfinite(v)) throw Error(Errc::invalid_symbol, "non-finite symbol value");
      acc += v;
    }
    ring[static_cast<std::size_t>(i)] = static_cast<double>(acc) * 2.0 * kPi / npsi;
  }
  std::vector<Harmonic> out;
  const double floor = 1e-15 * std::max(omega.declared_bound, 1e-300);
  std::complex<double> il{1.0, 0.0};
  for (int l = 0; l <= max_l; ++l) {
    long double acc = 0.0L;
    for (int i = 0; i < nt; ++i) {
      const double t = rule.nodes[static_cast<std::size_t>(i)];
      double p0 = 1.0, p1 = t;
      double pl = l == 0 ? 1.0 : t;
      for (int k = 2; k <= l; ++k) {
        pl = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pl;
      }
      acc += rule.weights[static_cast<std::size_t>(i)] * pl * ring[static_cast<std::size_t>(i)];
    }
    const double b = (2.0 * l + 1.0) * static_cast<double>(acc);
    if (l == 0) mean = b;
    if (l == 0 || std::abs(b) > floor) out.push_back({l, il * b});
    il *= std::complex<double>{0.0, 1.0};
  }
  return out;
}

bool cancels(double mean, const SphereSymbol& omega, int n) {
  return std::abs(mean) <= 1e-10 * omega.declared_bound * sphere_measure(n);
}

}  // namespace

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::low: return "low";
    case Regime::mid: return "mid";
    case Regime::high: return "high";
  }
  return "?";
}

Regime classify_regime(double y_norm, double beta) noexcept {
  if (y_norm < 0.5 * beta) return Regime::low;
  if (y_norm <= beta) return Regime::mid;
  return Regime::high;
}

double near_radial_mass(double beta) {
  // beta^{-beta} (1/beta + int_1^2 s^{beta-1} chi(s) ds)
  const GaussRule& rule = gauss_legendre(32);
  long double ramp = 0.0L;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double s = 1.5 + 0.5 * rule.nodes[i];
    ramp += rule.weights[i] * std::pow(s, beta - 1.0) * cutoff(s);
  }
  return std::pow(beta, -beta) * (1.0 / beta + 0.5 * static_cast<double>(ramp));
}

SymbolSample symbol_k1(const SphereSymbol& omega, const KernelSpec& spec,
                       std::span<const double> y, const SymbolOptions& options) {
  if (!(spec.beta > 0.0)) throw Error(Errc::invalid_input, "beta must be positive");
  if (spec.beta >= 1.0) throw Error(Errc::out_of_validity, "symbol bound requires beta < 1");
  const int n = spec.n;
  if (n < 1 || n > 3) throw Error(Errc::unsupported_dimension, "symbols are computed for n = 1, 2, 3");
  if (static_cast<int>(y.size()) != n) throw Error(Errc::invalid_input, "frequency dimension mismatch");
  if (!omega.supports(n)) throw Error(Errc::unsupported_dimension, "symbol " + omega.name + " not defined in this dimension");
  for (double c : y) {
    if (!std::isfinite(c)) throw Error(Errc::invalid_input, "frequency must be finite");
  }
  const double beta = spec.beta;
  const double rho = norm2(y);
  const double w = 2.0 * kPi * rho;

  SymbolSample out;
  out.y.assign(y.begin(), y.end());
  out.beta = beta;
  out.regime = classify_regime(rho, beta);

  std::complex<double> value{};
  double error = 0.0;
  if (n == 1) {
    const double plus_u = 1.0, minus_u = -1.0;
    const double op = omega.evaluate(std::span(&plus_u, 1));
    const double om = omega.evaluate(std::span(&minus_u, 1));
    if (!std::isfinite(op) || !std::isfinite(om)) throw Error(Errc::invalid_symbol, "non-finite symbol value");
    const double even = 0.5 * (op + om);
    const double odd = 0.5 * (op - om);
    const double direction = y[0] < 0.0 ? -1.0 : 1.0;
    out.cancelling = cancels(2.0 * even, omega, 1);
    if (odd != 0.0) {
      const auto s = radial_integral(beta, rho, [&](double r) { return std::sin(w * r); }, 0.0, options);
      value += std::complex<double>{0.0, 2.0 * direction * odd * s.value};
      error += 2.0 * std::abs(odd) * s.error;
    }
    if (!out.cancelling) {
      const auto c = radial_integral(beta, rho, [&](double r) { return std::cos(w * r); }, 1.0, options);
      value += 2.0 * even * (c.value + near_radial_mass(beta));
      error += 2.0 * std::abs(even) * c.error;
    }
  } else if (n == 2) {
    const double phi = rho > 0.0 ? std::atan2(y[1], y[0]) : 0.0;
    double mean = 0.0;
    const auto harmonics = planar_harmonics(omega, phi, options.max_harmonic, mean);
    out.cancelling = cancels(mean, omega, 2);
    for (const auto& [k, c] : harmonics) {
      if (k == 0) {
        if (out.cancelling) continue;
        const auto r = radial_integral(beta, rho, [&](double t) { return bessel_j(0.0, w * t); }, 1.0, options);
        value += c * (r.value + near_radial_mass(beta));
        error += std::abs(c) * r.error;
        continue;
      }
      const auto r = radial_integral(beta, rho, [&](double t) { return bessel_j(k, w * t); }, 0.0, options);
      value += c * r.value;
      error += std::abs(c) * r.error;
    }
  } else {
    std::vector<double> axis{1.0, 0.0, 0.0};
    if (rho > 0.0) {
      for (std::size_t a = 0; a < 3; ++a) axis[a] = y[a] / rho;
    }
    double mean = 0.0;
    const auto harmonics = spherical_harmonics(omega, axis, std::min(options.max_harmonic, 40), mean);
    out.cancelling = cancels(mean, omega, 3);
    for (const auto& [l, c] : harmonics) {
      if (l == 0) {
        if (out.cancelling) continue;
        const auto r = radial_integral(beta, rho, [&](double t) { return spherical_bessel_j(0, w * t); }, 1.0, options);
        value += c * (r.value + near_radial_mass(beta));
        error += std::abs(c) * r.error;
        continue;
      }
      const auto r = radial_integral(beta, rho, [&](double t) { return spherical_bessel_j(l, w * t); }, 0.0, options);
      value += c * r.value;
      error += std::abs(c) * r.error;
    }
  }
  out.value = value;
  out.quad_error_estimate = error;
  return out;
}

std::vector<double> default_y_norms(double beta) {
  std::vector<double> out{0.0};
  auto decade_grid = [&](double lo, double hi) {
    const int steps = static_cast<int>(std::lround(8.0 * std::log10(hi / lo)));
    for (int i = 0; i <= steps; ++i) out.push_back(lo * std::pow(10.0, i / 8.0));
  };
  decade_grid(0.1 * beta, 1e3 * beta);
  decade_grid(0.1, 100.0);
  std::sort(out.begin(), out.end());
  std::vector<double> unique;
  for (double v : out) {
    if (unique.empty() || v > unique.back() * (1.0 + 1e-9) + 1e-300) unique.push_back(v);
  }
  return unique;
}

SweepReport symbol_sweep(const SphereSymbol& omega, int n, std::span<const double> betas,
                         std::optional<std::vector<double>> y_norms, const SweepOptions& options) {
  if (betas.empty()) throw Error(Errc::invalid_input, "empty beta list");
  if (y_norms && y_norms->empty()) throw Error(Errc::invalid_input, "empty frequency grid");
  SweepReport report("symbol-sweep", {"beta", "y_norm", "regime", "abs_value", "re", "im", "quad_err"});

  struct PerBeta {
    double beta;
    double sup = 0.0;
    bool asserted = false;
  };
  std::vector<PerBeta> stats;
  for (double beta : betas) {
    const std::string key = format_double(beta);
    if (!(beta > 0.0) || beta >= 1.0) {
      report.add_row({beta, std::monostate{}, std::string("all"), std::monostate{}, std::monostate{}, std::monostate{}, std::monostate{}},
                     Verdict::skip, "beta outside (0, 1): symbol bound not defined");
      continue;
    }
    const bool asserted = beta <= 1.0 - options.beta0;
    KernelSpec spec;
    spec.n = n;
    spec.beta = beta;
    spec.beta0 = options.beta0;
    const auto grid = y_norms.value_or(default_y_norms(beta));
    double sup = 0.0;
    double regime_sup[3] = {0.0, 0.0, 0.0};
    for (double t : grid) {
      std::vector<double> y(static_cast<std::size_t>(n), 0.0);
      y[0] = t;
      const auto s = symbol_k1(omega, spec, y, options.symbol);
      const double a = std::abs(s.value);
      sup = std::max(sup, a);
      regime_sup[static_cast<int>(s.regime)] = std::max(regime_sup[static_cast<int>(s.regime)], a);
      report.add_row({beta, t, std::string(to_string(s.regime)), a, s.value.real(), s.value.imag(), s.quad_error_estimate},
                     asserted ? Verdict::pass : Verdict::skip,
                     asserted ? (s.cancelling ? "" : "non-cancelling symbol") : "beta above 1 - beta0: recorded only");
      if (t == 0.0) report.set_metric("origin_abs." + key, a);
    }
    report.set_metric("sup." + key, sup);
    for (int r = 0; r < 3; ++r) report.set_metric("sup." + key + "." + std::string(to_string(static_cast<Regime>(r))), regime_sup[r]);
    stats.push_back({beta, sup, asserted});
  }

  double lo = kInf, hi = 0.0;
  const PerBeta* baseline = nullptr;
  for (const auto& s : stats) {
    if (!s.asserted) continue;
    lo = std::min(lo, s.sup);
    hi = std::max(hi, s.sup);
    if (s.beta == options.baseline_beta) baseline = &s;
  }
  if (baseline == nullptr) {
    for (const auto& s : stats) {
      if (s.asserted && (baseline == nullptr || s.beta > baseline->beta)) baseline = &s;
    }
  }
  if (baseline == nullptr) return report;
  const double ratio = lo > 0.0 ? hi / lo : (hi > 0.0 ? kInf : 1.0);
  const bool uniform = ratio < options.uniformity_factor;
  report.set_metric("cross_beta_ratio", ratio);
  report.set_metric("baseline_sup", baseline->sup);
  for (const auto& s : stats) {
    if (!s.asserted) continue;
    const bool capped = s.sup <= options.baseline_factor * baseline->sup;
    std::string note;
    if (!uniform) note = "cross-beta ratio " + format_double(ratio) + " >= " + format_double(options.uniformity_factor);
    if (!capped) note += (note.empty() ? "" : "; ") + std::string("exceeds baseline by more than ") + format_double(options.baseline_factor);
    report.add_row({s.beta, std::monostate{}, std::string("all"), s.sup, std::monostate{}, std::monostate{}, std::monostate{}},
                   uniform && capped ? Verdict::pass : Verdict::fail, note);
  }
  return report;
}

PlancherelResult plancherel_check(const SphereSymbol& omega, const KernelSpec& spec,
                                  const Field& f, int refine) {
  PeriodicOptions popt;
  popt.part = KernelPart::near;
  popt.refine = refine;
  const Field samples = periodic_kernel_samples(omega, spec, f, popt);
  QuadraturePlan plan;
  plan.refinement_factor = refine;
  const auto t1 = apply_t1(omega, spec, f, plan);

  PlancherelResult out;
  out.lhs = lq_norm(t1.values, 2.0);
  const auto kw = dft(samples);
  const auto fw = dft(f);
  std::vector<double> power(kw.size());
  const double cell = f.cell_volume();
  for (std::size_t i = 0; i < kw.size(); ++i) power[i] = std::norm(cell * kw[i] * fw[i]);
  out.rhs = std::sqrt(pairwise_sum(power) * cell / static_cast<double>(f.size()));
  return out;
}

}  // namespace czx
