#include "czx/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "czx/error.hpp"
#include "czx/numeric.hpp"

namespace czx {

namespace {

constexpr double kPi = std::numbers::pi;

SphereSymbol riesz_symbol(int axis) {
  SphereSymbol s;
  s.name = "riesz-" + std::to_string(axis + 1);
  s.evaluate = [axis](std::span<const double> u) { return u[static_cast<std::size_t>(axis)]; };
  s.declared_bound = 1.0;
  s.parity = Parity::odd;
  s.min_dim = std::max(1, axis + 1);
  s.max_dim = 3;
  return s;
}

}  // namespace

double SphereSymbol::at(std::span<const double> x) const {
  const double r = norm2(x);
  if (r == 0.0) throw Error(Errc::singularity, "symbol evaluated at the origin");
  std::array<double, 3> u{};
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = x[i] / r;
  return evaluate(std::span<const double>(u.data(), x.size()));
}

SphereSymbol make_symbol(std::string_view name, int n) {
  SphereSymbol s;
  if (name == "riesz-1") {
    s = riesz_symbol(0);
  } else if (name == "riesz-2") {
    s = riesz_symbol(1);
  } else if (name == "riesz-3") {
    s = riesz_symbol(2);
  } else if (name == "sign") {
    s.name = "sign";
    s.evaluate = [](std::span<const double> u) { return u[0] > 0.0 ? 1.0 : -1.0; };
    s.parity = Parity::odd;
    s.min_dim = s.max_dim = 1;
  } else if (name == "const") {
    s.name = "const";
    s.evaluate = [](std::span<const double>) { return 1.0; };
    s.parity = Parity::even;
  } else if (name == "cos2theta") {
    s.name = "cos2theta";
    s.evaluate = [](std::span<const double> u) { return u[0] * u[0] - u[1] * u[1]; };
    s.parity = Parity::even;
    s.min_dim = s.max_dim = 2;
  } else if (name.starts_with("table:")) {
    s = load_tabulated_symbol(std::string(name.substr(6)));
  } else {
    throw Error(Errc::invalid_symbol, "unknown symbol '" + std::string(name) + "'");
  }
  if (!s.supports(n)) {
    throw Error(Errc::unsupported_dimension,
                "symbol '" + s.name + "' is not defined for n = " + std::to_string(n));
  }
  return s;
}

SphereSymbol tabulated_symbol(std::string name, std::vector<double> angles,
                              std::vector<double> values) {
  if (angles.size() != values.size() || angles.size() < 2) {
    throw Error(Errc::invalid_symbol, "tabulated symbol needs at least two angle,value rows");
  }
  std::vector<std::pair<double, double>> rows;
  rows.reserve(angles.size());
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!std::isfinite(angles[i]) || !std::isfinite(values[i])) {
      throw Error(Errc::invalid_symbol, "tabulated symbol has a non-finite entry");
    }
    rows.emplace_back(std::fmod(std::fmod(angles[i], 2 * kPi) + 2 * kPi, 2 * kPi), values[i]);
  }
  std::sort(rows.begin(), rows.end());
  std::vector<double> a;
  std::vector<double> v;
  for (const auto& [x, y] : rows) {
    a.push_back(x);
    v.push_back(y);
  }
  double bound = 0.0;
  for (double y : v) bound = std::max(bound, std::abs(y));

  SphereSymbol s;
  s.name = std::move(name);
  s.declared_bound = bound;
  s.parity = Parity::none;
  s.min_dim = s.max_dim = 2;
  s.evaluate = [a = std::move(a), v = std::move(v)](std::span<const double> u) {
    double theta = std::atan2(u[1], u[0]);
    if (theta < 0.0) theta += 2 * kPi;
    const auto it = std::upper_bound(a.begin(), a.end(), theta);
    const std::size_t hi = static_cast<std::size_t>(it - a.begin()) % a.size();
    const std::size_t lo = (hi + a.size() - 1) % a.size();
    double span = a[hi] - a[lo];
    double offset = theta - a[lo];
    if (span <= 0.0) span += 2 * kPi;
    if (offset < 0.0) offset += 2 * kPi;
    const double t = span > 0.0 ? offset / span : 0.0;
    return (1.0 - t) * v[lo] + t * v[hi];
  };
  return s;
}

SphereSymbol load_tabulated_symbol(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw Error(Errc::io, "cannot open symbol table '" + csv_path + "'");
  std::vector<double> angles;
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0;
    double v = 0.0;
    if (!(row >> a >> v)) continue;  // header or malformed row
    angles.push_back(a);
    values.push_back(v);
  }
  return tabulated_symbol("table:" + csv_path, std::move(angles), std::move(values));
}

void KernelSpec::validate() const {
  if (n < 1) throw Error(Errc::invalid_input, "dimension must be >= 1");
  if (!(beta > 0.0 && beta < n)) throw Error(Errc::invalid_input, "beta must lie in (0, n)");
  if (!(epsilon > 0.0)) throw Error(Errc::invalid_input, "epsilon must be positive");
  if (!(beta0 > 0.0 && beta0 < 0.5)) throw Error(Errc::invalid_input, "beta0 must lie in (0, 1/2)");
}

double cutoff(double s) noexcept {
  const double a = std::abs(s);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  const double c = std::cos(0.5 * kPi * (a - 1.0));
  return c * c;
}

double cutoff_derivative(double s) noexcept {
  const double a = std::abs(s);
  if (a <= 1.0 || a >= 2.0) return 0.0;
  const double d = -0.5 * kPi * std::sin(kPi * (a - 1.0));
  return s < 0.0 ? -d : d;
}

double eval_cutoff(const KernelSpec& spec, double s) noexcept { return cutoff(spec.beta * s); }

double eval_kernel(const SphereSymbol& omega, const KernelSpec& spec,
                   std::span<const double> point) {
  if (static_cast<int>(point.size()) != spec.n) {
    throw Error(Errc::invalid_input, "point dimension does not match kernel dimension");
  }
  const double r = norm2(point);
  if (r == 0.0) throw Error(Errc::singularity, "kernel evaluated at the origin");
  return omega.at(point) * std::pow(r, spec.beta - spec.n);
}

double eval_k1(const SphereSymbol& omega, const KernelSpec& spec,
               std::span<const double> point) {
  const double k = eval_kernel(omega, spec, point);
  return k * eval_cutoff(spec, norm2(point));
}

double eval_k2(const SphereSymbol& omega, const KernelSpec& spec,
               std::span<const double> point) {
  const double k = eval_kernel(omega, spec, point);
  return k * (1.0 - eval_cutoff(spec, norm2(point)));
}

SphereRule sphere_rule(int n, int order) {
  SphereRule rule;
  rule.n = n;
  switch (n) {
    case 1:
      rule.points = {1.0, -1.0};
      rule.weights = {1.0, 1.0};
      break;
    case 2:
      for (int k = 0; k < order; ++k) {
        const double t = 2 * kPi * k / order;
        rule.points.push_back(std::cos(t));
        rule.points.push_back(std::sin(t));
        rule.weights.push_back(2 * kPi / order);
      }
      break;
    case 3: {
      const GaussRule& g = gauss_legendre(std::max(2, order / 2));
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double z = g.nodes[i];
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int k = 0; k < order; ++k) {
          const double phi = 2 * kPi * k / order;
          rule.points.push_back(rho * std::cos(phi));
          rule.points.push_back(rho * std::sin(phi));
          rule.points.push_back(z);
          rule.weights.push_back(g.weights[i] * 2 * kPi / order);
        }
      }
      break;
    }
    default:
      throw Error(Errc::unsupported_dimension, "sphere rules exist for n = 1, 2, 3 only");
  }
  return rule;
}

double dini_quadrature(std::span<const double> deltas, std::span<const double> omega_values) {
  if (deltas.empty()) return 0.0;
  double total = omega_values[0];
  for (std::size_t k = 1; k < deltas.size(); ++k) {
    const double a = omega_values[k - 1] / deltas[k - 1];
    const double b = omega_values[k] / deltas[k];
    total += 0.5 * (a + b) * (deltas[k] - deltas[k - 1]);
  }
  return total;
}

namespace {

constexpr int kDiniLevels = 24;
constexpr int kChordFractions = 4;
constexpr int kTangentDirections3d = 8;
constexpr std::size_t kMaxAllPairs = 4096;

// Index of the smallest grid delta >= chord, or -1 if chord exceeds 1.
int delta_bin(double chord) {
  if (chord > 1.0) return -1;
  if (chord <= 0.0) return 0;
  const int k = static_cast<int>(std::floor(-std::log2(chord)));
  int level = std::clamp(k, 0, kDiniLevels);
  // Correct for rounding in log2 so that 2^{-level} >= chord.
  while (level > 0 && std::ldexp(1.0, -level) < chord) --level;
  return kDiniLevels - level;
}

std::vector<std::array<double, 3>> tangents(int n, std::span<const double> u) {
  std::vector<std::array<double, 3>> out;
  if (n == 2) {
    out.push_back({-u[1], u[0], 0.0});
    out.push_back({u[1], -u[0], 0.0});
  } else if (n == 3) {
    // Orthonormal basis of the tangent plane at u.
    std::array<double, 3> a = std::abs(u[0]) < 0.9 ? std::array<double, 3>{1, 0, 0}
                                                    : std::array<double, 3>{0, 1, 0};
    const double d = a[0] * u[0] + a[1] * u[1] + a[2] * u[2];
    std::array<double, 3> e1{a[0] - d * u[0], a[1] - d * u[1], a[2] - d * u[2]};
    const double l1 = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
    for (double& c : e1) c /= l1;
    const std::array<double, 3> e2{u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2],
                                   u[0] * e1[1] - u[1] * e1[0]};
    for (int m = 0; m < kTangentDirections3d; ++m) {
      const double psi = 2 * kPi * m / kTangentDirections3d;
      out.push_back({std::cos(psi) * e1[0] + std::sin(psi) * e2[0],
                     std::cos(psi) * e1[1] + std::sin(psi) * e2[1],
                     std::cos(psi) * e1[2] + std::sin(psi) * e2[2]});
    }
  }
  return out;
}

double checked(const SphereSymbol& omega, std::span<const double> u) {
  const double v = omega.evaluate(u);
  if (!std::isfinite(v)) throw Error(Errc::invalid_symbol, "symbol '" + omega.name + "' returned a non-finite value");
  return v;
}

}  // namespace

KernelReport validate_symbol(const SphereSymbol& omega, int n, int quad_order) {
  if (n < 1 || n > 3) throw Error(Errc::unsupported_dimension, "validate_symbol supports n = 1, 2, 3");
  if (!omega.supports(n)) {
    throw Error(Errc::unsupported_dimension, "symbol '" + omega.name + "' is not defined for n = " + std::to_string(n));
  }
  if (quad_order < 16) throw Error(Errc::invalid_input, "quad_order must be >= 16");

  const SphereRule rule = sphere_rule(n, quad_order);
  std::vector<double> samples(rule.size());
  std::vector<double> weighted(rule.size());
  double bound = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    samples[i] = checked(omega, rule.point(i));
    weighted[i] = samples[i] * rule.weights[i];
    bound = std::max(bound, std::abs(samples[i]));
  }

  KernelReport report;
  report.cancellation_residual = pairwise_sum(weighted);

  // omega per delta bin, bin b <-> delta = 2^{-(kDiniLevels - b)}.
  std::vector<double> best(kDiniLevels + 1, 0.0);
  auto record = [&](double chord, double diff) {
    const int b = delta_bin(chord);
    if (b >= 0) best[static_cast<std::size_t>(b)] = std::max(best[static_cast<std::size_t>(b)], diff);
  };

  if (rule.size() <= kMaxAllPairs) {
    for (std::size_t i = 0; i < rule.size(); ++i) {
      for (std::size_t j = i + 1; j < rule.size(); ++j) {
        double c2 = 0.0;
        for (int a = 0; a < n; ++a) {
          const double d = rule.point(i)[static_cast<std::size_t>(a)] - rule.point(j)[static_cast<std::size_t>(a)];
          c2 += d * d;
        }
        record(std::sqrt(c2), std::abs(samples[i] - samples[j]));
      }
    }
  }

  // Stratified pairs: from every sample, step along tangent great circles to
  // chords delta * j / kChordFractions for every grid delta.
  std::array<double, 3> v{};
  for (std::size_t i = 0; i < rule.size() && n > 1; ++i) {
    const auto u = rule.point(i);
    for (const auto& t : tangents(n, u)) {
      for (int level = 0; level <= kDiniLevels; ++level) {
        const double delta = std::ldexp(1.0, -level);
        for (int j = 1; j <= kChordFractions; ++j) {
          const double chord = delta * j / kChordFractions;
          const double alpha = 2.0 * std::asin(0.5 * chord);
          for (int a = 0; a < n; ++a) {
            v[static_cast<std::size_t>(a)] = std::cos(alpha) * u[static_cast<std::size_t>(a)] +
                                             std::sin(alpha) * t[static_cast<std::size_t>(a)];
          }
          const std::span<const double> vs(v.data(), static_cast<std::size_t>(n));
          const double value = checked(omega, vs);
          bound = std::max(bound, std::abs(value));
          record(chord, std::abs(samples[i] - value));
        }
      }
    }
  }

  DiniProfile& dini = report.dini;
  for (int b = 0; b <= kDiniLevels; ++b) {
    const double delta = std::ldexp(1.0, -(kDiniLevels - b));
    dini.deltas.push_back(delta);
    double w = omega.analytic_modulus ? omega.analytic_modulus(delta) : best[static_cast<std::size_t>(b)];
    if (!dini.omega_values.empty()) w = std::max(w, dini.omega_values.back());
    dini.omega_values.push_back(w);
  }
  dini.dini_integral = dini_quadrature(dini.deltas, dini.omega_values);

  report.bound_estimate = bound;
  report.tolerance = 1e-10 * std::max(bound, 1e-300) * sphere_measure(n);
  report.admissible = std::abs(report.cancellation_residual) <= report.tolerance &&
                      std::isfinite(dini.dini_integral);
  return report;
}

}  // namespace czx
