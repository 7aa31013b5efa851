#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "czx/error.hpp"
#include "czx/field_io.hpp"
#include "czx/numeric.hpp"
#include "czx/operator.hpp"
#include "czx/spectral.hpp"
#include "gen.hpp"

using namespace czx;
using boost::math::quadrature::gauss_kronrod;
using cplx = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

KernelSpec spec_of(int n, double beta, double eps = 0.01) {
  KernelSpec s;
  s.n = n;
  s.beta = beta;
  s.epsilon = eps;
  return s;
}

double chi(double s) {
  s = std::abs(s);
  if (s <= 1.0) return 1.0;
  if (s >= 2.0) return 0.0;
  const double c = std::cos(0.5 * pi * (s - 1.0));
  return c * c;
}

// Adaptive Gauss-Kronrod over panels no wider than `width`, breaking at the
// cutoff corners 1/beta and 2/beta.
template <class F>
double panel_integral(F f, double beta, double width) {
  const double top = 2.0 / beta;
  double sum = 0.0;
  double a = 0.0;
  while (a < top) {
    double b = std::min(a + width, top);
    if (a < 1.0 / beta && b > 1.0 / beta) b = 1.0 / beta;
    sum += gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-13);
    a = b;
  }
  return sum;
}

// n = 1 continuum symbol: int e^{2 pi i x y} Omega(sgn x) |x|^{beta-1} chi(beta x) dx.
cplx oracle_1d(const SphereSymbol& omega, double beta, double y) {
  const double plus = omega.evaluate(std::vector<double>{1.0});
  const double minus = omega.evaluate(std::vector<double>{-1.0});
  const double width = std::min(0.25, 1.0 / (8.0 * std::abs(y) + 1e-300));
  const double re = panel_integral(
      [&](double x) { return (std::cos(2 * pi * x * y) - 1.0) * std::pow(x, beta - 1) * chi(beta * x); }, beta, width);
  const double im = panel_integral(
      [&](double x) { return std::sin(2 * pi * x * y) * std::pow(x, beta - 1) * chi(beta * x); }, beta, width);
  return cplx((plus + minus) * re, (plus - minus) * im);
}

// n = 2 by brute force: trapezoid in the angle, adaptive quadrature in r.
cplx oracle_2d(const SphereSymbol& omega, double beta, std::array<double, 2> y) {
  constexpr int kAngles = 256;
  const double ynorm = std::hypot(y[0], y[1]);
  const double width = std::min(0.25, 1.0 / (8.0 * ynorm));
  cplx total = 0.0;
  for (int k = 0; k < kAngles; ++k) {
    const double t = 2 * pi * k / kAngles;
    const std::vector<double> u{std::cos(t), std::sin(t)};
    const double w = omega.evaluate(u) * 2 * pi / kAngles;
    const double phase = 2 * pi * (u[0] * y[0] + u[1] * y[1]);
    const double re = panel_integral(
        [&](double r) { return (std::cos(phase * r) - 1.0) * std::pow(r, beta - 1) * chi(beta * r); }, beta, width);
    const double im = panel_integral(
        [&](double r) { return std::sin(phase * r) * std::pow(r, beta - 1) * chi(beta * r); }, beta, width);
    total += w * cplx(re, im);
  }
  return total;
}

}  // namespace

TEST_CASE("symbol vanishes at the origin") {
  for (const char* name : {"sign", "riesz-1"}) {
    const int n = std::string(name) == "sign" ? 1 : 2;
    const auto omega = make_symbol(name, n);
    const std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
    CHECK(std::abs(symbol_k1(omega, spec_of(n, 0.3), zero).value) < 1e-12);
  }
}

TEST_CASE("n = 1 symbol matches direct oscillatory quadrature") {
  const auto sign = make_symbol("sign", 1);
  for (double beta : {0.5, 0.2}) {
    for (double y : {0.03, 0.2, 0.7, 3.0, -1.3}) {
      const auto s = symbol_k1(sign, spec_of(1, beta), std::vector<double>{y});
      const cplx expect = oracle_1d(sign, beta, y);
      CHECK(std::abs(s.value - expect) <= 1e-8 * std::max(1.0, std::abs(expect)));
      CHECK(s.quad_error_estimate < 1e-6);
    }
  }
}

TEST_CASE("n = 2 symbol matches brute-force polar quadrature") {
  for (const char* name : {"riesz-1", "cos2theta"}) {
    const auto omega = make_symbol(name, 2);
    for (auto y : {std::array<double, 2>{0.4, 0.3}, std::array<double, 2>{-0.05, 0.12}, std::array<double, 2>{1.1, -0.7}}) {
      const auto s = symbol_k1(omega, spec_of(2, 0.5), std::vector<double>{y[0], y[1]});
      const cplx expect = oracle_2d(omega, 0.5, y);
      CHECK(std::abs(s.value - expect) <= 1e-7 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST_CASE("small beta limits") {
  const auto sign = make_symbol("sign", 1);
  const auto s = symbol_k1(sign, spec_of(1, 1e-3), std::vector<double>{1.0});
  CHECK(std::abs(s.value) == doctest::Approx(pi).epsilon(0.01));
  CHECK(s.value.imag() > 0.0);

  // Riesz multiplier at beta -> 0 tends to conj(-2 pi i y_j / |y|).
  const auto riesz = make_symbol("riesz-1", 2);
  const auto r = symbol_k1(riesz, spec_of(2, 1e-3), std::vector<double>{1.0, 0.0});
  CHECK(std::abs(r.value - cplx(0.0, 2 * pi)) < 0.05);
}

TEST_CASE("non-cancelling symbol grows like 2 beta^{-beta-1}") {
  const auto one = make_symbol("const", 1);
  const double beta = 0.01;
  const auto s = symbol_k1(one, spec_of(1, beta), std::vector<double>{0.0});
  CHECK_FALSE(s.cancelling);
  CHECK(std::abs(s.value) >= 2.0 * std::pow(1.0 / beta, beta) / beta);
  const double ramp = gauss_kronrod<double, 31>::integrate(
      [&](double t) { return std::pow(t, beta - 1) * chi(t); }, 1.0, 2.0, 10, 1e-14);
  const double closed = 2.0 * std::pow(beta, -beta) * (1.0 / beta + ramp);
  CHECK(s.value.real() == doctest::Approx(closed).epsilon(1e-10));
  CHECK(near_radial_mass(beta) == doctest::Approx(closed / 2).epsilon(1e-12));
}

TEST_CASE("property: Hermitian symmetry and odd symbols are imaginary") {
  testing::Rng rng(17);
  const char* names[] = {"sign", "riesz-1", "riesz-2", "cos2theta"};
  for (int trial = 0; trial < 40; ++trial) {
    const std::string name = names[rng.index(4)];
    const int n = name == "sign" ? 1 : 2;
    const auto omega = make_symbol(name, n);
    const double beta = rng.uniform(0.05, 0.95);
    std::vector<double> y(static_cast<std::size_t>(n));
    for (double& v : y) v = rng.uniform(-3.0, 3.0) * std::pow(10.0, rng.uniform(-2.0, 0.0));
    std::vector<double> minus = y;
    for (double& v : minus) v = -v;
    const auto a = symbol_k1(omega, spec_of(n, beta), y);
    const auto b = symbol_k1(omega, spec_of(n, beta), minus);
    CHECK(std::abs(b.value - std::conj(a.value)) <= 1e-10);
    if (omega.parity == Parity::odd) CHECK(std::abs(a.value.real()) <= std::max(1e-10, a.quad_error_estimate));
  }
}

TEST_CASE("regime labels and continuity across the case split") {
  CHECK(classify_regime(0.1, 0.3) == Regime::low);
  CHECK(classify_regime(0.15, 0.3) == Regime::mid);
  CHECK(classify_regime(0.3, 0.3) == Regime::mid);
  CHECK(classify_regime(0.31, 0.3) == Regime::high);
  const auto sign = make_symbol("sign", 1);
  for (double beta : {0.5, 0.1, 0.01}) {
    for (double edge : {beta / 2, beta}) {
      const auto below = symbol_k1(sign, spec_of(1, beta), std::vector<double>{edge * (1 - 1e-12)});
      const auto above = symbol_k1(sign, spec_of(1, beta), std::vector<double>{edge * (1 + 1e-12)});
      CHECK(below.regime != above.regime);
      CHECK(std::abs(std::abs(below.value) - std::abs(above.value)) <=
            below.quad_error_estimate + above.quad_error_estimate + 1e-10);
    }
  }
}

TEST_CASE("sweeps: uniform for sign, diverging for const") {
  const std::vector<double> betas{0.5, 0.1, 0.01, 0.001};
  std::vector<double> ys{0.0};
  for (int k = -8; k <= 8; ++k) ys.push_back(std::pow(10.0, k / 4.0));
  const auto sign = make_symbol("sign", 1);
  const auto good = symbol_sweep(sign, 1, betas, ys);
  CHECK(good.passed());
  CHECK(good.metric("cross_beta_ratio") < 2.0);

  const auto one = make_symbol("const", 1);
  const auto bad = symbol_sweep(one, 1, betas, ys);
  CHECK_FALSE(bad.passed());
  CHECK(bad.metric("cross_beta_ratio") > 2.0);
  double previous = 0.0;
  for (double beta : {0.5, 0.1, 0.01, 0.001}) {
    const double sup = bad.metric("sup." + format_double(beta));
    CHECK(sup > previous);
    previous = sup;
  }

  const std::vector<double> single{0.5};
  CHECK(symbol_sweep(sign, 1, single, ys).passed());

  const std::vector<double> near_one{0.5, 0.995};
  const auto skipped = symbol_sweep(sign, 1, near_one, ys);
  CHECK(skipped.count(Verdict::skip) > 0);
}

TEST_CASE("symbol preconditions") {
  const auto sign = make_symbol("sign", 1);
  const std::vector<double> none;
  const std::vector<double> betas{0.5};
  try {
    symbol_sweep(sign, 1, none, std::vector<double>{1.0});
    FAIL("expected invalid_input");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_input);
  }
  CHECK_THROWS_AS(symbol_sweep(sign, 1, betas, std::vector<double>{}), Error);
  try {
    symbol_k1(sign, spec_of(1, 1.2), std::vector<double>{1.0});
    FAIL("expected out_of_validity");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::out_of_validity);
  }
}

TEST_CASE("Plancherel identity on the periodic box") {
  const auto sign = make_symbol("sign", 1);
  const double h = 1.0 / 16;
  const KernelSpec spec = spec_of(1, 0.3, 2 * h);
  const Field zero({512}, h, {-16.0});
  const auto z = plancherel_check(sign, spec, zero);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);

  const Field gauss = Field::sample({512}, h, {-16.0}, [](std::span<const double> x) {
    return std::abs(x[0]) < 6.0 ? std::exp(-0.5 * x[0] * x[0]) : 0.0;
  });
  const auto g = plancherel_check(sign, spec, gauss);
  CHECK(g.lhs / g.rhs == doctest::Approx(1.0).epsilon(1e-5));

  Field impulse({512}, h, {-16.0});
  impulse[256] = 1.0 / h;
  const auto p = plancherel_check(sign, spec, impulse);
  const Field samples = periodic_kernel_samples(sign, spec, impulse, PeriodicOptions{});
  double l2 = 0.0;
  for (double v : samples.values()) l2 += v * v;
  CHECK(p.lhs == doctest::Approx(std::sqrt(h * l2)).epsilon(1e-12));
  CHECK(p.rhs == doctest::Approx(p.lhs).epsilon(1e-12));

  CHECK_THROWS_AS(plancherel_check(sign, spec, Field::sample({64}, h, {-2.0}, [](auto) { return 1.0; })), Error);
}

TEST_CASE("Bessel functions agree with the standard library") {
  testing::Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const double nu = static_cast<double>(rng.index(30));
    const double z = rng.uniform(0.0, 400.0);
    CHECK(std::abs(bessel_j(nu, z) - std::cyl_bessel_j(nu, z)) < 1e-11);
    const int l = static_cast<int>(rng.index(20));
    const double zs = rng.uniform(1e-3, 300.0);
    CHECK(std::abs(spherical_bessel_j(l, zs) - std::sph_bessel(static_cast<unsigned>(l), zs)) < 1e-11);
  }
}
