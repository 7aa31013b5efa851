#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "czx/error.hpp"
#include "czx/field.hpp"
#include "czx/field_io.hpp"
#include "czx/numeric.hpp"
#include "gen.hpp"

using namespace czx;

namespace {

Field indicator_unit(double h, double lo, double hi, std::size_t cells, double origin = 0.0) {
  return Field::sample({cells}, h, {origin}, [&](std::span<const double> x) { return x[0] >= lo && x[0] < hi ? 1.0 : 0.0; });
}

Field random_field(testing::Rng& rng, int n) {
  std::vector<std::size_t> shape(static_cast<std::size_t>(n));
  for (auto& s : shape) s = 1 + rng.index(n == 1 ? 300 : 24);
  std::vector<double> origin(static_cast<std::size_t>(n));
  for (auto& o : origin) o = rng.uniform(-2.0, 2.0);
  Field f(shape, std::ldexp(1.0, -static_cast<int>(rng.index(6))), origin);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform(-3.0, 3.0);
  return f;
}

}  // namespace

TEST_CASE("lq_norm examples") {
  const double h = std::ldexp(1.0, -10);
  const auto ind = indicator_unit(h, 0.0, 1.0, 2048, -0.5);
  CHECK(std::abs(lq_norm(ind, 2.0) - 1.0) <= h);
  CHECK(lq_norm(Field({16}, 0.5, {0.0}), 2.0) == 0.0);

  const auto gauss = Field::sample({768}, 1.0 / 64, {-6.0}, [](std::span<const double> x) { return std::exp(-std::numbers::pi * x[0] * x[0]); });
  CHECK(lq_norm(gauss, 2.0) == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-12));
  CHECK(lq_norm(gauss, kInfinity) == doctest::Approx(std::exp(-std::numbers::pi / 4096 / 4)).epsilon(1e-15));

  for (double q : {0.0, -1.0}) {
    try {
      (void)lq_norm(gauss, q);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_exponent);
    }
  }
}

TEST_CASE("exponent conjugates") {
  for (double q : {1.1, 1.5, 2.0, 3.0, 7.25}) {
    const ExponentQ e(q);
    CHECK(std::abs(1.0 / e.q + 1.0 / e.conjugate - 1.0) <= 1e-14);
  }
  CHECK_THROWS_AS(ExponentQ(1.0), Error);
}

TEST_CASE("distribution and layer cake examples") {
  const double h = std::ldexp(1.0, -8);
  const auto ind = indicator_unit(h, 0.0, 1.0, 512);
  CHECK(distribution_measure(ind, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(layer_cake_power_norm(ind, 2.0) == doctest::Approx(1.0).epsilon(1e-15));

  testing::Rng rng(11);
  Field pm({256}, 1.0 / 256, {0.0});
  for (std::size_t i = 0; i < pm.size(); ++i) pm[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  double direct = 0.0;
  for (double v : pm.values()) direct += std::abs(v * v * v) * pm.spacing();
  CHECK(std::abs(layer_cake_power_norm(pm, 3.0) - direct) <= 1e-12 * direct);
}

TEST_CASE("layer cake matches the direct power sum on random fields") {
  testing::Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_field(rng, 1 + static_cast<int>(rng.index(2)));
    const double p = rng.uniform(1.0, 6.0);
    const double direct = std::pow(lq_norm(f, p), p);
    CHECK(relative_difference(layer_cake_power_norm(f, p), direct) <= 1e-10);
  }
}

TEST_CASE("dyadic ancestors, dilation and restriction") {
  const auto root = DyadicCube::root({0.0}, 8.0);
  const double x = 1.5;
  const auto chain = dyadic_ancestors(std::span(&x, 1), 3, root);
  REQUIRE(chain.size() == 4);
  const std::vector<std::pair<double, double>> expected{{1, 2}, {0, 2}, {0, 4}, {0, 8}};
  for (std::size_t i = 0; i < chain.size(); ++i) {
    CHECK(chain[i].box().lower[0] == expected[i].first);
    CHECK(chain[i].box().upper[0] == expected[i].second);
  }

  const Box dilated = dilate(chain[0], 3.0);
  CHECK(dilated.lower[0] == 0.0);
  CHECK(dilated.upper[0] == 3.0);

  const auto ind = indicator_unit(1.0 / 64, 0.0, 8.0, 512);
  const auto q = dyadic_cube_at(std::vector<double>{3.5}, 3, root);
  CHECK(q.box().lower[0] == 3.0);
  const auto cut = restrict_outside(ind, q, 4.0);
  for (std::size_t i = 0; i < cut.size(); ++i) {
    const double c = cut.center(i)[0];
    CHECK(cut[i] == ((c > 1.5 && c < 5.5) ? 0.0 : 1.0));
  }

  const double outside = 8.0;
  try {
    (void)dyadic_ancestors(std::span(&outside, 1), 2, root);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::out_of_domain);
  }
}

TEST_CASE("dyadic children partition their parent") {
  testing::Rng rng(13);
  for (int n = 1; n <= 3; ++n) {
    const auto root = DyadicCube::root(std::vector<double>(static_cast<std::size_t>(n), -1.0), 4.0);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(static_cast<std::size_t>(n));
      for (double& c : x) c = rng.uniform(-1.0, 3.0);
      const int level = static_cast<int>(rng.index(6));
      const auto q = dyadic_cube_at(x, level, root);
      CHECK(q.contains(x));
      CHECK(dilate(q, 1.0) == q.box());
      const auto kids = q.children();
      CHECK(kids.size() == (std::size_t{1} << n));
      int hits = 0;
      double measure = 0.0;
      for (const auto& k : kids) {
        hits += k.contains(x) ? 1 : 0;
        measure += k.measure();
        CHECK(k.parent() == q);
      }
      CHECK(hits == 1);
      CHECK(measure == doctest::Approx(q.measure()).epsilon(1e-15));
    }
  }
}

TEST_CASE("restriction never increases norms") {
  testing::Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_field(rng, 2);
    const auto root = auto_root(f);
    std::vector<double> x(2);
    for (std::size_t a = 0; a < 2; ++a) x[a] = rng.uniform(root.root_origin()[a], f.upper(static_cast<int>(a)));
    const auto q = dyadic_cube_at(x, 1 + static_cast<int>(rng.index(4)), root);
    const auto g = restrict_outside(f, q, rng.uniform(0.5, 5.0));
    for (double p : {1.0, 1.5, 2.0, 3.0, kInfinity}) CHECK(lq_norm(g, p) <= lq_norm(f, p));
  }
}

TEST_CASE("field file round trip") {
  testing::Rng rng(15);
  for (int n = 1; n <= 2; ++n) {
    const auto f = random_field(rng, n);
    std::stringstream buf;
    write_field(buf, f);
    const auto g = read_field(buf);
    CHECK(g.same_grid(f));
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(g[i] == f[i]);
  }
  std::stringstream header;
  write_field(header, Field({2, 3}, 0.25, {-1.0, 0.5}));
  std::string line;
  std::getline(header, line);
  CHECK(line == "czx-field v1");
  std::getline(header, line);
  CHECK(line == "n=2");
  std::getline(header, line);
  CHECK(line == "shape=2,3");
  std::getline(header, line);
  CHECK(line == "h=0.25");
  std::getline(header, line);
  CHECK(line == "origin=-1,0.5");

  std::stringstream bad("czx-field v1\nn=1\nshape=4\nh=1\norigin=0\n\n\x01\x02");
  CHECK_THROWS_AS(read_field(bad), Error);
  std::stringstream wrong("not a field\n");
  CHECK_THROWS_AS(read_field(wrong), Error);
}

TEST_CASE("csv export") {
  const Field f({2}, 0.5, {0.0}, {1.0, -2.5});
  std::ostringstream out;
  write_field_csv(out, f);
  CHECK(out.str() == "x1,value\n0.25,1\n0.75,-2.5\n");
}

TEST_CASE("non-finite values are rejected") {
  CHECK_THROWS_AS(Field({2}, 1.0, {0.0}, {1.0, std::nan("")}), Error);
}
