#include <doctest.h>

#include <cmath>
#include <numbers>

#include "czx/corpus.hpp"
#include "czx/error.hpp"
#include "czx/goodlambda.hpp"
#include "gen.hpp"

using namespace czx;

namespace {

KernelSpec spec_of(int n, double beta, double eps) {
  KernelSpec s;
  s.n = n;
  s.beta = beta;
  s.epsilon = eps;
  return s;
}

Field random_field(testing::Rng& rng, int n, std::size_t cells, double zero_fraction) {
  std::vector<std::size_t> shape(static_cast<std::size_t>(n), cells);
  Field f(shape, 1.0 / static_cast<double>(cells), std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (double& v : f.values()) v = rng.uniform() < zero_fraction ? 0.0 : rng.uniform(0.0, 3.0);
  return f;
}

// Every cube of side 1..2N cells containing the cell, zero outside the grid.
double brute_full_maximal(const Field& g, std::size_t cell) {
  const int n = g.dim();
  const auto c = g.unravel(cell);
  const auto N = static_cast<std::int64_t>(g.shape()[0]);
  double best = 0.0;
  for (std::int64_t w = 1; w <= 2 * N; ++w) {
    std::vector<std::int64_t> lo(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) lo[a] = static_cast<std::int64_t>(c[a]) - w + 1;
    while (true) {
      double sum = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const auto jdx = g.unravel(j);
        bool in = true;
        for (int a = 0; a < n; ++a) {
          const auto v = static_cast<std::int64_t>(jdx[a]);
          in = in && v >= lo[a] && v < lo[a] + w;
        }
        if (in) sum += g[j];
      }
      best = std::max(best, sum / std::pow(static_cast<double>(w), n));
      int a = n - 1;
      for (; a >= 0; --a) {
        if (++lo[a] <= static_cast<std::int64_t>(c[a])) break;
        lo[a] = static_cast<std::int64_t>(c[a]) - w + 1;
      }
      if (a < 0) break;
    }
  }
  return best;
}

std::vector<double> decades(double lo_exp, double hi_exp, int per_decade) {
  std::vector<double> out;
  for (double e = lo_exp; e <= hi_exp + 1e-12; e += 1.0 / per_decade) out.push_back(std::pow(10.0, e));
  return out;
}

}  // namespace

TEST_CASE("full grid-cube maximal agrees with enumeration") {
  testing::Rng rng(12);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(2));
    const Field g = random_field(rng, n, n == 1 ? 16 : 6, 0.6);
    const std::size_t cell = rng.index(g.size());
    CHECK(full_cube_maximal_at(g, g.center(cell)) == doctest::Approx(brute_full_maximal(g, cell)).epsilon(1e-12));
  }
  const Field zero({8}, 0.5, {0.0});
  CHECK(full_cube_maximal_at(zero, std::vector<double>{1.0}) == 0.0);
}

TEST_CASE("config constants") {
  for (int n : {1, 2, 3}) {
    for (double c : {0.0, 0.5, 3.0, 10.0}) {
      const auto cfg = GoodLambdaConfig::make(n, 3.0, c, 0.25);
      CHECK(cfg.N * cfg.N / 4 == doctest::Approx(std::max(2 * std::pow(5.0, n), (2 + c) * (2 + c))).epsilon(1e-14));
      CHECK(std::abs(cfg.mu * 2 * cfg.q * std::pow(cfg.N, cfg.q) - 1.0) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(GoodLambdaConfig::make(1, 3.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(GoodLambdaConfig::make(1, 3.0, 1.0, 1.5), Error);
  CHECK_THROWS_AS(GoodLambdaConfig::make(1, 1.0, 1.0, 0.5), Error);
}

TEST_CASE("separated instances on root [0,8)") {
  const auto sign = make_symbol("sign", 1);
  const double h = 1.0 / 32;
  const auto root = DyadicCube::root({0.0}, 8.0);
  const DyadicCube q(3, {3}, 8.0, {0.0});  // [3,4)
  const KernelSpec spec = spec_of(1, 0.3, 2 * h);
  const Field ind = Field::sample({256}, h, {0.0}, [](std::span<const double> x) {
    return x[0] >= 6.0 && x[0] < 7.0 ? 1.0 : 0.0;
  });

  SUBCASE("zero source needs no constant") {
    const auto inst = make_separated_instance(sign, spec, Field({256}, h, {0.0}), root, q, {3.5 + h / 2});
    CHECK(oscillation_requirement(inst) == 0.0);
    CHECK(lemma31_check(inst, GoodLambdaConfig::make(1, 3.0, 1.0, 1.0)).pass);
  }

  SUBCASE("indicator of [6,7): finite requirement, held-out pass") {
    const auto inst = make_separated_instance(sign, spec, ind, root, q, {2.5 + h / 2});
    const double req = oscillation_requirement(inst);
    MESSAGE("C requirement for the indicator instance: " << req);
    CHECK(std::isfinite(req));
    CHECK(req > 0.0);
    CHECK(inst.a > 0.0);
    CHECK(inst.b > 0.0);

    // Calibrate on other instances in the same geometry.
    std::vector<SeparatedInstance> cal;
    testing::Rng rng(8);
    for (int i = 0; i < 6; ++i) {
      const double lo = rng.uniform(5.6, 7.0);
      const double amp = rng.uniform(-2.0, 2.0);
      const Field f = Field::sample({256}, h, {0.0}, [&](std::span<const double> x) {
        return x[0] >= lo && x[0] < lo + 0.9 ? amp : 0.0;
      });
      cal.push_back(make_separated_instance(sign, spec, f, root, q, {3.0 + h / 2 + 0.25 * i}));
    }
    const double c = calibrate_C(cal);
    const auto v = lemma31_check(inst, GoodLambdaConfig::make(1, 3.0, c, 1.0));
    CHECK(v.pass);
    CHECK(v.max_ratio < 1.0);
    CHECK(v.inner_checks > 0);
    CHECK(v.outer_checks > 0);
  }

  SUBCASE("invalid instances") {
    const Field touching = Field::sample({256}, h, {0.0}, [](std::span<const double> x) {
      return x[0] >= 5.4 && x[0] < 6.0 ? 1.0 : 0.0;
    });
    try {
      make_separated_instance(sign, spec, touching, root, q, {3.5});
      FAIL("expected invalid_instance");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_instance);
    }
    CHECK_THROWS_AS(make_separated_instance(sign, spec, ind, root, q, {5.2}), Error);
    const DyadicCube edge(3, {0}, 8.0, {0.0});  // 3Q leaves the root
    CHECK_THROWS_AS(make_separated_instance(sign, spec, ind, root, edge, {0.5}), Error);
  }
}

TEST_CASE("calibrate_C preconditions") {
  CHECK_THROWS_AS(calibrate_C(std::vector<SeparatedInstance>{}), Error);
}

TEST_CASE("rescaled instance keeps its constant requirement") {
  const auto sign = make_symbol("sign", 1);
  const double beta = 0.05;
  const double h = 1.0 / 32;
  const auto bump = [](double x) {
    const double d = std::abs(x - 6.0);
    return d < 1.0 ? std::pow(std::cos(0.5 * std::numbers::pi * d), 2) : 0.0;
  };
  const auto root = DyadicCube::root({-60.0}, 128.0);
  const Field f = Field::sample({4096}, h, {-60.0}, [&](std::span<const double> x) { return bump(x[0]); });
  const Field f2 = Field::sample({8192}, h / 2, {-60.0}, [&](std::span<const double> x) { return bump(2 * x[0]); });
  const DyadicCube q(7, {62}, 128.0, {-60.0});   // [2,3)
  const DyadicCube q2(8, {122}, 128.0, {-60.0});  // [1,1.5)
  const auto a = make_separated_instance(sign, spec_of(1, beta, 2 * h), f, root, q, {3.5 + h / 2});
  const auto b = make_separated_instance(sign, spec_of(1, beta, h), f2, root, q2, {1.75 + h / 4});
  const double ra = oscillation_requirement(a);
  const double rb = oscillation_requirement(b);
  CHECK(rb / ra == doctest::Approx(1.0).epsilon(0.05));
  CHECK(b.b == doctest::Approx(a.b).epsilon(0.02));
}

TEST_CASE("random instances: calibrate, then verify held-out ones for every beta") {
  for (int n : {1, 2}) {
    const auto omega = make_symbol(n == 1 ? "sign" : "riesz-1", n);
    const std::vector<double> betas = n == 1 ? std::vector<double>{0.5, 0.3, 0.1, 0.01} : std::vector<double>{0.5};
    std::vector<SeparatedInstance> cal;
    for (double beta : betas) {
      const auto layout = separated_layout(n, beta);
      for (std::uint64_t i = 0; i < 3; ++i) {
        Rng rng(100, i);
        cal.push_back(random_separated_instance(omega, layout, rng));
      }
    }
    const auto cfg = GoodLambdaConfig::make(n, 3.0, calibrate_C(cal), 1.0);
    for (double beta : betas) {
      const auto layout = separated_layout(n, beta);
      for (std::uint64_t i = 0; i < 4; ++i) {
        Rng rng(200, i);
        const auto inst = random_separated_instance(omega, layout, rng, i == 3);
        const auto v = lemma31_check(inst, cfg);
        CHECK(v.pass);
        const Box four_q = dilate(inst.q, 4.0);
        std::vector<double> lower(static_cast<std::size_t>(n));
        for (std::size_t c = 0; c < inst.f.size(); ++c) {
          if (inst.f[c] == 0.0) continue;
          inst.f.center(c, lower);
          for (double& x : lower) x -= 0.5 * inst.f.spacing();
          CHECK_FALSE(four_q.meets_cell(lower, inst.f.spacing()));
        }
        CHECK(dilate(inst.q, 3.0).contains(inst.x0));
      }
    }
  }
}

TEST_CASE("Calderon-Zygmund stopping cubes") {
  const double h = 1.0 / 32;
  const Field ind = Field::sample({256}, h, {0.0}, [](std::span<const double> x) { return x[0] < 1.0 ? 1.0 : 0.0; });
  const auto root = DyadicCube::root({0.0}, 8.0);

  auto cubes = cz_stopping_cubes(ind, 0.3, root);
  REQUIRE(cubes.size() == 1);
  CHECK(cubes[0].lower()[0] == 0.0);
  CHECK(cubes[0].side() == 2.0);

  cubes = cz_stopping_cubes(ind, 0.6, root);
  REQUIRE(cubes.size() == 1);
  CHECK(cubes[0].side() == 1.0);

  CHECK(cz_stopping_cubes(Field({256}, h, {0.0}), 1.0, root).empty());
  try {
    cz_stopping_cubes(ind, 0.125, root);
    FAIL("expected root_selected");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::root_selected);
  }
}

TEST_CASE("property: stopping-cube sandwich, disjointness, measure") {
  testing::Rng rng(77);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + static_cast<int>(rng.index(2));
    const Field f = random_field(rng, n, n == 1 ? 64 : 16, 0.7);
    const auto root = DyadicCube::root(f.origin(), 1.0);
    const DyadicPyramid pyr(f, root);
    const double lambda = pyr.average_flat(0, 0) * rng.uniform(1.01, 20.0);
    const auto cubes = cz_stopping_cubes(f, lambda, root);
    double measure = 0.0;
    for (const auto& c : cubes) {
      const double avg = pyr.average(c);
      CHECK(avg > lambda);
      CHECK(avg <= std::exp2(n) * lambda * (1 + 1e-12));
      measure += c.measure();
    }
    CHECK(measure <= lq_norm(f, 1.0) / lambda * (1 + 1e-12));
    std::vector<int> owners(f.size(), 0);
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto x = f.center(i);
      for (const auto& c : cubes) owners[i] += c.contains(x) ? 1 : 0;
      CHECK(owners[i] <= 1);
      if (owners[i] == 0) CHECK(std::abs(f[i]) <= lambda);
    }
  }
}

TEST_CASE("global good-lambda inequality") {
  const auto sign = make_symbol("sign", 1);
  const auto layout = separated_layout(1, 0.3);
  const KernelSpec spec = spec_of(1, 0.3, layout_epsilon(layout));
  const auto lambdas = decades(-3.0, 3.0, 4);

  const auto zero = goodlambda_input(sign, spec, layout.zero, layout.root);
  const auto any_cfg = GoodLambdaConfig::make(1, 2.0, 1.0, 1.0);
  const auto zr = goodlambda_global_check(zero, any_cfg, lambdas);
  CHECK(zr.passed());
  for (const auto& row : zr.rows()) CHECK(std::get<double>(row.cells[1]) == 0.0);

  std::vector<GoodLambdaInput> corpus;
  for (std::uint64_t i = 0; i < 4; ++i) {
    Rng rng(300, i);
    corpus.push_back(goodlambda_input(sign, spec, random_layout_source(layout, rng), layout.root));
  }
  const double delta = calibrate_delta(corpus, 1, 2.0, 1.5, lambdas);
  const auto cfg = GoodLambdaConfig::make(1, 2.0, 1.5, delta);

  const Field gauss = Field::sample(layout.zero.shape(), layout.zero.spacing(), layout.zero.origin(),
                                    [](std::span<const double> x) {
                                      return x[0] >= 0.0 && x[0] < 8.0 ? std::exp(-0.5 * (x[0] - 4) * (x[0] - 4)) : 0.0;
                                    });
  const auto input = goodlambda_input(sign, spec, gauss, layout.root);
  const auto report = goodlambda_global_check(input, cfg, lambdas);
  CHECK(report.passed());
  CHECK(report.metric("worst_slack") <= 1.0);

  double gmax = 0.0;
  for (double v : input.g.mf.values()) gmax = std::max(gmax, v);
  const std::vector<double> huge{2 * gmax / (cfg.N * cfg.N)};
  const auto top = goodlambda_global_check(input, cfg, huge);
  CHECK(std::get<double>(top.rows()[0].cells[1]) == 0.0);
  CHECK(top.passed());

  // f / 2 moves the lambda = 4 row onto the lambda = 1 row.
  Field half = gauss;
  for (double& v : half.values()) v *= 0.5;
  const auto scaled = goodlambda_input(sign, spec, half, layout.root);
  const std::vector<double> four{4.0}, one{1.0};
  const auto r4 = goodlambda_global_check(input, cfg, four);
  const auto r1 = goodlambda_global_check(scaled, cfg, one);
  CHECK(std::get<double>(r4.rows()[0].cells[1]) == doctest::Approx(std::get<double>(r1.rows()[0].cells[1])).epsilon(1e-12));
  CHECK(std::get<double>(r4.rows()[0].cells[2]) == doctest::Approx(std::get<double>(r1.rows()[0].cells[2])).epsilon(1e-12));

  CHECK_THROWS_AS(goodlambda_global_check(input, cfg, std::vector<double>{0.0}), Error);
}

TEST_CASE("layer-cake closing") {
  const auto sign = make_symbol("sign", 1);
  const auto layout = separated_layout(1, 0.3);
  const KernelSpec spec = spec_of(1, 0.3, layout_epsilon(layout));
  const auto lambdas = decades(-3.0, 3.0, 4);
  std::vector<GoodLambdaInput> corpus;
  for (std::uint64_t i = 0; i < 6; ++i) {
    Rng rng(400, i);
    const Field f = make_source(SourceKind::indicator, layout.zero, layout.source_region, rng);
    corpus.push_back(goodlambda_input(sign, spec, f, layout.root));
  }
  const double delta = calibrate_delta(corpus, 1, 3.0, 1.5, lambdas);
  const auto cfg = GoodLambdaConfig::make(1, 3.0, 1.5, delta);
  for (const auto& in : corpus) {
    const auto r = layer_cake_close(in, 3.0, cfg);
    CHECK_FALSE(r.routed);
    CHECK(r.t1f_power <= r.lhs);
    CHECK(r.lhs <= r.tight_rhs);
    CHECK(r.tight_rhs <= r.rhs);
  }

  const auto zero = goodlambda_input(sign, spec, layout.zero, layout.root);
  const auto z = layer_cake_close(zero, 3.0, cfg);
  CHECK(z.lhs == 0.0);
  CHECK(z.rhs == 0.0);

  Field doubled = corpus[0].f;
  for (double& v : doubled.values()) v *= 2.0;
  const auto base = layer_cake_close(corpus[0], 3.0, cfg);
  const auto twice = layer_cake_close(goodlambda_input(sign, spec, doubled, layout.root), 3.0, cfg);
  CHECK(twice.lhs == doctest::Approx(8.0 * base.lhs).epsilon(1e-12));
  CHECK(twice.rhs == doctest::Approx(8.0 * base.rhs).epsilon(1e-12));

  const auto routed = layer_cake_close(corpus[0], 2.0, cfg);
  CHECK(routed.routed);
  CHECK(routed.lhs <= routed.rhs * (1 + 1e-12));
}

TEST_CASE("corpus generator is deterministic and respects its region") {
  Rng a(5, 2), b(5, 2), c(5, 3);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
    CHECK(x != c.next());
  }
  Rng u(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  for (auto kind : {SourceKind::gaussian, SourceKind::indicator, SourceKind::bumps, SourceKind::chirp, SourceKind::impulse}) {
    CHECK(parse_source_kind(to_string(kind)) == kind);
    const Field grid({64, 64}, 0.25, {-4.0, -4.0});
    const Box region{{0.0, 0.0}, {8.0, 8.0}};
    Rng r1(1, 1), r2(1, 1);
    const Field f = make_source(kind, grid, region, r1);
    const Field g = make_source(kind, grid, region, r2);
    for (std::size_t i = 0; i < f.size(); ++i) {
      CHECK(f[i] == g[i]);
      const auto x = f.center(i);
      if (x[0] < 0.0 || x[1] < 0.0) CHECK(f[i] == 0.0);
    }
  }
  CHECK_THROWS_AS(parse_source_kind("spiral"), Error);
  const auto layout = separated_layout(1, 0.01);
  CHECK(layout.root.side() >= 8.0 + 4.0 / 0.01);
  CHECK(layout.zero.shape()[0] <= 8192);
}
