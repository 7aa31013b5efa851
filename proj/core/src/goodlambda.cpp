#include "czx/goodlambda.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "czx/error.hpp"
#include "czx/operator.hpp"

namespace czx {

namespace {

constexpr double kRelativeSlack = 1e-9;

std::size_t cell_of(const Field& f, std::span<const double> x) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(f.dim()));
  for (int a = 0; a < f.dim(); ++a) {
    const auto ax = static_cast<std::size_t>(a);
    const double t = std::floor((x[ax] - f.origin()[ax]) / f.spacing());
    if (!(t >= 0.0 && t < static_cast<double>(f.shape()[ax]))) {
      throw Error(Errc::out_of_domain, "point lies outside the grid");
    }
    idx[ax] = static_cast<std::size_t>(t);
  }
  return f.ravel(idx);
}

// Inclusive prefix sums with a zero border: P has shape N_a + 1.
struct PrefixSums {
  std::vector<std::size_t> dims;
  std::vector<long double> data;

  explicit PrefixSums(const Field& g) {
    const auto n = static_cast<std::size_t>(g.dim());
    dims.resize(n);
    for (std::size_t a = 0; a < n; ++a) dims[a] = g.shape()[a] + 1;
    std::size_t total = 1;
    for (auto d : dims) total *= d;
    data.assign(total, 0.0L);
    std::vector<std::size_t> idx(n, 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto cell = g.unravel(i);
      std::size_t flat = 0;
      for (std::size_t a = 0; a < n; ++a) flat = flat * dims[a] + cell[a] + 1;
      data[flat] = g[i];
    }
    std::size_t stride = 1;
    for (std::size_t a = n; a-- > 0;) {
      for (std::size_t i = 0; i < total; ++i) {
        if ((i / stride) % dims[a] != 0) data[i] += data[i - stride];
      }
      stride *= dims[a];
    }
  }

  // Sum over cells [lo, hi) per axis (already clamped to the grid).
  long double box_sum(std::span<const std::size_t> lo, std::span<const std::size_t> hi) const {
    const std::size_t n = dims.size();
    long double s = 0.0L;
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::size_t flat = 0;
      int sign = 1;
      for (std::size_t a = 0; a < n; ++a) {
        const bool low = (mask >> a) & 1U;
        flat = flat * dims[a] + (low ? lo[a] : hi[a]);
        if (low) sign = -sign;
      }
      s += sign * data[flat];
    }
    return s;
  }
};

void require_root_grid(const Field& f, const DyadicCube& root) {
  if (root.level() != 0 || root.dim() != f.dim()) {
    throw Error(Errc::invalid_input, "root must be a level-0 cube of the field's dimension");
  }
  const double cells = root.side() / f.spacing();
  for (int a = 0; a < f.dim(); ++a) {
    const auto ax = static_cast<std::size_t>(a);
    if (std::abs(root.root_origin()[ax] - f.origin()[ax]) > 1e-9 * f.spacing() ||
        std::abs(cells - static_cast<double>(f.shape()[ax])) > 1e-9) {
      throw Error(Errc::invalid_input, "field must live on the root grid");
    }
  }
}

void require_kernel_room(const Field& f, const DyadicCube& root, double beta) {
  const Support s = support_of(f);
  if (s.empty) return;
  const double reach = 2.0 / beta;
  const double tol = 1e-9 * root.side();
  for (int a = 0; a < f.dim(); ++a) {
    const auto ax = static_cast<std::size_t>(a);
    const double lo = f.origin()[ax] + static_cast<double>(s.first[ax]) * f.spacing();
    const double hi = f.origin()[ax] + static_cast<double>(s.last[ax] + 1) * f.spacing();
    if (lo - reach < root.root_origin()[ax] - tol || hi + reach > root.root_origin()[ax] + root.side() + tol) {
      throw Error(Errc::invalid_instance, "root grid does not contain supp f + B(2/beta)");
    }
  }
}

bool box_inside(const Box& inner, const Box& outer, double tol) {
  for (std::size_t a = 0; a < inner.lower.size(); ++a) {
    if (inner.lower[a] < outer.lower[a] - tol || inner.upper[a] > outer.upper[a] + tol) return false;
  }
  return true;
}

Field squared(const Field& f) {
  Field g = f;
  for (double& v : g.values()) v *= v;
  return g;
}

double ratio(double value, double bound) {
  if (value <= 0.0) return 0.0;
  if (bound <= 0.0) return std::numeric_limits<double>::infinity();
  return value / bound;
}

}  // namespace

double full_cube_maximal_at(const Field& g, std::span<const double> x) {
  const std::size_t c_flat = cell_of(g, x);
  const Support s = support_of(g);
  if (s.empty) return 0.0;
  const auto n = static_cast<std::size_t>(g.dim());
  const auto c = g.unravel(c_flat);

  // Cubes wider than the box spanned by x and supp g cannot beat it.
  std::size_t s_max = 1;
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t lo = std::min(s.first[a], c[a]);
    const std::size_t hi = std::max(s.last[a], c[a]);
    s_max = std::max(s_max, hi - lo + 1);
  }

  const PrefixSums prefix(g);
  long double best = 0.0L;
  std::vector<std::int64_t> start(n);
  std::vector<std::size_t> lo(n), hi(n);
  for (std::size_t side = 1; side <= s_max; ++side) {
    const auto w = static_cast<std::int64_t>(side);
    // Enumerate lower corners c - side + 1 .. c per axis.
    for (std::size_t a = 0; a < n; ++a) start[a] = static_cast<std::int64_t>(c[a]) - w + 1;
    long double best_sum = 0.0L;
    while (true) {
      for (std::size_t a = 0; a < n; ++a) {
        const auto N = static_cast<std::int64_t>(g.shape()[a]);
        lo[a] = static_cast<std::size_t>(std::clamp<std::int64_t>(start[a], 0, N));
        hi[a] = static_cast<std::size_t>(std::clamp<std::int64_t>(start[a] + w, 0, N));
      }
      best_sum = std::max(best_sum, prefix.box_sum(lo, hi));
      std::size_t a = n;
      while (a-- > 0) {
        if (++start[a] <= static_cast<std::int64_t>(c[a])) break;
        start[a] = static_cast<std::int64_t>(c[a]) - w + 1;
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
    best = std::max(best, best_sum / std::pow(static_cast<long double>(side), static_cast<long double>(n)));
  }
  return static_cast<double>(best);
}

SeparatedInstance make_separated_instance(const SphereSymbol& omega, const KernelSpec& spec,
                                          const Field& f, const DyadicCube& root,
                                          const DyadicCube& q, std::vector<double> x0) {
  require_root_grid(f, root);
  if (q.root_side() != root.side() || q.root_origin() != root.root_origin() || q.level() < 1) {
    throw Error(Errc::invalid_instance, "Q must be a proper dyadic subcube of the root");
  }
  if (static_cast<int>(x0.size()) != f.dim()) throw Error(Errc::invalid_instance, "x0 has the wrong dimension");
  if (!dilate(q, 3.0).contains(x0)) throw Error(Errc::invalid_instance, "x0 must lie in 3Q");

  const Box four_q = dilate(q, 4.0);
  std::vector<double> lower(static_cast<std::size_t>(f.dim()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == 0.0) continue;
    f.center(i, lower);
    for (double& v : lower) v -= 0.5 * f.spacing();
    if (four_q.meets_cell(lower, f.spacing())) {
      throw Error(Errc::invalid_instance, "f does not vanish on 4Q");
    }
  }
  if (!box_inside(dilate(q, 3.0), root.box(), 1e-9 * q.side())) {
    throw Error(Errc::invalid_instance, "3Q must lie in the root");
  }

  SeparatedInstance inst{root, q, f, apply_t1(omega, spec, f).values, std::move(x0), 0.0, 0.0, spec.beta};
  inst.a = std::sqrt(full_cube_maximal_at(squared(inst.t1f), inst.x0));
  inst.b = std::sqrt(full_cube_maximal_at(squared(inst.f), inst.x0));
  return inst;
}

double oscillation_requirement(const SeparatedInstance& inst) {
  const Field& t = inst.t1f;
  const double at_x0 = t[cell_of(t, inst.x0)];
  const Box three_q = dilate(inst.q, 3.0);
  std::vector<double> x(static_cast<std::size_t>(t.dim()));
  double osc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t.center(i, x);
    if (three_q.contains(x)) osc = std::max(osc, std::abs(t[i] - at_x0));
  }
  if (osc == 0.0) return 0.0;
  if (inst.b == 0.0) throw Error(Errc::degenerate_instance, "b = 0 but T1 f oscillates on 3Q");
  return osc / inst.b;
}

double calibrate_C(std::span<const SeparatedInstance> corpus) {
  if (corpus.empty()) throw Error(Errc::invalid_input, "calibration corpus is empty");
  double c = 0.0;
  for (const auto& inst : corpus) c = std::max(c, oscillation_requirement(inst));
  return 1.25 * c;
}

GoodLambdaConfig GoodLambdaConfig::make(int n, double q, double C, double delta) {
  if (!(C >= 0.0) || !std::isfinite(C)) throw Error(Errc::invalid_input, "C must be finite and nonnegative");
  if (!(delta > 0.0 && delta <= 1.0)) throw Error(Errc::invalid_input, "delta must lie in (0, 1]");
  if (!(q > 1.0) || !std::isfinite(q)) throw Error(Errc::invalid_exponent, "q must lie in (1, inf)");
  GoodLambdaConfig cfg;
  cfg.n = n;
  cfg.q = q;
  cfg.C_cal = C;
  cfg.delta = delta;
  const double quarter_n2 = std::max(2.0 * std::pow(5.0, n), (2.0 + C) * (2.0 + C));
  cfg.N = 2.0 * std::sqrt(quarter_n2);
  cfg.mu = 1.0 / (2.0 * q * std::pow(cfg.N, q));
  return cfg;
}

Lemma31Verdict lemma31_check(const SeparatedInstance& inst, const GoodLambdaConfig& cfg) {
  const Field g = squared(inst.t1f);
  const DyadicPyramid pyramid(g, inst.root);
  const int n = g.dim();
  const double inner_bound = std::pow(inst.a + cfg.C_cal * inst.b, 2);
  const double outer_bound = std::pow(5.0, n) * inst.a * inst.a;
  const Box three_q = dilate(inst.q, 3.0);
  const double tol = 1e-9 * inst.q.side();

  Lemma31Verdict v;
  auto record = [&](double avg, bool inner) {
    const double bound = inner ? inner_bound : outer_bound;
    const double r = ratio(avg, bound);
    if (avg > bound * (1.0 + kRelativeSlack)) v.pass = false;
    v.max_ratio = std::max(v.max_ratio, r);
    if (inner) {
      ++v.inner_checks;
      v.inner_max_ratio = std::max(v.inner_max_ratio, r);
    } else {
      ++v.outer_checks;
      v.outer_max_ratio = std::max(v.outer_max_ratio, r);
    }
  };

  // Dyadic cubes containing a point of Q: the subcubes of Q, then its ancestors.
  const auto qn = static_cast<std::size_t>(n);
  for (int level = inst.q.level(); level <= pyramid.depth(); ++level) {
    const std::int64_t per = std::int64_t{1} << (level - inst.q.level());
    std::vector<std::int64_t> offset(qn, 0), index(qn);
    while (true) {
      for (std::size_t a = 0; a < qn; ++a) index[a] = inst.q.index()[a] * per + offset[a];
      record(pyramid.average(level, index), true);
      std::size_t a = qn;
      while (a-- > 0) {
        if (++offset[a] < per) break;
        offset[a] = 0;
      }
      if (a == static_cast<std::size_t>(-1)) break;
    }
  }
  for (DyadicCube up = inst.q.parent();; up = up.parent()) {
    record(pyramid.average(up), box_inside(up.box(), three_q, tol));
    if (up.level() == 0) break;
  }
  // Ancestors of the root: A_k, side 2^k times the root side.
  Box a_k = inst.root.box();
  for (int k = 1; k <= 64; ++k) {
    for (std::size_t a = 0; a < qn; ++a) a_k.upper[a] = a_k.lower[a] + (a_k.upper[a] - a_k.lower[a]) * 2.0;
    const double avg = pyramid.mass() / std::pow(a_k.side(), n);
    record(avg, box_inside(a_k, three_q, tol));
  }
  return v;
}

std::vector<DyadicCube> cz_stopping_cubes(const Field& f, double lambda, const DyadicCube& root) {
  const DyadicPyramid pyramid(f, root);
  if (!(lambda > pyramid.average_flat(0, 0))) {
    throw Error(Errc::root_selected, "lambda must exceed the average of |f| over the root");
  }
  std::vector<DyadicCube> selected;
  std::vector<DyadicCube> stack{root};
  while (!stack.empty()) {
    const DyadicCube cube = stack.back();
    stack.pop_back();
    if (cube.level() >= pyramid.depth()) continue;
    auto children = cube.children();
    for (auto it = children.rbegin(); it != children.rend(); ++it) {
      if (pyramid.average(*it) > lambda) {
        selected.push_back(*it);
      } else {
        stack.push_back(*it);
      }
    }
  }
  return selected;
}

GoodLambdaInput goodlambda_input(const SphereSymbol& omega, const KernelSpec& spec,
                                 const Field& f, const DyadicCube& root) {
  require_root_grid(f, root);
  require_kernel_room(f, root, spec.beta);
  Field t1f = apply_t1(omega, spec, f).values;
  MaximalResult g = dyadic_maximal(squared(t1f), root);
  MaximalResult h = dyadic_maximal(squared(f), root);
  return GoodLambdaInput{omega, spec, f, std::move(t1f), std::move(g), std::move(h)};
}

SweepReport goodlambda_global_check(const GoodLambdaInput& input, const GoodLambdaConfig& cfg,
                                    std::span<const double> lambdas) {
  SweepReport report("goodlambda_global", {"lambda", "lhs", "rhs", "ratio"});
  const double n2 = cfg.N * cfg.N;
  const double d2 = cfg.delta * cfg.delta;
  double worst = 0.0;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw Error(Errc::invalid_input, "lambda must be positive");
    const double lhs = input.g.measure_above(lambda * n2);
    const double rhs = 2.0 * cfg.mu * (input.g.measure_above(lambda) + input.h.measure_above(lambda * d2));
    const double r = ratio(lhs, rhs);
    worst = std::max(worst, r);
    const bool ok = lhs <= rhs * (1.0 + 1e-12);
    report.add_row({lambda, lhs, rhs, r}, ok ? Verdict::pass : Verdict::fail);
  }
  report.set_metric("worst_slack", worst);
  return report;
}

double calibrate_delta(std::span<const GoodLambdaInput> corpus, int n, double q, double C,
                       std::span<const double> lambdas) {
  double delta = 1.0;
  for (int halvings = 0; halvings <= 200; ++halvings) {
    const auto cfg = GoodLambdaConfig::make(n, q, C, delta);
    const bool ok = std::all_of(corpus.begin(), corpus.end(), [&](const GoodLambdaInput& in) {
      return goodlambda_global_check(in, cfg, lambdas).passed();
    });
    if (ok) return delta;
    delta *= 0.5;
  }
  throw Error(Errc::degenerate_instance, "no delta satisfies the good-lambda inequality on the corpus");
}

CloseResult layer_cake_close(const GoodLambdaInput& input, double q, const GoodLambdaConfig& cfg) {
  if (!(q > 1.0) || !std::isfinite(q)) throw Error(Errc::invalid_exponent, "q must lie in (1, inf)");
  CloseResult out;
  const double f_power = std::pow(lq_norm(input.f, q), q);
  out.t1f_power = std::pow(lq_norm(input.t1f, q), q);
  if (q <= 2.0) {
    // L^2 route on the periodic box: Parseval with the sampled multiplier.
    out.routed = true;
    PeriodicOptions opts;
    opts.part = KernelPart::near;
    opts.refine = 1;
    const Field samples = periodic_kernel_samples(input.omega, input.spec, input.f, opts);
    double sup = 0.0;
    for (const auto& z : dft(samples)) sup = std::max(sup, std::abs(z));
    sup *= samples.cell_volume();
    const double t2 = lq_norm(apply_periodic_fft(input.omega, input.spec, input.f, opts).values, 2.0);
    const double f2 = lq_norm(input.f, 2.0);
    out.lhs = t2 * t2;
    out.rhs = sup * sup * f2 * f2;
    out.tight_rhs = out.rhs;
    return out;
  }
  const double p = q / 2.0;
  const double p_conj = p / (p - 1.0);
  const double scale = std::pow(cfg.delta, -q);
  out.lhs = input.g.power_integral(p);
  out.rhs = scale * std::pow(p_conj, p) * f_power;
  out.tight_rhs = scale / (q - 1.0) * input.h.power_integral(p);
  return out;
}

}  // namespace czx
