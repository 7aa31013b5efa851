#include "czx/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "czx/error.hpp"

namespace czx {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::array<std::pair<SourceKind, std::string_view>, 5> kKinds{{
    {SourceKind::gaussian, "gaussian"},
    {SourceKind::indicator, "indicator"},
    {SourceKind::bumps, "bumps"},
    {SourceKind::chirp, "chirp"},
    {SourceKind::impulse, "impulse"},
}};

double random_sign(Rng& rng) { return rng.uniform() < 0.5 ? -1.0 : 1.0; }

std::vector<double> random_point(const Box& region, Rng& rng) {
  std::vector<double> p(region.lower.size());
  for (std::size_t a = 0; a < p.size(); ++a) p[a] = rng.uniform(region.lower[a], region.upper[a]);
  return p;
}

double dist2(std::span<const double> x, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) s += (x[a] - c[a]) * (x[a] - c[a]);
  return s;
}

bool inside_half_open(const Box& b, std::span<const double> x) {
  for (std::size_t a = 0; a < x.size(); ++a) {
    if (!(x[a] >= b.lower[a] && x[a] < b.upper[a])) return false;
  }
  return true;
}

// Indices of the cells whose centers lie in the open box.
std::vector<std::size_t> cells_in(const Field& grid, const Box& box) {
  std::vector<std::size_t> out;
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.center(i, x);
    if (box.contains(x)) out.push_back(i);
  }
  return out;
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) noexcept : key_(mix(seed ^ mix(stream + kGolden))) {}

std::uint64_t Rng::next() noexcept { return mix(key_ + kGolden * ++counter_); }

double Rng::uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

std::size_t Rng::index(std::size_t n) noexcept {
  return n == 0 ? 0 : static_cast<std::size_t>(next() % n);
}

Rng Rng::split(std::uint64_t stream) const noexcept {
  Rng r(0);
  r.key_ = mix(key_ ^ mix(stream + 1));
  return r;
}

std::string_view to_string(SourceKind k) noexcept {
  for (const auto& [kind, name] : kKinds) {
    if (kind == k) return name;
  }
  return "unknown";
}

SourceKind parse_source_kind(std::string_view name) {
  for (const auto& [kind, label] : kKinds) {
    if (label == name) return kind;
  }
  throw Error(Errc::invalid_input, "unknown source kind: " + std::string(name));
}

Field make_source(SourceKind kind, const Field& grid, const Box& region, Rng& rng) {
  const auto n = static_cast<std::size_t>(grid.dim());
  auto masked = [&](auto&& fn) {
    return Field::sample(grid.shape(), grid.spacing(), grid.origin(), [&](std::span<const double> x) {
      return inside_half_open(region, x) ? fn(x) : 0.0;
    });
  };
  switch (kind) {
    case SourceKind::gaussian: {
      const auto c = random_point(region, rng);
      const double sigma = rng.uniform(0.25, 1.5);
      const double amp = random_sign(rng) * rng.uniform(0.5, 2.0);
      return masked([&](std::span<const double> x) { return amp * std::exp(-dist2(x, c) / (2 * sigma * sigma)); });
    }
    case SourceKind::indicator: {
      Box b = region;
      for (std::size_t a = 0; a < n; ++a) {
        const double len = rng.uniform(0.5, 4.0);
        b.lower[a] = rng.uniform(region.lower[a], std::max(region.lower[a], region.upper[a] - len));
        b.upper[a] = b.lower[a] + len;
      }
      const double amp = random_sign(rng) * rng.uniform(0.5, 2.0);
      return masked([&](std::span<const double> x) { return inside_half_open(b, x) ? amp : 0.0; });
    }
    case SourceKind::bumps: {
      struct Bump {
        std::vector<double> c;
        double r;
        double amp;
      };
      std::vector<Bump> bumps;
      for (int j = 0; j < 8; ++j) {
        Bump bump{random_point(region, rng), rng.uniform(0.2, 1.0), 0.0};
        bump.amp = random_sign(rng) * rng.uniform(0.25, 1.5);
        bumps.push_back(std::move(bump));
      }
      return masked([&](std::span<const double> x) {
        double s = 0.0;
        for (const auto& bump : bumps) {
          const double d = std::sqrt(dist2(x, bump.c));
          if (d < bump.r) s += bump.amp * std::pow(std::cos(0.5 * std::numbers::pi * d / bump.r), 2);
        }
        return s;
      });
    }
    case SourceKind::chirp: {
      const auto c = random_point(region, rng);
      const double k0 = rng.uniform(0.2, 1.0);
      const double k1 = rng.uniform(0.05, 0.5);
      const double sigma = rng.uniform(1.0, 2.5);
      return masked([&](std::span<const double> x) {
        const double t = x[0] - c[0];
        return std::sin(2 * std::numbers::pi * (k0 * t + k1 * t * t)) * std::exp(-dist2(x, c) / (2 * sigma * sigma));
      });
    }
    case SourceKind::impulse: {
      Field f(grid.shape(), grid.spacing(), grid.origin());
      const auto cells = cells_in(grid, region);
      if (!cells.empty()) f[cells[rng.index(cells.size())]] = 1.0 / grid.cell_volume();
      return f;
    }
  }
  throw Error(Errc::invalid_input, "unknown source kind");
}

SeparatedLayout separated_layout(int n, double beta, double preferred_h, std::size_t max_cells_per_axis) {
  if (n < 1 || n > 3) throw Error(Errc::unsupported_dimension, "layouts exist for n = 1, 2, 3");
  if (!(beta > 0.0 && beta < 1.0)) throw Error(Errc::invalid_input, "beta must lie in (0, 1)");
  if (preferred_h <= 0.0) preferred_h = n == 1 ? 1.0 / 32 : (n == 2 ? 1.0 / 8 : 1.0 / 4);
  if (max_cells_per_axis == 0) max_cells_per_axis = n == 1 ? 8192 : (n == 2 ? 512 : 64);

  const double needed = 8.0 + 2.0 * (2.0 / beta + 1.0);
  double side = 16.0;
  while (side < needed) side *= 2.0;
  double h = preferred_h;
  while (side / h > static_cast<double>(max_cells_per_axis)) h *= 2.0;
  if (h > 0.5) throw Error(Errc::resolution, "layout would need cells wider than 1/2");

  const auto nn = static_cast<std::size_t>(n);
  std::vector<double> origin(nn, 4.0 - side / 2.0);
  const auto cells = static_cast<std::size_t>(std::llround(side / h));
  SeparatedLayout layout;
  layout.root = DyadicCube::root(origin, side);
  layout.zero = Field(std::vector<std::size_t>(nn, cells), h, origin);
  layout.source_region = Box{std::vector<double>(nn, 0.0), std::vector<double>(nn, 8.0)};
  layout.beta = beta;
  return layout;
}

double layout_epsilon(const SeparatedLayout& layout) { return 2.0 * layout.zero.spacing(); }

SeparatedInstance random_separated_instance(const SphereSymbol& omega, const SeparatedLayout& layout,
                                            Rng& rng, bool adversarial) {
  const Field& grid = layout.zero;
  const int n = grid.dim();
  const auto nn = static_cast<std::size_t>(n);
  KernelSpec spec;
  spec.n = n;
  spec.beta = layout.beta;
  spec.epsilon = layout_epsilon(layout);

  constexpr std::array<double, 3> kSides{0.5, 1.0, 2.0};
  double s = kSides[rng.index(kSides.size())];
  s = std::max(s, grid.spacing());
  const int level = static_cast<int>(std::lround(std::log2(layout.root.side() / s)));
  std::vector<std::int64_t> index(nn);
  for (std::size_t a = 0; a < nn; ++a) {
    const auto first = static_cast<std::int64_t>(std::llround((0.0 - layout.root.root_origin()[a]) / s));
    const auto count = static_cast<std::size_t>(std::llround(8.0 / s));
    index[a] = first + static_cast<std::int64_t>(rng.index(count));
  }
  const DyadicCube q(level, index, layout.root.side(), layout.root.root_origin());

  const Box three_q = dilate(q, 3.0);
  const auto candidates = cells_in(grid, three_q);
  const std::vector<double> x0 = grid.center(candidates[rng.index(candidates.size())]);

  Field f(grid.shape(), grid.spacing(), grid.origin());
  if (adversarial) {
    // One impulse on a cell sharing a face with 4Q.
    const Box four_q = dilate(q, 4.0);
    const auto axis = rng.index(nn);
    std::vector<double> p = q.lower();
    for (double& v : p) v += 0.5 * grid.spacing();
    p[axis] = rng.uniform() < 0.5 ? four_q.upper[axis] + 0.5 * grid.spacing()
                                  : four_q.lower[axis] - 0.5 * grid.spacing();
    std::vector<std::size_t> cell(nn);
    for (std::size_t a = 0; a < nn; ++a) {
      cell[a] = static_cast<std::size_t>(std::floor((p[a] - grid.origin()[a]) / grid.spacing()));
    }
    f[grid.ravel(cell)] = 1.0 / grid.cell_volume();
  } else {
    const auto kind = static_cast<SourceKind>(rng.index(kKinds.size()));
    f = restrict_outside(make_source(kind, grid, layout.source_region, rng), q, 4.0);
  }
  return make_separated_instance(omega, spec, f, layout.root, q, x0);
}

Field random_layout_source(const SeparatedLayout& layout, Rng& rng) {
  const auto kind = static_cast<SourceKind>(rng.index(kKinds.size()));
  return make_source(kind, layout.zero, layout.source_region, rng);
}

Field sweep_member(int n, std::uint64_t seed, std::uint64_t index, double h, double side) {
  if (n < 1 || n > 3) throw Error(Errc::unsupported_dimension, "corpus exists for n = 1, 2, 3");
  if (h <= 0.0) h = n == 1 ? 1.0 / 32 : 1.0 / 8;
  constexpr std::array<SourceKind, 4> kCycle{SourceKind::gaussian, SourceKind::indicator, SourceKind::bumps,
                                             SourceKind::chirp};
  const auto nn = static_cast<std::size_t>(n);
  const auto cells = static_cast<std::size_t>(std::llround(side / h));
  const Field grid(std::vector<std::size_t>(nn, cells), h, std::vector<double>(nn, 0.0));
  const Box region{std::vector<double>(nn, 0.0), std::vector<double>(nn, side)};
  Rng rng(seed, index);
  return make_source(kCycle[index % kCycle.size()], grid, region, rng);
}

std::vector<Field> sweep_corpus(int n, std::uint64_t seed, std::uint64_t first, std::size_t count, double h,
                                double side) {
  std::vector<Field> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sweep_member(n, seed, first + i, h, side));
  return out;
}

}  // namespace czx
