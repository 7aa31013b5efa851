#include "czx/operator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>

#include "czx/error.hpp"
#include "czx/numeric.hpp"
#include "fft.hpp"

namespace czx {

namespace {

std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::size_t> strides_of(std::span<const std::size_t> dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t a = dims.size(); a-- > 1;) s[a - 1] = s[a] * dims[a];
  return s;
}

// Advances a row-major multi-index; returns false after the last entry.
bool next_index(std::vector<std::size_t>& idx, std::span<const std::size_t> dims) {
  for (std::size_t a = dims.size(); a-- > 0;) {
    if (++idx[a] < dims[a]) return true;
    idx[a] = 0;
  }
  return false;
}

double kernel_value(const SphereSymbol& omega, const KernelSpec& spec, KernelPart part,
                    std::span<const double> y) {
  switch (part) {
    case KernelPart::full: return eval_kernel(omega, spec, y);
    case KernelPart::near: return eval_k1(omega, spec, y);
    case KernelPart::far: return eval_k2(omega, spec, y);
  }
  return 0.0;
}

// Distance from the origin to the nearest and farthest points of the cell
// centered at y with side h.
std::pair<double, double> cell_radii(std::span<const double> y, double h) {
  double lo = 0.0;
  double hi = 0.0;
  for (double c : y) {
    const double a = std::abs(c);
    const double near = std::max(0.0, a - 0.5 * h);
    const double far = a + 0.5 * h;
    lo += near * near;
    hi += far * far;
  }
  return {std::sqrt(lo), std::sqrt(hi)};
}

void check_plan(const KernelSpec& spec, const Field& f, KernelPart part, double radius) {
  spec.validate();
  if (f.dim() != spec.n) throw Error(Errc::invalid_input, "field dimension does not match kernel dimension");
  if (spec.epsilon < 2.0 * f.spacing() * (1.0 - 1e-12)) {
    throw Error(Errc::resolution, "epsilon must be at least two grid cells");
  }
  if (part != KernelPart::far && radius < 2.0 / spec.beta) {
    throw Error(Errc::truncation, "outer radius must cover the cutoff support 2/beta");
  }
}

double l1_norm(const Field& f) {
  std::vector<double> a(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) a[i] = std::abs(f[i]);
  return pairwise_sum(a) * f.cell_volume();
}

double tail_bound_for(const SphereSymbol& omega, const KernelSpec& spec, KernelPart part,
                      double radius, double max_distance, double f_l1) {
  if (part == KernelPart::near || !(max_distance > radius)) return 0.0;
  return omega.declared_bound * f_l1 * std::pow(radius, spec.beta - spec.n);
}

// out[i] = sum_k W[i - k - lower] f[k]: exact long double accumulation over
// the nonzero source cells.
std::vector<double> sum_direct(const Stencil& w, const Field& f, std::span<const std::size_t> eval_shape) {
  const auto sstride = strides_of(w.extent);
  std::vector<std::ptrdiff_t> offsets;
  std::vector<double> values;
  {
    std::vector<std::size_t> k(f.shape().size(), 0);
    std::size_t flat = 0;
    do {
      if (f[flat] != 0.0) {
        std::ptrdiff_t off = 0;
        for (std::size_t a = 0; a < k.size(); ++a) off += static_cast<std::ptrdiff_t>(k[a] * sstride[a]);
        offsets.push_back(off);
        values.push_back(f[flat]);
      }
      ++flat;
    } while (next_index(k, f.shape()));
  }
  std::vector<double> out(product(eval_shape), 0.0);
  if (offsets.empty()) return out;
  std::vector<std::size_t> i(eval_shape.size(), 0);
  std::size_t flat = 0;
  do {
    std::ptrdiff_t base = 0;
    for (std::size_t a = 0; a < i.size(); ++a) {
      base += (static_cast<std::ptrdiff_t>(i[a]) - w.lower[a]) * static_cast<std::ptrdiff_t>(sstride[a]);
    }
    long double acc = 0.0L;
    for (std::size_t k = 0; k < offsets.size(); ++k) {
      acc += static_cast<long double>(w.weights[static_cast<std::size_t>(base - offsets[k])]) * values[k];
    }
    out[flat++] = static_cast<double>(acc);
  } while (next_index(i, eval_shape));
  return out;
}

// Same sum through a circular convolution whose period equals the stencil
// extent, which is long enough that no wrapped term lands on an output.
std::vector<double> sum_fft(const Stencil& w, const Field& f, std::span<const std::size_t> eval_shape) {
  const auto& dims = w.extent;
  const auto fs = f.shape();
  std::vector<double> padded(product(dims), 0.0);
  const auto pstride = strides_of(dims);
  {
    std::vector<std::size_t> k(fs.size(), 0);
    std::size_t flat = 0;
    do {
      std::size_t p = 0;
      for (std::size_t a = 0; a < k.size(); ++a) p += k[a] * pstride[a];
      padded[p] = f[flat++];
    } while (next_index(k, fs));
  }
  const auto conv = detail::circular_convolve(w.weights, padded, dims);
  std::vector<double> out(product(eval_shape), 0.0);
  std::vector<std::size_t> i(eval_shape.size(), 0);
  std::size_t flat = 0;
  do {
    std::size_t p = 0;
    for (std::size_t a = 0; a < i.size(); ++a) p += (i[a] + fs[a] - 1) * pstride[a];
    out[flat++] = conv[p];
  } while (next_index(i, eval_shape));
  return out;
}

std::size_t nonzero_count(const Field& f) {
  return static_cast<std::size_t>(std::count_if(f.values().begin(), f.values().end(), [](double v) { return v != 0.0; }));
}

}  // namespace

Stencil build_stencil(const SphereSymbol& omega, const KernelSpec& spec, double h,
                      std::span<const double> displacement, std::vector<std::int64_t> lower,
                      std::vector<std::size_t> extent, const StencilOptions& options) {
  const auto n = static_cast<std::size_t>(spec.n);
  if (displacement.size() != n || lower.size() != n || extent.size() != n) {
    throw Error(Errc::invalid_input, "stencil dimension mismatch");
  }
  if (options.refine < 1) throw Error(Errc::invalid_input, "refinement factor must be >= 1");
  Stencil w{std::move(lower), std::move(extent), {}};
  w.weights.assign(product(w.extent), 0.0);

  const double eps = spec.epsilon;
  const double radius = options.outer_radius;
  const double near_edge = 1.0 / spec.beta;
  const double far_edge = 2.0 / spec.beta;
  const double cell = std::pow(h, spec.n);
  const int r = options.refine;
  const double sub = h / r;
  const double sub_volume = std::pow(sub, spec.n);
  const std::size_t sub_count = static_cast<std::size_t>(std::pow(r, spec.n));

  std::vector<double> y(n);
  std::vector<double> z(n);
  std::vector<std::size_t> m(n, 0);
  std::size_t flat = 0;
  do {
    for (std::size_t a = 0; a < n; ++a) {
      y[a] = displacement[a] + static_cast<double>(w.lower[a] + static_cast<std::int64_t>(m[a])) * h;
    }
    const auto [rmin, rmax] = cell_radii(y, h);
    double weight = 0.0;
    const bool empty = rmax < eps || rmin > radius || (options.part == KernelPart::near && rmin >= far_edge) ||
                       (options.part == KernelPart::far && rmax <= near_edge);
    if (!empty) {
      if (rmin >= eps && rmax <= radius) {
        weight = cell * kernel_value(omega, spec, options.part, y);
      } else {
        long double acc = 0.0L;
        for (std::size_t s = 0; s < sub_count; ++s) {
          std::size_t rest = s;
          for (std::size_t a = n; a-- > 0;) {
            const auto q = static_cast<double>(rest % static_cast<std::size_t>(r));
            rest /= static_cast<std::size_t>(r);
            z[a] = y[a] - 0.5 * h + (q + 0.5) * sub;
          }
          const double rz = norm2(z);
          if (rz >= eps && rz <= radius) acc += kernel_value(omega, spec, options.part, z);
        }
        weight = static_cast<double>(acc) * sub_volume;
      }
    }
    w.weights[flat++] = weight;
  } while (next_index(m, w.extent));
  return w;
}

Applied apply_part(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                   KernelPart part, const QuadraturePlan& plan) {
  check_plan(spec, f, part, plan.outer_radius);
  if (!omega.supports(spec.n)) throw Error(Errc::unsupported_dimension, "symbol " + omega.name + " not defined in this dimension");
  const EvalGrid eval = plan.eval.value_or(EvalGrid{f.shape(), f.origin()});
  if (eval.shape.size() != f.shape().size() || eval.origin.size() != f.shape().size()) {
    throw Error(Errc::invalid_input, "evaluation grid dimension mismatch");
  }
  const auto n = static_cast<std::size_t>(spec.n);
  const double h = f.spacing();
  std::vector<double> displacement(n);
  std::vector<std::int64_t> lower(n);
  std::vector<std::size_t> extent(n);
  double max_distance_sq = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    displacement[a] = eval.origin[a] - f.origin()[a];
    lower[a] = -static_cast<std::int64_t>(f.shape()[a]) + 1;
    extent[a] = eval.shape[a] + f.shape()[a] - 1;
    const double first = std::abs(displacement[a] + static_cast<double>(lower[a]) * h);
    const double last = std::abs(displacement[a] + static_cast<double>(lower[a] + static_cast<std::int64_t>(extent[a]) - 1) * h);
    const double far = std::max(first, last);
    max_distance_sq += far * far;
  }

  Applied result;
  result.outer_radius = plan.outer_radius;
  const auto w = build_stencil(omega, spec, h, displacement, std::move(lower), std::move(extent),
                               StencilOptions{part, plan.outer_radius, plan.refinement_factor});
  const double pairs = static_cast<double>(product(eval.shape)) * static_cast<double>(nonzero_count(f));
  const bool use_fft = plan.summation == Summation::fft ||
                       (plan.summation == Summation::automatic && pairs > plan.direct_pair_limit);
  auto values = use_fft ? sum_fft(w, f, eval.shape) : sum_direct(w, f, eval.shape);
  result.values = Field(eval.shape, h, eval.origin, std::move(values));
  result.tail_bound = tail_bound_for(omega, spec, part, plan.outer_radius, std::sqrt(max_distance_sq), l1_norm(f));
  return result;
}

Applied apply_direct(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                     const QuadraturePlan& plan) {
  return apply_part(omega, spec, f, KernelPart::full, plan);
}

Applied apply_t1(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                 const QuadraturePlan& plan) {
  return apply_part(omega, spec, f, KernelPart::near, plan);
}

Applied apply_t2(const SphereSymbol& omega, const KernelSpec& spec, const Field& f,
                 const QuadraturePlan& plan) {
  // B1 R^{beta - n} <= 1e-8 fixes the smallest admissible radius.
  QuadraturePlan widened = plan;
  const double needed = std::pow(omega.declared_bound * 1e8, 1.0 / (spec.n - spec.beta));
  widened.outer_radius = std::max(plan.outer_radius, needed);
  return apply_part(omega, spec, f, KernelPart::far, widened);
}

Field periodic_kernel_samples(const SphereSymbol& omega, const KernelSpec& spec,
                              const Field& grid, const PeriodicOptions& options,
                              double* radius_used) {
  spec.validate();
  if (grid.dim() != spec.n) throw Error(Errc::invalid_input, "field dimension does not match kernel dimension");
  if (spec.epsilon < 2.0 * grid.spacing() * (1.0 - 1e-12)) {
    throw Error(Errc::resolution, "epsilon must be at least two grid cells");
  }
  const auto n = static_cast<std::size_t>(spec.n);
  const double h = grid.spacing();
  const auto& shape = grid.shape();
  const Support supp = support_of(grid);

  double radius = 0.0;
  if (options.kernel_radius) {
    radius = *options.kernel_radius;
  } else if (options.part == KernelPart::near) {
    radius = 2.0 / spec.beta;
  } else {
    double cells = kInfinity;
    for (std::size_t a = 0; a < n; ++a) {
      const std::size_t m = supp.empty ? 0 : supp.last[a] - supp.first[a] + 1;
      const double free = static_cast<double>(shape[a]) - static_cast<double>(m) - 1.0;
      cells = std::min(cells, std::floor(0.5 * free));
    }
    radius = cells * h;
  }
  if (options.part == KernelPart::near) radius = std::min(radius, 2.0 / spec.beta);
  if (!(radius > 0.0)) throw Error(Errc::wraparound, "periodic box leaves no room for the kernel");
  if (radius_used != nullptr) *radius_used = radius;

  std::vector<std::int64_t> lower(n);
  for (std::size_t a = 0; a < n; ++a) lower[a] = -static_cast<std::int64_t>((shape[a] - 1) / 2);
  const std::vector<double> zero(n, 0.0);
  const auto w = build_stencil(omega, spec, h, zero, lower, shape,
                               StencilOptions{options.part, radius, options.refine});

  // Reach of the nonzero weights along each axis.
  std::vector<std::int64_t> reach(n, 0);
  std::vector<std::size_t> m(n, 0);
  std::size_t flat = 0;
  do {
    if (w.weights[flat] != 0.0) {
      for (std::size_t a = 0; a < n; ++a) {
        reach[a] = std::max(reach[a], std::abs(lower[a] + static_cast<std::int64_t>(m[a])));
      }
    }
    ++flat;
  } while (next_index(m, shape));
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t support_cells = supp.empty ? 0 : supp.last[a] - supp.first[a] + 1;
    if (static_cast<std::size_t>(2 * reach[a]) + support_cells > shape[a]) {
      throw Error(Errc::wraparound, "periodic box of side " + std::to_string(static_cast<double>(shape[a]) * h) +
                                        " cannot hold the kernel support plus supp f");
    }
  }

  Field samples(shape, h, grid.origin());
  const auto pstride = strides_of(shape);
  const double cell = grid.cell_volume();
  std::fill(m.begin(), m.end(), 0);
  flat = 0;
  do {
    std::size_t p = 0;
    for (std::size_t a = 0; a < n; ++a) {
      const std::int64_t j = lower[a] + static_cast<std::int64_t>(m[a]);
      const auto len = static_cast<std::int64_t>(shape[a]);
      p += static_cast<std::size_t>((j % len + len) % len) * pstride[a];
    }
    samples[p] = w.weights[flat++] / cell;
  } while (next_index(m, shape));
  return samples;
}

PeriodicApplied apply_periodic_fft(const SphereSymbol& omega, const KernelSpec& spec,
                                   const Field& f, const PeriodicOptions& options) {
  if (!omega.supports(spec.n)) throw Error(Errc::unsupported_dimension, "symbol " + omega.name + " not defined in this dimension");
  PeriodicApplied result;
  const Field kernel = periodic_kernel_samples(omega, spec, f, options, &result.kernel_radius);
  std::vector<double> weights(kernel.values().begin(), kernel.values().end());
  const double cell = f.cell_volume();
  for (double& v : weights) v *= cell;
  auto out = detail::circular_convolve(weights, f.values(), f.shape());
  result.values = Field(f.shape(), f.spacing(), f.origin(), std::move(out));
  if (options.part != KernelPart::near) {
    result.tail_bound = omega.declared_bound * l1_norm(f) * std::pow(result.kernel_radius, spec.beta - spec.n);
  }
  return result;
}

double riesz_normalization(int n) {
  const double s = 0.5 * (n + 1);
  return std::tgamma(s) / std::pow(std::numbers::pi, s);
}

std::complex<double> riesz_multiplier(std::span<const double> xi, int axis) {
  if (axis < 0 || axis >= static_cast<int>(xi.size())) throw Error(Errc::invalid_input, "axis out of range");
  const double r = norm2(xi);
  if (r == 0.0) return {0.0, 0.0};
  const double c = riesz_normalization(static_cast<int>(xi.size()));
  return {0.0, -(xi[static_cast<std::size_t>(axis)] / r) / c};
}

Field riesz_reference(const Field& f, int axis) {
  const auto n = static_cast<std::size_t>(f.dim());
  if (axis < 0 || static_cast<std::size_t>(axis) >= n) throw Error(Errc::invalid_input, "axis out of range");
  const auto& shape = f.shape();
  auto spectrum = detail::forward_half(f.values(), shape);
  std::vector<std::size_t> half = shape;
  half.back() = shape.back() / 2 + 1;
  std::vector<std::size_t> k(n, 0);
  std::vector<double> xi(n);
  std::size_t flat = 0;
  do {
    bool nyquist = false;
    for (std::size_t a = 0; a < n; ++a) {
      const auto len = shape[a];
      const double idx = k[a] <= len / 2 ? static_cast<double>(k[a]) : static_cast<double>(k[a]) - static_cast<double>(len);
      xi[a] = idx / (static_cast<double>(len) * f.spacing());
      if (a == static_cast<std::size_t>(axis) && len % 2 == 0 && k[a] == len / 2) nyquist = true;
    }
    spectrum[flat] *= nyquist ? std::complex<double>{} : riesz_multiplier(xi, axis);
    ++flat;
  } while (next_index(k, half));
  auto out = detail::inverse_half(std::move(spectrum), shape);
  const double scale = 1.0 / static_cast<double>(f.size());
  for (double& v : out) v *= scale;
  return Field(shape, f.spacing(), f.origin(), std::move(out));
}

std::vector<std::complex<double>> dft(const Field& f) { return detail::forward_full(f.values(), f.shape()); }

}  // namespace czx
