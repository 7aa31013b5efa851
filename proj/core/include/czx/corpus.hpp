#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "czx/field.hpp"
#include "czx/goodlambda.hpp"
#include "czx/kernel.hpp"

namespace czx {

/// Counter-based generator: the k-th draw of stream (seed, stream) is a
/// fixed hash of the triple, so results never depend on evaluation order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  std::uint64_t next() noexcept;
  double uniform() noexcept;  // [0, 1)
  double uniform(double lo, double hi) noexcept;
  std::size_t index(std::size_t n) noexcept;  // [0, n)
  Rng split(std::uint64_t stream) const noexcept;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

enum class SourceKind { gaussian, indicator, bumps, chirp, impulse };

std::string_view to_string(SourceKind k) noexcept;
/// Throws Errc::invalid_input for an unknown name.
SourceKind parse_source_kind(std::string_view name);

/// Random source of the given kind on the grid of `grid`, vanishing on
/// every cell whose center lies outside `region`.
Field make_source(SourceKind kind, const Field& grid, const Box& region, Rng& rng);

/// Root grid for separated instances: sources live in [0, 8)^n and the root
/// holds them plus B(2/beta) with a margin. Coarser spacing is used when the
/// preferred one would exceed `max_cells_per_axis`.
struct SeparatedLayout {
  DyadicCube root;
  Field zero;  // zero field on the root grid
  Box source_region;
  double beta = 0.0;
};

SeparatedLayout separated_layout(int n, double beta, double preferred_h = 0.0,
                                 std::size_t max_cells_per_axis = 0);

/// Epsilon used with a layout: twice its spacing.
double layout_epsilon(const SeparatedLayout& layout);

/// Q of side 1/2, 1 or 2 inside the source region, x0 a cell center of 3Q,
/// and a random source with every cell meeting 4Q zeroed. `adversarial`
/// places a single impulse on a cell touching 4Q instead.
SeparatedInstance random_separated_instance(const SphereSymbol& omega, const SeparatedLayout& layout,
                                            Rng& rng, bool adversarial = false);

/// Random source on the whole layout (no separation), for the global check.
Field random_layout_source(const SeparatedLayout& layout, Rng& rng);

/// Member `index` of the sweep corpus: a source of kind gaussian, indicator,
/// bumps or chirp (cycling with the index) on a grid covering [0, side)^n.
/// h = 0 selects 1/32 for n = 1 and 1/8 otherwise.
Field sweep_member(int n, std::uint64_t seed, std::uint64_t index, double h = 0.0, double side = 4.0);
std::vector<Field> sweep_corpus(int n, std::uint64_t seed, std::uint64_t first, std::size_t count,
                                double h = 0.0, double side = 4.0);

}  // namespace czx
