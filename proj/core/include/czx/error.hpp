#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace czx {

enum class Errc {
  invalid_symbol,
  unsupported_dimension,
  singularity,
  resolution,
  truncation,
  wraparound,
  invalid_exponent,
  out_of_domain,
  out_of_validity,
  invalid_input,
  degenerate_instance,
  invalid_instance,
  root_selected,
  divergent_tail,
  wrong_symbol,
  io,
};

std::string_view to_string(Errc code) noexcept;

/// Every library failure is reported through this type; `code()` says which
/// precondition was violated.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace czx
