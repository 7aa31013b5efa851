#include "czx/error.hpp"

namespace czx {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_symbol: return "invalid-symbol";
    case Errc::unsupported_dimension: return "unsupported-dimension";
    case Errc::singularity: return "singularity";
    case Errc::resolution: return "resolution";
    case Errc::truncation: return "truncation";
    case Errc::wraparound: return "wraparound";
    case Errc::invalid_exponent: return "invalid-exponent";
    case Errc::out_of_domain: return "out-of-domain";
    case Errc::out_of_validity: return "out-of-validity";
    case Errc::invalid_input: return "invalid-input";
    case Errc::degenerate_instance: return "degenerate-instance";
    case Errc::invalid_instance: return "invalid-instance";
    case Errc::root_selected: return "root-selected";
    case Errc::divergent_tail: return "divergent-tail";
    case Errc::wrong_symbol: return "wrong-symbol";
    case Errc::io: return "io";
  }
  return "unknown";
}

}  // namespace czx
