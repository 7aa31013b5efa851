#pragma once

#include <iosfwd>
#include <string>

#include "czx/field.hpp"

namespace czx {

/// Binary field format: text header ("czx-field v1", "n=", "shape=", "h=",
/// "origin=", blank line) followed by raw little-endian float64 values in
/// row-major order.
void write_field(std::ostream& out, const Field& f);
void write_field(const std::string& path, const Field& f);
Field read_field(std::istream& in);
Field read_field(const std::string& path);

/// CSV with columns x1..xn,value, one row per cell center.
void write_field_csv(std::ostream& out, const Field& f);
void write_field_csv(const std::string& path, const Field& f);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

}  // namespace czx
