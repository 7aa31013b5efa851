#include "czx/field_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "czx/error.hpp"

namespace czx {

namespace {

constexpr const char* kMagic = "czx-field v1";

std::string join(const auto& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(values[i])>>) {
      out += format_double(values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* key) {
  std::vector<T> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    T value{};
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size() || item.empty()) {
      throw Error(Errc::io, std::string("bad value in header field ") + key);
    }
    out.push_back(value);
    pos = comma + 1;
  }
  return out;
}

std::string header_value(std::istream& in, const std::string& key) {
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::io, "truncated field header");
  if (line.rfind(key + "=", 0) != 0) throw Error(Errc::io, "expected header field " + key);
  return line.substr(key.size() + 1);
}

void put_le(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  std::array<char, 8> bytes{};
  for (std::size_t b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xFFU);
  out.write(bytes.data(), 8);
}

double get_le(const unsigned char* bytes) {
  std::uint64_t bits = 0;
  for (std::size_t b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw Error(Errc::io, "double formatting failed");
  return std::string(buf.data(), ptr);
}

void write_field(std::ostream& out, const Field& f) {
  out << kMagic << '\n'
      << "n=" << f.dim() << '\n'
      << "shape=" << join(f.shape()) << '\n'
      << "h=" << format_double(f.spacing()) << '\n'
      << "origin=" << join(f.origin()) << '\n'
      << '\n';
  for (double v : f.values()) put_le(out, v);
  if (!out) throw Error(Errc::io, "write failed");
}

void write_field(const std::string& path, const Field& f) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot open " + path + " for writing");
  write_field(out, f);
}

Field read_field(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw Error(Errc::io, "missing czx-field v1 header");
  const auto n = parse_list<int>(header_value(in, "n"), "n");
  const auto shape = parse_list<std::size_t>(header_value(in, "shape"), "shape");
  const auto h = parse_list<double>(header_value(in, "h"), "h");
  const auto origin = parse_list<double>(header_value(in, "origin"), "origin");
  if (!std::getline(in, line) || !line.empty()) throw Error(Errc::io, "expected blank line after header");
  if (n.size() != 1 || h.size() != 1 || shape.size() != static_cast<std::size_t>(n[0]) ||
      origin.size() != shape.size()) {
    throw Error(Errc::io, "inconsistent field header");
  }
  Field f(shape, h[0], origin);
  std::vector<unsigned char> raw(f.size() * 8);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw Error(Errc::io, "truncated field payload");
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = get_le(raw.data() + 8 * i);
  f.check_finite();
  return f;
}

Field read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  return read_field(in);
}

void write_field_csv(std::ostream& out, const Field& f) {
  for (int a = 0; a < f.dim(); ++a) out << 'x' << (a + 1) << ',';
  out << "value\n";
  std::vector<double> x(static_cast<std::size_t>(f.dim()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    f.center(i, x);
    for (double c : x) out << format_double(c) << ',';
    out << format_double(f[i]) << '\n';
  }
}

void write_field_csv(const std::string& path, const Field& f) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io, "cannot open " + path + " for writing");
  write_field_csv(out, f);
}

}  // namespace czx
