#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>

#include "czx/field_io.hpp"

namespace czx::cli {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError("'" + key + "' must be finite");
  return x;
}

std::vector<double> numbers(const json& v, const std::string& key) {
  if (!v.is_array()) return {number(v, key)};
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, key));
  if (out.empty()) throw ConfigError("'" + key + "' must not be empty");
  return out;
}

std::uint64_t unsigned_integer(const json& v, const std::string& key) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    throw ConfigError("'" + key + "' must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

const std::string& ExperimentConfig::symbol_or_default() const {
  static const std::string sign = "sign";
  static const std::string riesz = "riesz-1";
  if (!symbol.empty()) return symbol;
  return n == 1 ? sign : riesz;
}

double parse_eps(std::string_view t) {
  if (t.size() < 2 || t.back() != 'h') throw ConfigError("epsilon must be written as a multiple of h, e.g. \"4h\"");
  const std::string_view digits = t.substr(0, t.size() - 1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || !(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError("cannot read epsilon '" + std::string(t) + "'");
  }
  return value;
}

std::string format_eps(double multiple) { return format_double(multiple) + "h"; }

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  reject_unknown(doc,
                 {"symbol", "n", "beta", "eps", "q", "lambda", "grid", "corpus", "outdir", "input", "part",
                  "quad_order", "constant", "C", "delta", "tolerances"},
                 "configuration");
  ExperimentConfig c;
  if (doc.contains("symbol")) c.symbol = text(doc["symbol"], "symbol");
  if (doc.contains("n")) {
    const auto n = unsigned_integer(doc["n"], "n");
    if (n < 1 || n > 3) throw ConfigError("'n' must be 1, 2 or 3");
    c.n = static_cast<int>(n);
  }
  if (doc.contains("beta")) c.betas = numbers(doc["beta"], "beta");
  if (doc.contains("q")) c.qs = numbers(doc["q"], "q");
  if (doc.contains("lambda")) c.lambdas = numbers(doc["lambda"], "lambda");
  if (doc.contains("eps")) {
    const json& e = doc["eps"];
    if (e.is_array()) {
      for (const auto& x : e) c.eps_multiples.push_back(parse_eps(text(x, "eps")));
      if (c.eps_multiples.empty()) throw ConfigError("'eps' must not be empty");
    } else {
      c.eps_multiples.push_back(parse_eps(text(e, "eps")));
    }
  }
  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_object()) throw ConfigError("'grid' must be an object");
    reject_unknown(g, {"h", "side"}, "grid");
    if (g.contains("h")) c.h = number(g["h"], "grid.h");
    if (g.contains("side")) c.side = number(g["side"], "grid.side");
  }
  if (doc.contains("corpus")) {
    const json& k = doc["corpus"];
    if (!k.is_object()) throw ConfigError("'corpus' must be an object");
    reject_unknown(k, {"seed", "count", "first"}, "corpus");
    if (k.contains("seed")) c.seed = unsigned_integer(k["seed"], "corpus.seed");
    if (k.contains("count")) c.count = unsigned_integer(k["count"], "corpus.count");
    if (k.contains("first")) c.first = unsigned_integer(k["first"], "corpus.first");
  }
  if (doc.contains("outdir")) c.outdir = text(doc["outdir"], "outdir");
  if (doc.contains("input")) c.input = text(doc["input"], "input");
  if (doc.contains("part")) c.part = text(doc["part"], "part");
  if (doc.contains("quad_order")) c.quad_order = static_cast<int>(unsigned_integer(doc["quad_order"], "quad_order"));
  if (doc.contains("constant")) c.constant = number(doc["constant"], "constant");
  if (doc.contains("C")) c.c_cal = number(doc["C"], "C");
  if (doc.contains("delta")) c.delta = number(doc["delta"], "delta");
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) throw ConfigError("'tolerances' must be an object");
    reject_unknown(t, {"split", "plancherel", "trend_factor", "recovery_fraction"}, "tolerances");
    if (t.contains("split")) c.tolerances.split = number(t["split"], "tolerances.split");
    if (t.contains("plancherel")) c.tolerances.plancherel = number(t["plancherel"], "tolerances.plancherel");
    if (t.contains("trend_factor")) c.tolerances.trend_factor = number(t["trend_factor"], "tolerances.trend_factor");
    if (t.contains("recovery_fraction")) {
      c.tolerances.recovery_fraction = number(t["recovery_fraction"], "tolerances.recovery_fraction");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return parse_config(doc);
}

nlohmann::ordered_json to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["symbol"] = c.symbol_or_default();
  j["n"] = c.n;
  j["beta"] = c.betas;
  std::vector<std::string> eps;
  for (double m : c.eps_multiples) eps.push_back(format_eps(m));
  j["eps"] = eps;
  j["q"] = c.qs;
  j["lambda"] = c.lambdas;
  nlohmann::ordered_json grid = nlohmann::ordered_json::object();
  if (c.h) grid["h"] = *c.h;
  if (c.side) grid["side"] = *c.side;
  j["grid"] = grid;
  nlohmann::ordered_json corpus;
  corpus["seed"] = c.seed;
  if (c.count) corpus["count"] = *c.count;
  corpus["first"] = c.first;
  j["corpus"] = corpus;
  j["outdir"] = c.outdir;
  if (!c.input.empty()) j["input"] = c.input;
  j["part"] = c.part;
  j["quad_order"] = c.quad_order;
  if (c.constant) j["constant"] = *c.constant;
  if (c.c_cal) j["C"] = *c.c_cal;
  if (c.delta) j["delta"] = *c.delta;
  nlohmann::ordered_json tol;
  tol["split"] = c.tolerances.split;
  tol["plancherel"] = c.tolerances.plancherel;
  tol["trend_factor"] = c.tolerances.trend_factor;
  tol["recovery_fraction"] = c.tolerances.recovery_fraction;
  j["tolerances"] = tol;
  return j;
}

}  // namespace czx::cli
