#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critball/asympt/verify.hpp"
#include "critball/core.hpp"
#include "critball/greenfn/center.hpp"
#include "critball/solver/problem.hpp"

namespace critball::io {

using json = nlohmann::json;
using greenfn::RadialCoefficient;

/// A config error located in its source document. `field()` is the dotted
/// path of the offending key; `line()` is 1-based, or 0 when unknown.
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string field, const std::string& what, std::string source = {}, int line = 0)
      : ValidationError(Verbatim{}, field, decorate(field, what, source, line)), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  static std::string decorate(const std::string& field, const std::string& what, const std::string& source, int line) {
    std::string where = source.empty() ? "config" : source;
    if (line > 0) where += ":" + std::to_string(line);
    return where + ": field '" + field + "': " + what;
  }
  int line_;
};

/// Coefficient as written in a config: a number, "critical" (a = -pi^2/(4R^2)),
/// or {"table": {"r": [...], "values": [...]}}.
struct CoefficientSpec {
  enum class Kind { constant, critical, table };
  Kind kind = Kind::constant;
  double value = 0.0;
  std::vector<double> r, values;

  static CoefficientSpec constant(double v) { return {Kind::constant, v, {}, {}}; }
  static CoefficientSpec critical() { return {Kind::critical, 0.0, {}, {}}; }

  RadialCoefficient build(double R) const {
    switch (kind) {
      case Kind::constant: return RadialCoefficient::constant(value);
      case Kind::critical: return RadialCoefficient::constant(greenfn::critical_a(R));
      case Kind::table: break;
    }
    return RadialCoefficient::table(r, values);
  }
  bool operator==(const CoefficientSpec&) const = default;
};

struct SolverTolerances {
  double quad = 1e-12;    // relative, for Q_V and Green-representation quadrature
  double ode = 1e-12;     // relative ODE tolerance; absolute is 1e-2 of it
  double shoot = 1e-10;   // |u(R)| at acceptance
  double series = 1e-6;   // Taylor start offset in the inner variable
  bool operator==(const SolverTolerances&) const = default;
};

struct BubbleTestConfig {
  double lambda_min = 1e2;
  double lambda_max = 1e4;
  int points = 9;
  std::vector<CoefficientSpec> a_values{CoefficientSpec::constant(0.0), CoefficientSpec::critical()};
  double tolerance = 0.01;
  bool operator==(const BubbleTestConfig&) const = default;
};

struct OutputPaths {
  std::string records = "records.jsonl";
  std::string report = "report";  // stem: .json, .csv and .txt are appended
  bool operator==(const OutputPaths&) const = default;
};

struct VerifyTolerances {
  std::map<std::string, double> values;  // only keys present in the document
  bool operator==(const VerifyTolerances&) const = default;
};

struct RunConfig {
  double R = 1.0;
  CoefficientSpec a = CoefficientSpec::critical();
  CoefficientSpec V = CoefficientSpec::constant(-1.0);
  std::vector<double> eps_ladder{0.04, 0.02, 0.01, 0.005};
  SolverTolerances tolerances;
  int lmax = 1000;
  std::vector<double> probes{0.3, 0.5, 0.7, 0.9};
  VerifyTolerances verify;
  BubbleTestConfig bubbletest;
  OutputPaths output;
  bool operator==(const RunConfig&) const = default;

  solver::ProblemConfig problem(double eps) const {
    solver::ProblemConfig p;
    p.domain = greenfn::BallDomain(R);
    p.a = a.build(R);
    p.V = V.build(R);
    p.eps = eps;
    p.shoot_tol = tolerances.shoot;
    p.ode_rtol = tolerances.ode;
    p.ode_atol = 1e-2 * tolerances.ode;
    p.series_start = tolerances.series;
    return p;
  }
};

// ------------------------------------------------------------------ verify tolerance keys

namespace detail {

inline std::map<std::string, double asympt::Tolerances::*> verify_keys() {
  using T = asympt::Tolerances;
  return {{"rate", &T::rate},           {"alpha", &T::alpha},           {"beta_gamma", &T::beta_gamma},
          {"farfield", &T::farfield},   {"bounded_factor", &T::bounded_factor}, {"identity", &T::identity},
          {"greens", &T::greens},       {"trust_lambda", &T::trust_lambda},     {"poor_fit", &T::poor_fit}};
}

}  // namespace detail

inline bool is_verify_key(const std::string& k) { return detail::verify_keys().count(k) > 0; }

inline asympt::Tolerances verify_tolerances(const RunConfig& c) {
  asympt::Tolerances t;
  const auto keys = detail::verify_keys();
  for (const auto& [k, v] : c.verify.values) t.*(keys.at(k)) = v;
  return t;
}

// ------------------------------------------------------------------ emit

inline json to_json(const CoefficientSpec& s) {
  switch (s.kind) {
    case CoefficientSpec::Kind::constant: return s.value;
    case CoefficientSpec::Kind::critical: return "critical";
    case CoefficientSpec::Kind::table: break;
  }
  return json{{"table", {{"r", s.r}, {"values", s.values}}}};
}

inline json to_json(const RunConfig& c) {
  json a_values = json::array();
  for (const auto& s : c.bubbletest.a_values) a_values.push_back(to_json(s));
  json verify = json::object();
  for (const auto& [k, v] : c.verify.values) verify[k] = v;
  return json{
      {"domain", {{"R", c.R}}},
      {"a", to_json(c.a)},
      {"V", to_json(c.V)},
      {"eps_ladder", c.eps_ladder},
      {"tolerances",
       {{"quad", c.tolerances.quad}, {"ode", c.tolerances.ode}, {"shoot", c.tolerances.shoot}, {"series", c.tolerances.series}}},
      {"lmax", c.lmax},
      {"probes", c.probes},
      {"verify", verify},
      {"bubbletest",
       {{"lambda_min", c.bubbletest.lambda_min},
        {"lambda_max", c.bubbletest.lambda_max},
        {"points", c.bubbletest.points},
        {"a_values", a_values},
        {"tolerance", c.bubbletest.tolerance}}},
      {"output", {{"records", c.output.records}, {"report", c.output.report}}},
  };
}

inline std::string emit(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

// ------------------------------------------------------------------ parse

namespace detail {

/// 1-based line of the key at `path` in `text`, found by following the keys
/// in order; 0 when a key cannot be located.
inline int locate(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    const std::string quoted = "\"" + key + "\"";
    for (;;) {
      pos = text.find(quoted, pos);
      if (pos == std::string::npos) return 0;
      std::size_t after = pos + quoted.size();
      while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
      if (after < text.size() && text[after] == ':') break;
      pos = after;
    }
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& what) const {
    std::string dotted;
    for (const auto& p : path) dotted += (dotted.empty() ? "" : ".") + p;
    throw ConfigError(dotted, what, source_, locate(text_, path));
  }

  void only(const json& obj, const std::vector<std::string>& path, std::initializer_list<const char*> allowed) const {
    if (!obj.is_object()) fail(path, "must be an object");
    for (const auto& [k, v] : obj.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || k == a;
      if (!ok) {
        auto p = path;
        p.push_back(k);
        fail(p, "unknown key");
      }
    }
  }

  double number(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_number()) fail(path, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  double positive(const json& v, const std::vector<std::string>& path) const {
    const double x = number(v, path);
    if (!(x > 0.0)) fail(path, "must be positive");
    return x;
  }

  std::vector<double> numbers(const json& v, const std::vector<std::string>& path) const {
    if (!v.is_array()) fail(path, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, path));
    return out;
  }

  CoefficientSpec coefficient(const json& v, const std::vector<std::string>& path, bool allow_critical) const {
    if (v.is_number()) return CoefficientSpec::constant(number(v, path));
    if (v.is_string()) {
      if (allow_critical && v.get<std::string>() == "critical") return CoefficientSpec::critical();
      fail(path, allow_critical ? "string value must be \"critical\"" : "must be a number or a table");
    }
    if (v.is_object()) {
      only(v, path, {"table"});
      auto tp = path;
      tp.push_back("table");
      const auto& t = v.at("table");
      only(t, tp, {"r", "values"});
      if (!t.contains("r") || !t.contains("values")) fail(tp, "needs both \"r\" and \"values\"");
      CoefficientSpec s;
      s.kind = CoefficientSpec::Kind::table;
      s.r = numbers(t.at("r"), {path[0], "table", "r"});
      s.values = numbers(t.at("values"), {path[0], "table", "values"});
      try {
        (void)RadialCoefficient::table(s.r, s.values);
      } catch (const ValidationError& e) {
        fail(tp, e.what());
      }
      return s;
    }
    fail(path, "must be a number, \"critical\" or a table");
  }

 private:
  const std::string& text_;
  std::string source_;
};

}  // namespace detail

/// Parses and validates a config document. Absent keys take their defaults.
inline RunConfig parse_config(const std::string& text, const std::string& source = {}) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // The parser's message carries line and column.
    throw ConfigError("(document)", e.what(), source);
  }
  const detail::Reader rd(text, source);
  rd.only(doc, {}, {"domain", "a", "V", "eps_ladder", "tolerances", "lmax", "probes", "verify", "bubbletest", "output"});
  RunConfig c;

  if (doc.contains("domain")) {
    const auto& d = doc["domain"];
    rd.only(d, {"domain"}, {"R"});
    if (d.contains("R")) c.R = rd.positive(d["R"], {"domain", "R"});
  }
  if (doc.contains("a")) c.a = rd.coefficient(doc["a"], {"a"}, true);
  if (doc.contains("V")) c.V = rd.coefficient(doc["V"], {"V"}, false);
  for (const auto* key : {"a", "V"}) {
    const auto& s = std::string(key) == "a" ? c.a : c.V;
    if (s.kind == CoefficientSpec::Kind::table && s.r.back() < c.R)
      rd.fail({key, "table", "r"}, "table must cover [0, R]");
  }

  if (doc.contains("eps_ladder")) {
    c.eps_ladder = rd.numbers(doc["eps_ladder"], {"eps_ladder"});
    if (c.eps_ladder.empty()) rd.fail({"eps_ladder"}, "must not be empty");
    for (std::size_t i = 0; i < c.eps_ladder.size(); ++i) {
      if (!(c.eps_ladder[i] > 0.0)) rd.fail({"eps_ladder"}, "entries must be positive");
      if (i > 0 && !(c.eps_ladder[i] < c.eps_ladder[i - 1])) rd.fail({"eps_ladder"}, "must be strictly decreasing");
    }
  }

  if (doc.contains("tolerances")) {
    const auto& t = doc["tolerances"];
    rd.only(t, {"tolerances"}, {"quad", "ode", "shoot", "series"});
    if (t.contains("quad")) c.tolerances.quad = rd.positive(t["quad"], {"tolerances", "quad"});
    if (t.contains("ode")) c.tolerances.ode = rd.positive(t["ode"], {"tolerances", "ode"});
    if (t.contains("shoot")) c.tolerances.shoot = rd.positive(t["shoot"], {"tolerances", "shoot"});
    if (t.contains("series")) c.tolerances.series = rd.positive(t["series"], {"tolerances", "series"});
    if (!(c.tolerances.ode < 1e-3)) rd.fail({"tolerances", "ode"}, "must be below 1e-3");
    if (!(c.tolerances.series <= 1e-2)) rd.fail({"tolerances", "series"}, "must not exceed 1e-2");
  }

  if (doc.contains("lmax")) {
    if (!doc["lmax"].is_number_integer() || doc["lmax"].get<int>() < 2) rd.fail({"lmax"}, "must be an integer >= 2");
    c.lmax = doc["lmax"].get<int>();
  }

  if (doc.contains("probes")) {
    c.probes = rd.numbers(doc["probes"], {"probes"});
    if (c.probes.empty()) rd.fail({"probes"}, "must not be empty");
  }
  for (double p : c.probes)
    if (!(p > 0.0 && p < c.R)) rd.fail({"probes"}, "probes must lie in (0, R)");

  if (doc.contains("verify")) {
    const auto& v = doc["verify"];
    if (!v.is_object()) rd.fail({"verify"}, "must be an object");
    for (const auto& [k, x] : v.items()) {
      if (!is_verify_key(k)) rd.fail({"verify", k}, "unknown key");
      c.verify.values[k] = rd.positive(x, {"verify", k});
    }
  }

  if (doc.contains("bubbletest")) {
    const auto& b = doc["bubbletest"];
    rd.only(b, {"bubbletest"}, {"lambda_min", "lambda_max", "points", "a_values", "tolerance"});
    auto& bt = c.bubbletest;
    if (b.contains("lambda_min")) bt.lambda_min = rd.positive(b["lambda_min"], {"bubbletest", "lambda_min"});
    if (b.contains("lambda_max")) bt.lambda_max = rd.positive(b["lambda_max"], {"bubbletest", "lambda_max"});
    if (!(bt.lambda_max > bt.lambda_min)) rd.fail({"bubbletest", "lambda_max"}, "must exceed lambda_min");
    if (b.contains("points")) {
      if (!b["points"].is_number_integer() || b["points"].get<int>() < 5)
        rd.fail({"bubbletest", "points"}, "must be an integer >= 5");
      bt.points = b["points"].get<int>();
    }
    if (b.contains("a_values")) {
      if (!b["a_values"].is_array() || b["a_values"].empty()) rd.fail({"bubbletest", "a_values"}, "must be a non-empty array");
      bt.a_values.clear();
      for (const auto& x : b["a_values"]) {
        auto s = rd.coefficient(x, {"bubbletest", "a_values"}, true);
        if (s.kind == CoefficientSpec::Kind::table) rd.fail({"bubbletest", "a_values"}, "entries must be constant");
        bt.a_values.push_back(s);
      }
    }
    if (b.contains("tolerance")) bt.tolerance = rd.positive(b["tolerance"], {"bubbletest", "tolerance"});
  }

  if (doc.contains("output")) {
    const auto& o = doc["output"];
    rd.only(o, {"output"}, {"records", "report"});
    for (const auto* k : {"records", "report"}) {
      if (!o.contains(k)) continue;
      if (!o[k].is_string() || o[k].get<std::string>().empty()) rd.fail({"output", k}, "must be a non-empty string");
      (std::string(k) == "records" ? c.output.records : c.output.report) = o[k].get<std::string>();
    }
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("(file)", "cannot open config file", path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

/// Applies KEY=VAL overrides. Solver keys (quad, ode, shoot, series) change
/// the tolerances section; verification keys change the verify section.
inline void apply_override(RunConfig& c, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("--tol-override", "expected KEY=VAL, got '" + kv + "'");
  const std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
  double x = 0.0;
  try {
    std::size_t used = 0;
    x = std::stod(val, &used);
    if (used != val.size()) throw std::invalid_argument(val);
  } catch (const std::exception&) {
    throw ConfigError("--tol-override", "value for '" + key + "' is not a number: '" + val + "'");
  }
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError("--tol-override", "value for '" + key + "' must be positive");
  if (key == "quad") c.tolerances.quad = x;
  else if (key == "ode") c.tolerances.ode = x;
  else if (key == "shoot") c.tolerances.shoot = x;
  else if (key == "series") c.tolerances.series = x;
  else if (is_verify_key(key)) c.verify.values[key] = x;
  else throw ConfigError("--tol-override", "unknown key '" + key + "'");
}

}  // namespace critball::io
