#pragma once

// Experiment configuration: TOML text <-> ExperimentConfig, with defaults
// and validation.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kms/error.hpp"
#include "kms/expr.hpp"
#include "kms/matrix.hpp"
#include "kms/test_function.hpp"
#include "kms/toml.hpp"

namespace kms {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"lsd",      "svd",      "cluster", "det-ratio",
                                              "kac",      "kac-jump", "widom",   "es-vs-ms"};
  return names;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"", "schrodinger", "lame", "star", "cluster-demo", "es-family"};
  return names;
}

struct BandSpec {
  int k = 0;
  std::string expr;
  friend bool operator==(const BandSpec&, const BandSpec&) = default;
};

struct SymbolSpec {
  std::string preset;  // empty: explicit bands
  std::vector<BandSpec> bands;
  std::string f;       // schrodinger potential
  double rho = 1.0;    // lame
  double c = 1.2;      // es-family
  friend bool operator==(const SymbolSpec&, const SymbolSpec&) = default;
};

struct SchemeSpec {
  std::string name = "midpoint";  // midpoint | min | max | row | shifted
  double epsilon = 1.0;
  friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

struct NumericsSpec {
  int K = 64;
  std::int64_t n_x = 129;
  std::int64_t n_t = 1024;
  std::int64_t resolution = 256;
  std::optional<double> tolerance;
  std::string check = "last";   // last | all: rows compared against the tolerance
  double cluster_radius = 0.1;  // cluster: distance to the region
  std::string region = "extended";  // cluster: extended | sampled
  double aspect = 1.0;          // svd: columns = round(aspect * n) + 1
  friend bool operator==(const NumericsSpec&, const NumericsSpec&) = default;
};

struct PerturbationSpec {
  std::string kind = "none";  // none | noise | rank-one
  double exponent = -0.6;     // noise magnitude n^exponent
  double weight = 1.0;        // rank-one weight at entry (0,0)
  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;
};

struct OutputSpec {
  std::string path;
  std::string format = "csv";  // csv | json
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct ExperimentConfig {
  std::string experiment;
  SymbolSpec symbol;
  std::vector<std::int64_t> n_list;
  SchemeSpec scheme;
  std::string phi = "z";
  NumericsSpec numerics;
  PerturbationSpec perturbation;
  OutputSpec output;
  std::uint64_t seed = 0;
  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

namespace detail {

inline void reject_unknown(const toml::Table& t, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [k, v] : t)
    if (!allowed.contains(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

inline const toml::Value* find(const toml::Table& t, const std::string& k) {
  auto it = t.find(k);
  return it == t.end() ? nullptr : &it->second;
}

inline std::string get_string(const toml::Table& t, const std::string& k, const std::string& def) {
  const auto* v = find(t, k);
  if (!v) return def;
  if (!v->is_string()) throw ConfigError("'" + k + "' must be a string");
  return v->string();
}

inline double get_number(const toml::Table& t, const std::string& k, double def) {
  const auto* v = find(t, k);
  if (!v) return def;
  if (!v->is_number()) throw ConfigError("'" + k + "' must be a number");
  return v->number();
}

inline std::int64_t get_integer(const toml::Table& t, const std::string& k, std::int64_t def) {
  const auto* v = find(t, k);
  if (!v) return def;
  if (!v->is_integer()) throw ConfigError("'" + k + "' must be an integer");
  return v->integer();
}

inline const toml::Table& get_table(const toml::Table& t, const std::string& k) {
  static const toml::Table empty;
  const auto* v = find(t, k);
  if (!v) return empty;
  if (!v->is_table()) throw ConfigError("'" + k + "' must be a table");
  return v->table();
}

inline void check_expression(const std::string& text, const std::string& where) {
  try {
    (void)Expr::parse(text);
  } catch (const ParseError& e) {
    throw ParseError(where + ": " + e.message(), e.line(), e.column());
  }
}

/// Arithmetic progressions of length >= 3 are written as n_range.
inline std::optional<std::int64_t> progression_step(const std::vector<std::int64_t>& v) {
  if (v.size() < 3) return std::nullopt;
  const auto step = v[1] - v[0];
  for (std::size_t i = 2; i < v.size(); ++i)
    if (v[i] - v[i - 1] != step) return std::nullopt;
  return step;
}

}  // namespace detail

inline void validate(const ExperimentConfig& cfg) {
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), cfg.experiment) == names.end())
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
  if (cfg.n_list.empty()) throw ConfigError("n_list must not be empty");
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 1) throw ConfigError("n_list entries must be positive");
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) throw ConfigError("n_list must be strictly increasing");
  }
  const auto& presets = preset_names();
  if (std::find(presets.begin(), presets.end(), cfg.symbol.preset) == presets.end())
    throw ConfigError("unknown preset '" + cfg.symbol.preset + "'");
  if (cfg.symbol.preset.empty()) {
    if (cfg.symbol.bands.empty()) throw ConfigError("symbol needs a preset or a nonempty band list");
    std::set<int> seen;
    for (const auto& b : cfg.symbol.bands) {
      if (!seen.insert(b.k).second) throw ConfigError("band " + std::to_string(b.k) + " listed twice");
      detail::check_expression(b.expr, "band " + std::to_string(b.k));
    }
  }
  if (cfg.symbol.preset == "schrodinger") {
    if (cfg.symbol.f.empty()) throw ConfigError("schrodinger preset needs f");
    detail::check_expression(cfg.symbol.f, "potential f");
  }
  if (cfg.symbol.preset == "lame" && !(cfg.symbol.rho > 0.0)) throw ConfigError("lame rho must be positive");
  if (cfg.symbol.preset == "es-family" && !(cfg.symbol.c > 0.0)) throw ConfigError("es-family c must be positive");
  const std::set<std::string> schemes{"midpoint", "min", "max", "row", "shifted"};
  if (!schemes.contains(cfg.scheme.name)) throw ConfigError("unknown scheme '" + cfg.scheme.name + "'");
  try {
    (void)TestFunction::parse(cfg.phi);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const auto& nm = cfg.numerics;
  if (nm.K < 1) throw ConfigError("K must be positive");
  if (nm.n_x < 3 || nm.n_x % 2 == 0) throw ConfigError("N_x must be odd and at least 3");
  if (nm.n_t < 16 || !numeric::is_power_of_two(static_cast<std::size_t>(nm.n_t)))
    throw ConfigError("N_t must be a power of two and at least 16");
  if (nm.resolution < 64) throw ConfigError("resolution must be at least 64");
  if (nm.check != "last" && nm.check != "all") throw ConfigError("check must be 'last' or 'all'");
  if (nm.region != "extended" && nm.region != "sampled") throw ConfigError("region must be 'extended' or 'sampled'");
  if (!(nm.aspect > 0.0)) throw ConfigError("aspect must be positive");
  if (cfg.perturbation.kind != "none" && cfg.perturbation.kind != "noise" && cfg.perturbation.kind != "rank-one")
    throw ConfigError("perturbation kind must be none, noise or rank-one");
  if (cfg.output.format != "csv" && cfg.output.format != "json") throw ConfigError("output format must be csv or json");
}

inline ExperimentConfig parse_config(std::string_view text) {
  const auto doc = toml::parse(text);
  using detail::get_integer;
  using detail::get_number;
  using detail::get_string;
  using detail::get_table;
  detail::reject_unknown(doc,
                         {"experiment", "phi", "seed", "n_list", "n_range", "symbol", "scheme", "numerics",
                          "perturbation", "output"},
                         "top level");
  ExperimentConfig cfg;
  cfg.experiment = get_string(doc, "experiment", "");
  cfg.phi = get_string(doc, "phi", cfg.phi);
  cfg.seed = static_cast<std::uint64_t>(get_integer(doc, "seed", 0));

  const auto* nl = detail::find(doc, "n_list");
  const auto* nr = detail::find(doc, "n_range");
  if (nl && nr) throw ConfigError("give either n_list or n_range, not both");
  if (nl) {
    if (!nl->is_array()) throw ConfigError("n_list must be an array");
    for (const auto& v : nl->array()) {
      if (!v.is_integer()) throw ConfigError("n_list entries must be integers");
      cfg.n_list.push_back(v.integer());
    }
  } else if (nr) {
    if (!nr->is_table()) throw ConfigError("n_range must be a table {start, stop, step}");
    detail::reject_unknown(nr->table(), {"start", "stop", "step"}, "n_range");
    const auto start = get_integer(nr->table(), "start", 1), stop = get_integer(nr->table(), "stop", 0);
    const auto step = get_integer(nr->table(), "step", 1);
    if (step < 1) throw ConfigError("n_range step must be positive");
    for (auto n = start; n <= stop; n += step) cfg.n_list.push_back(n);
  }

  const auto& sym = get_table(doc, "symbol");
  detail::reject_unknown(sym, {"preset", "bands", "f", "rho", "c"}, "[symbol]");
  cfg.symbol.preset = get_string(sym, "preset", "");
  cfg.symbol.f = get_string(sym, "f", "");
  cfg.symbol.rho = get_number(sym, "rho", cfg.symbol.rho);
  cfg.symbol.c = get_number(sym, "c", cfg.symbol.c);
  if (const auto* b = detail::find(sym, "bands")) {
    if (!b->is_array()) throw ConfigError("bands must be an array of {k, expr} tables");
    for (const auto& e : b->array()) {
      if (!e.is_table()) throw ConfigError("bands must be an array of {k, expr} tables");
      detail::reject_unknown(e.table(), {"k", "expr"}, "band entry");
      if (!detail::find(e.table(), "k") || !detail::find(e.table(), "expr"))
        throw ConfigError("band entries need k and expr");
      cfg.symbol.bands.push_back({static_cast<int>(get_integer(e.table(), "k", 0)), get_string(e.table(), "expr", "")});
    }
  }

  const auto& sch = get_table(doc, "scheme");
  detail::reject_unknown(sch, {"name", "epsilon"}, "[scheme]");
  cfg.scheme.name = get_string(sch, "name", cfg.scheme.name);
  cfg.scheme.epsilon = get_number(sch, "epsilon", cfg.scheme.epsilon);

  const auto& num = get_table(doc, "numerics");
  detail::reject_unknown(num, {"K", "N_x", "N_t", "resolution", "tolerance", "check", "cluster_radius", "region", "aspect"},
                         "[numerics]");
  cfg.numerics.K = static_cast<int>(get_integer(num, "K", cfg.numerics.K));
  cfg.numerics.n_x = get_integer(num, "N_x", cfg.numerics.n_x);
  cfg.numerics.n_t = get_integer(num, "N_t", cfg.numerics.n_t);
  cfg.numerics.resolution = get_integer(num, "resolution", cfg.numerics.resolution);
  if (detail::find(num, "tolerance")) cfg.numerics.tolerance = get_number(num, "tolerance", 0.0);
  cfg.numerics.check = get_string(num, "check", cfg.numerics.check);
  cfg.numerics.cluster_radius = get_number(num, "cluster_radius", cfg.numerics.cluster_radius);
  cfg.numerics.region = get_string(num, "region", cfg.numerics.region);
  cfg.numerics.aspect = get_number(num, "aspect", cfg.numerics.aspect);

  const auto& per = get_table(doc, "perturbation");
  detail::reject_unknown(per, {"kind", "exponent", "weight"}, "[perturbation]");
  cfg.perturbation.kind = get_string(per, "kind", cfg.perturbation.kind);
  cfg.perturbation.exponent = get_number(per, "exponent", cfg.perturbation.exponent);
  cfg.perturbation.weight = get_number(per, "weight", cfg.perturbation.weight);

  const auto& out = get_table(doc, "output");
  detail::reject_unknown(out, {"path", "format"}, "[output]");
  cfg.output.path = get_string(out, "path", "");
  cfg.output.format = get_string(out, "format", cfg.output.format);

  validate(cfg);
  return cfg;
}

/// Canonical TOML text with every field explicit.
inline std::string render(const ExperimentConfig& cfg) {
  toml::Table doc;
  doc["experiment"] = cfg.experiment;
  doc["phi"] = cfg.phi;
  doc["seed"] = static_cast<std::int64_t>(cfg.seed);
  if (auto step = detail::progression_step(cfg.n_list)) {
    doc["n_range"] = toml::Table{{"start", cfg.n_list.front()}, {"stop", cfg.n_list.back()}, {"step", *step}};
  } else {
    toml::Array a;
    for (auto n : cfg.n_list) a.emplace_back(n);
    doc["n_list"] = a;
  }
  toml::Table sym;
  sym["preset"] = cfg.symbol.preset;
  sym["f"] = cfg.symbol.f;
  sym["rho"] = cfg.symbol.rho;
  sym["c"] = cfg.symbol.c;
  toml::Array bands;
  for (const auto& b : cfg.symbol.bands)
    bands.emplace_back(toml::Table{{"k", static_cast<std::int64_t>(b.k)}, {"expr", b.expr}});
  sym["bands"] = bands;
  doc["symbol"] = sym;
  doc["scheme"] = toml::Table{{"name", cfg.scheme.name}, {"epsilon", cfg.scheme.epsilon}};
  toml::Table num{{"K", static_cast<std::int64_t>(cfg.numerics.K)},
                  {"N_x", cfg.numerics.n_x},
                  {"N_t", cfg.numerics.n_t},
                  {"resolution", cfg.numerics.resolution},
                  {"check", cfg.numerics.check},
                  {"cluster_radius", cfg.numerics.cluster_radius},
                  {"region", cfg.numerics.region},
                  {"aspect", cfg.numerics.aspect}};
  if (cfg.numerics.tolerance) num["tolerance"] = *cfg.numerics.tolerance;
  doc["numerics"] = num;
  doc["perturbation"] = toml::Table{
      {"kind", cfg.perturbation.kind}, {"exponent", cfg.perturbation.exponent}, {"weight", cfg.perturbation.weight}};
  doc["output"] = toml::Table{{"path", cfg.output.path}, {"format", cfg.output.format}};
  return toml::render(doc);
}

}  // namespace kms
