// Copyright 2026 The symvar Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Batch front-end. A request names a subcommand and carries its parameters
// as a JSON object; run() validates everything before computing and returns
// the exit status and the serialized output.
//
// Exit status: 0 success, 1 validation or other error, 2 critical case
// p = 1/2. Error bodies are {"error": ..., "hint": ...}.

#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "symvar/certificate.hpp"
#include "symvar/cumulants.hpp"
#include "symvar/errors.hpp"
#include "symvar/matrixlab.hpp"
#include "symvar/measures.hpp"
#include "symvar/optimizer.hpp"
#include "symvar/rational.hpp"

namespace symvar::cli {

enum class OutputFormat { Json, Csv };

struct CommandRequest {
  std::string subcommand;
  nlohmann::json params = nlohmann::json::object();
  OutputFormat output = OutputFormat::Json;
  std::optional<std::string> outfile;
};

struct CommandResponse {
  int exit_status = 0;
  std::string body;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCritical = 2;

namespace detail {

using nlohmann::json;

inline const std::map<std::string, std::set<std::string>>& allowed_params() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"convolve", {"kind", "x", "y", "order", "mode"}},
      {"symmetry", {"kind", "p", "y", "order", "mode", "explore_critical"}},
      {"certify", {"p", "mode", "lo", "hi", "step"}},
      {"optimize",
       {"kind", "p", "grid", "include", "relax", "exact", "seed", "restarts", "atoms", "max_odd_order",
        "explore_critical"}},
      {"simulate", {"experiment", "p", "y", "n", "reps", "order", "sizes", "seed", "explore_critical"}},
  };
  return table;
}

inline void check_params(const CommandRequest& req) {
  const auto& table = allowed_params();
  auto it = table.find(req.subcommand);
  if (it == table.end())
    throw ValidationError("unknown subcommand '" + req.subcommand + "'",
                          "expected one of convolve, symmetry, certify, optimize, simulate");
  if (!req.params.is_object()) throw ValidationError("parameters must be a JSON object");
  for (const auto& [key, value] : req.params.items())
    if (!it->second.count(key))
      throw ValidationError("unknown parameter '" + key + "' for " + req.subcommand,
                            "run `symvar " + req.subcommand + " --help` for the accepted flags");
}

inline std::string text_param(const json& params, const std::string& key) {
  const json& v = params.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw ValidationError("parameter '" + key + "' must be a string or number");
}

inline std::optional<std::string> optional_text(const json& params, const std::string& key) {
  if (!params.contains(key)) return std::nullopt;
  return text_param(params, key);
}

inline std::string required_text(const json& params, const std::string& key) {
  if (!params.contains(key)) throw ValidationError("missing required parameter '" + key + "'");
  return text_param(params, key);
}

inline long integer_param(const json& params, const std::string& key, long fallback) {
  if (!params.contains(key)) return fallback;
  const json& v = params.at(key);
  if (v.is_number_integer()) return v.get<long>();
  if (v.is_string()) {
    try {
      std::size_t used = 0;
      long out = std::stol(v.get<std::string>(), &used);
      if (used == v.get<std::string>().size()) return out;
    } catch (...) {
    }
  }
  throw ValidationError("parameter '" + key + "' must be an integer");
}

inline bool bool_param(const json& params, const std::string& key) {
  if (!params.contains(key)) return false;
  const json& v = params.at(key);
  if (v.is_boolean()) return v.get<bool>();
  throw ValidationError("parameter '" + key + "' must be a boolean");
}

inline std::uint64_t seed_param(const json& params) {
  if (!params.contains("seed"))
    throw ValidationError("this command is randomized and needs an explicit seed", "pass --seed <unsigned integer>");
  const long v = integer_param(params, "seed", 0);
  if (v < 0) throw ValidationError("seed must be a nonnegative integer");
  return static_cast<std::uint64_t>(v);
}

/// p in (0,1); p = 1/2 raises CriticalCase unless exploration is requested.
inline Rational p_param(const json& params, bool allow_critical) {
  const Rational p = parse_rational(required_text(params, "p"));
  if (!(p > 0 && p < 1)) throw DomainError("p must lie in (0, 1)", "choose 0 < p < 1");
  if (p == Rational(1, 2) && !allow_critical) throw CriticalCase();
  return p;
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

/// "bernoulli:P", "neg-bernoulli:P", "point:X", inline measure JSON, or
/// "@path" to a measure JSON file.
inline DiscreteMeasure<Rational> parse_measure_spec(const json& spec) {
  if (spec.is_object()) {
    auto any = any_measure_from_json(spec);
    if (auto* exact = std::get_if<DiscreteMeasure<Rational>>(&any)) return *exact;
    std::vector<Atom<Rational>> atoms;
    for (const auto& a : std::get<DiscreteMeasure<double>>(any).atoms()) atoms.push_back({Rational(a.location), Rational(a.weight)});
    Rational total(0);
    for (const auto& a : atoms) total += a.weight;
    for (auto& a : atoms) a.weight /= total;
    return DiscreteMeasure<Rational>(std::move(atoms));
  }
  if (!spec.is_string()) throw ValidationError("measure must be a string or JSON object");
  const std::string s = spec.get<std::string>();
  const std::string hint = "use bernoulli:P, neg-bernoulli:P, point:X, a measure JSON object or @file.json";
  if (s.empty()) throw ValidationError("empty measure", hint);
  if (s.front() == '{') return parse_measure_spec(json::parse(s));
  if (s.front() == '@') {
    std::ifstream in(s.substr(1));
    if (!in) throw ValidationError("cannot read measure file '" + s.substr(1) + "'", hint);
    return parse_measure_spec(json::parse(in));
  }
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw ValidationError("malformed measure '" + s + "'", hint);
  const std::string family = s.substr(0, colon);
  const Rational arg = parse_rational(s.substr(colon + 1));
  if (family == "bernoulli") return bernoulli(arg);
  if (family == "neg-bernoulli") return negate(bernoulli(arg));
  if (family == "point") return DiscreteMeasure<Rational>::point_mass(arg);
  throw ValidationError("unknown measure family '" + family + "'", hint);
}

inline json rational_json(const Rational& v) {
  return {{"value", to_decimal_string(v)}, {"exact", to_fraction_string(v)}};
}

inline int order_param(const json& params) {
  const long order = integer_param(params, "order", kMaxMomentOrder);
  if (order < 1 || order > kMaxMomentOrder) throw SizeError("order must lie in [1, 13]");
  return static_cast<int>(order);
}

inline bool exact_mode(const json& params) {
  const std::string mode = params.value("mode", std::string("exact"));
  if (mode != "exact" && mode != "float") throw ValidationError("mode must be exact or float");
  return mode == "exact";
}

template <Scalar S>
json moments_json(const MomentSequence<S>& m) {
  json out = json::array();
  for (int n = 1; n <= m.order(); ++n) {
    if constexpr (ScalarTraits<S>::exact)
      out.push_back(rational_json(m[n]));
    else
      out.push_back(m[n]);
  }
  return out;
}

template <Scalar S>
std::string moments_csv(const MomentSequence<S>& m) {
  std::string out = "order,moment\n";
  for (int n = 1; n <= m.order(); ++n) {
    if constexpr (ScalarTraits<S>::exact)
      out += std::to_string(n) + "," + to_exact_string(m[n]) + "\n";
    else {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", m[n]);
      out += std::to_string(n) + "," + buf + "\n";
    }
  }
  return out;
}

inline std::string finish(const json& doc) { return doc.dump(2) + "\n"; }

inline std::string run_convolve(const CommandRequest& req) {
  const json& params = req.params;
  const IndependenceKind kind = parse_kind(required_text(params, "kind"));
  if (!params.contains("x") || !params.contains("y")) throw ValidationError("convolve needs both x and y measures");
  const auto x = parse_measure_spec(params.at("x"));
  const auto y = parse_measure_spec(params.at("y"));
  const int order = order_param(params);
  json doc = {{"kind", std::string(to_string(kind))}, {"order", order}};
  if (exact_mode(params)) {
    const auto m = convolve_moments(moments_of(x, order), moments_of(y, order), kind);
    if (req.output == OutputFormat::Csv) return moments_csv(m);
    doc["mode"] = "exact";
    doc["moments"] = moments_json(m);
    doc["odd_moment_residual"] = rational_json(odd_moment_residual(m));
  } else {
    const auto m = convolve_moments(moments_of(to_float(x), order), moments_of(to_float(y), order), kind);
    if (req.output == OutputFormat::Csv) return moments_csv(m);
    doc["mode"] = "float";
    doc["moments"] = moments_json(m);
    doc["odd_moment_residual"] = odd_moment_residual(m);
  }
  return finish(doc);
}

inline std::string run_symmetry(const CommandRequest& req) {
  const json& params = req.params;
  const bool explore = bool_param(params, "explore_critical");
  const IndependenceKind kind = parse_kind(required_text(params, "kind"));
  const Rational p = p_param(params, explore);
  const auto y = params.contains("y") ? parse_measure_spec(params.at("y")) : negate(bernoulli(p));
  const int order = order_param(params);
  if (req.output == OutputFormat::Csv) throw ValidationError("symmetry emits JSON only", "drop --output csv");
  json doc = {{"kind", std::string(to_string(kind))}, {"p", to_decimal_string(p)}, {"order", order}};
  if (exact_mode(params)) {
    const auto m = convolve_moments(moments_of(bernoulli(p), order), moments_of(y, order), kind);
    const Rational r = odd_moment_residual(m);
    doc["mode"] = "exact";
    doc["residual"] = rational_json(r);
    doc["symmetric"] = r == 0;
    doc["second_moment_y"] = rational_json(moments_of(y, std::max(order, 2))[2]);
  } else {
    const auto yf = to_float(y);
    const double r = symmetrizer_residual(p.convert_to<double>(), yf, kind, order);
    doc["mode"] = "float";
    doc["residual"] = r;
    doc["symmetric"] = r <= 1e-12;
    doc["second_moment_y"] = yf.expectation([](double t) { return t * t; });
  }
  if (p == Rational(1, 2)) doc["conjecture_data"] = true;
  return finish(doc);
}

inline std::string run_certify(const CommandRequest& req) {
  const json& params = req.params;
  const Rational p = p_param(params, false);
  if (req.output == OutputFormat::Csv) throw ValidationError("certify emits JSON only", "drop --output csv");
  const std::string mode = params.value("mode", std::string("exact"));
  if (mode == "exact") {
    for (const char* key : {"lo", "hi", "step"})
      if (params.contains(key)) throw ValidationError(std::string("'") + key + "' only applies to grid mode");
    return finish(to_json(verify_inequality_exact(p)));
  }
  if (mode != "grid") throw ValidationError("certificate mode must be exact or grid");
  const Rational lo = parse_rational(optional_text(params, "lo").value_or("-5"));
  const Rational hi = parse_rational(optional_text(params, "hi").value_or("5"));
  const Rational step = parse_rational(optional_text(params, "step").value_or("0.001"));
  return finish(to_json(verify_inequality_grid<Rational>(p, lo, hi, step)));
}

inline std::string run_optimize(const CommandRequest& req) {
  const json& params = req.params;
  const bool explore = bool_param(params, "explore_critical");
  const IndependenceKind kind = parse_kind(required_text(params, "kind"));
  const Rational p = p_param(params, explore);
  if (req.output == OutputFormat::Csv) throw ValidationError("optimize emits JSON only", "drop --output csv");
  json doc;
  if (kind == IndependenceKind::Classical) {
    for (const char* key : {"seed", "restarts", "atoms", "max_odd_order"})
      if (params.contains(key)) throw ValidationError(std::string("'") + key + "' only applies to free/boolean search");
    GridSpec grid = GridSpec::parse(optional_text(params, "grid").value_or("-2:1:0.25"));
    if (auto inc = optional_text(params, "include")) {
      grid.must_include.clear();
      for (const auto& item : split(*inc, ',')) grid.must_include.push_back(parse_rational(item));
    }
    const ClassicalMode mode = params.contains("relax")
                                   ? ClassicalMode::MomentRelax(static_cast<int>(integer_param(params, "relax", 0)))
                                   : ClassicalMode::ExactLaw();
    if (bool_param(params, "exact"))
      doc = to_json(classical_min_variance<Rational>(p, grid, mode));
    else
      doc = to_json(classical_min_variance<double>(p, grid, mode));
  } else {
    for (const char* key : {"grid", "include", "relax", "exact"})
      if (params.contains(key)) throw ValidationError(std::string("'") + key + "' only applies to the classical program");
    SearchConfig cfg;
    cfg.seed = seed_param(params);
    cfg.restarts = static_cast<int>(integer_param(params, "restarts", cfg.restarts));
    cfg.atom_budget = static_cast<int>(integer_param(params, "atoms", cfg.atom_budget));
    cfg.max_odd_order = static_cast<int>(integer_param(params, "max_odd_order", cfg.max_odd_order));
    cfg.allow_critical = explore;
    cfg.validate();
    doc = to_json(nc_min_variance(p.convert_to<double>(), kind, cfg));
  }
  doc["kind"] = std::string(to_string(kind));
  doc["p"] = to_decimal_string(p);
  if (p == Rational(1, 2)) doc["conjecture_data"] = true;
  return finish(doc);
}

inline std::string run_simulate(const CommandRequest& req) {
  const json& params = req.params;
  const bool explore = bool_param(params, "explore_critical");
  const std::string experiment = params.value("experiment", std::string("moments"));
  const Rational p_exact = p_param(params, explore);
  const double p = p_exact.convert_to<double>();
  const auto y = to_float(params.contains("y") ? parse_measure_spec(params.at("y")) : negate(bernoulli(p_exact)));
  const std::uint64_t seed = seed_param(params);
  const long reps = integer_param(params, "reps", experiment == "identity" ? 10 : 20);
  if (reps < 1 || reps > 10000) throw ValidationError("reps must lie in [1, 10000]");

  if (experiment == "moments") {
    if (params.contains("sizes")) throw ValidationError("'sizes' only applies to the identity experiment");
    const long n = integer_param(params, "n", 800);
    if (n < 2 || n > kMaxMatrixDimension) throw SizeError("n must lie in [2, 4096]");
    const long order = integer_param(params, "order", 8);
    if (order < 1 || order > kMaxMomentOrder) throw SizeError("order must lie in [1, 13]");
    const MomentReport report =
        empirical_vs_predicted(MatrixModel{static_cast<int>(n), p, y, seed}, static_cast<int>(order), static_cast<int>(reps));
    if (req.output == OutputFormat::Csv) return to_csv(report);
    json doc = to_json(report);
    doc["seed"] = seed;
    if (p_exact == Rational(1, 2)) doc["conjecture_data"] = true;
    return finish(doc);
  }
  if (experiment == "identity") {
    for (const char* key : {"n", "order"})
      if (params.contains(key)) throw ValidationError(std::string("'") + key + "' only applies to the moments experiment");
    if (p_exact == Rational(1, 2)) throw CriticalCase();
    std::vector<int> sizes;
    for (const auto& item : split(optional_text(params, "sizes").value_or("200,400,800"), ',')) {
      long n = 0;
      try {
        n = std::stol(item);
      } catch (...) {
        throw ValidationError("malformed size '" + item + "'", "sizes are comma-separated integers");
      }
      if (n < 2 || n > kMaxMatrixDimension) throw SizeError("matrix sizes must lie in [2, 4096]");
      sizes.push_back(static_cast<int>(n));
    }
    const IdentityExperiment e = run_identity_experiment(p, y, sizes, static_cast<int>(reps), seed);
    if (req.output == OutputFormat::Csv) return to_csv(e);
    json doc = to_json(e);
    doc["seed"] = seed;
    return finish(doc);
  }
  throw ValidationError("unknown experiment '" + experiment + "'", "expected moments or identity");
}

inline json error_json(const std::string& what, const std::string& hint) {
  return {{"error", what}, {"hint", hint}};
}

}  // namespace detail

inline CommandResponse run(const CommandRequest& req) {
  CommandResponse resp;
  try {
    detail::check_params(req);
    if (req.subcommand == "convolve") resp.body = detail::run_convolve(req);
    else if (req.subcommand == "symmetry") resp.body = detail::run_symmetry(req);
    else if (req.subcommand == "certify") resp.body = detail::run_certify(req);
    else if (req.subcommand == "optimize") resp.body = detail::run_optimize(req);
    else resp.body = detail::run_simulate(req);
    resp.exit_status = kExitOk;
  } catch (const CriticalCase& e) {
    resp = {kExitCritical, detail::finish(detail::error_json(e.what(), e.hint()))};
  } catch (const Error& e) {
    resp = {kExitError, detail::finish(detail::error_json(e.what(), e.hint()))};
  } catch (const nlohmann::json::exception& e) {
    resp = {kExitError, detail::finish(detail::error_json(std::string("invalid JSON: ") + e.what(), "check the measure or parameter syntax"))};
  } catch (const std::exception& e) {
    resp = {kExitError, detail::finish(detail::error_json(e.what(), ""))};
  }
  if (req.outfile && resp.exit_status == kExitOk) {
    std::ofstream out(*req.outfile);
    if (!out) return {kExitError, detail::finish(detail::error_json("cannot write '" + *req.outfile + "'", "check the output path"))};
    out << resp.body;
  }
  return resp;
}

}  // namespace symvar::cli
