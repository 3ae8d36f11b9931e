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

// Finitely supported probability laws on the real line.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "symvar/cumulants.hpp"
#include "symvar/errors.hpp"
#include "symvar/rational.hpp"

namespace symvar {

template <Scalar S>
struct Atom {
  S location;
  S weight;
  friend bool operator==(const Atom&, const Atom&) = default;
};

/// Float-mode atoms closer than this are merged.
inline constexpr double kFloatMergeTolerance = 1e-10;

/// Atoms strictly increasing in location, positive weights summing to one
/// (exactly for Rational, within 1e-12 for double). Zero-weight atoms are
/// dropped and coincident atoms merged on construction.
template <Scalar S>
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(std::vector<Atom<S>> atoms) {
    S total(0);
    for (const auto& a : atoms) {
      if constexpr (!ScalarTraits<S>::exact) {
        if (!std::isfinite(a.location) || !std::isfinite(a.weight))
          throw ValidationError("measure atoms must be finite");
      }
      if (a.weight < S(0)) throw ValidationError("measure weights must be nonnegative");
      total += a.weight;
    }
    if constexpr (ScalarTraits<S>::exact) {
      if (total != S(1))
        throw ValidationError("measure weights sum to " + to_exact_string(total) + ", not 1",
                              "weights of a probability measure must sum to exactly 1");
    } else {
      if (std::abs(total - 1.0) > 1e-12)
        throw ValidationError("measure weights sum to " + std::to_string(total) + ", not 1",
                              "float-mode weights must sum to 1 within 1e-12");
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom<S>& a, const Atom<S>& b) { return a.location < b.location; });
    for (auto& a : atoms) {
      if (a.weight == S(0)) continue;
      if (!atoms_.empty() && coincide(atoms_.back().location, a.location))
        atoms_.back().weight += a.weight;
      else
        atoms_.push_back(std::move(a));
    }
    if (atoms_.empty()) throw ValidationError("measure has no atoms");
  }

  static DiscreteMeasure point_mass(const S& location) {
    return DiscreteMeasure({Atom<S>{location, S(1)}});
  }

  const std::vector<Atom<S>>& atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }

  /// Integral of f against the measure.
  template <class F>
  S expectation(F&& f) const {
    S total(0);
    for (const auto& a : atoms_) total += a.weight * f(a.location);
    return total;
  }

  S mean() const {
    return expectation([](const S& x) { return x; });
  }

  friend bool operator==(const DiscreteMeasure&, const DiscreteMeasure&) = default;

 private:
  static bool coincide(const S& a, const S& b) {
    if constexpr (ScalarTraits<S>::exact)
      return a == b;
    else
      return std::abs(a - b) <= kFloatMergeTolerance;
  }

  std::vector<Atom<S>> atoms_;
};

/// Law of a projection of trace p: {0 -> 1-p, 1 -> p}.
template <Scalar S>
DiscreteMeasure<S> bernoulli(const S& p) {
  if (!(p >= S(0) && p <= S(1)))
    throw DomainError("bernoulli parameter outside [0, 1]", "p must satisfy 0 <= p <= 1");
  return DiscreteMeasure<S>({Atom<S>{S(0), S(1 - p)}, Atom<S>{S(1), p}});
}

/// Law of -X.
template <Scalar S>
DiscreteMeasure<S> negate(const DiscreteMeasure<S>& mu) {
  std::vector<Atom<S>> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back(Atom<S>{S(-a.location), a.weight});
  return DiscreteMeasure<S>(std::move(atoms));
}

/// Law of X + c.
template <Scalar S>
DiscreteMeasure<S> shift(const DiscreteMeasure<S>& mu, const S& c) {
  std::vector<Atom<S>> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back(Atom<S>{S(a.location + c), a.weight});
  return DiscreteMeasure<S>(std::move(atoms));
}

/// Law of s X.
template <Scalar S>
DiscreteMeasure<S> dilate(const DiscreteMeasure<S>& mu, const S& s) {
  std::vector<Atom<S>> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back(Atom<S>{S(a.location * s), a.weight});
  return DiscreteMeasure<S>(std::move(atoms));
}

/// Law of X + Y for classically independent X ~ x, Y ~ y.
template <Scalar S>
DiscreteMeasure<S> classical_convolution(const DiscreteMeasure<S>& x, const DiscreteMeasure<S>& y) {
  std::vector<Atom<S>> atoms;
  atoms.reserve(x.size() * y.size());
  for (const auto& a : x.atoms())
    for (const auto& b : y.atoms()) atoms.push_back(Atom<S>{S(a.location + b.location), S(a.weight * b.weight)});
  if constexpr (!ScalarTraits<S>::exact) {
    double total = 0;
    for (const auto& a : atoms) total += a.weight;
    for (auto& a : atoms) a.weight /= total;
  }
  return DiscreteMeasure<S>(std::move(atoms));
}

template <Scalar S>
MomentSequence<S> moments_of(const DiscreteMeasure<S>& mu, int order) {
  detail::check_moment_order(order);
  std::vector<S> m(static_cast<std::size_t>(order), S(0));
  for (const auto& a : mu.atoms()) {
    S x_power = a.weight;
    for (int n = 1; n <= order; ++n) {
      x_power *= a.location;
      m[n - 1] += x_power;
    }
  }
  return MomentSequence<S>(std::move(m));
}

template <Scalar S>
S variance(const DiscreteMeasure<S>& mu) {
  S m1 = mu.mean();
  S m2 = mu.expectation([](const S& x) { return S(x * x); });
  S v = m2 - m1 * m1;
  if constexpr (!ScalarTraits<S>::exact) v = std::max(v, 0.0);
  return v;
}

inline DiscreteMeasure<double> to_float(const DiscreteMeasure<Rational>& mu) {
  std::vector<Atom<double>> atoms;
  double total = 0;
  for (const auto& a : mu.atoms()) {
    atoms.push_back({a.location.convert_to<double>(), a.weight.convert_to<double>()});
    total += atoms.back().weight;
  }
  for (auto& a : atoms) a.weight /= total;
  return DiscreteMeasure<double>(std::move(atoms));
}

// JSON: {"atoms": [[location, weight], ...], "mode": "exact"|"float"}.
// Exact mode writes lossless strings (decimal when terminating, else "a/b").

template <Scalar S>
nlohmann::json to_json(const DiscreteMeasure<S>& mu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : mu.atoms()) {
    if constexpr (ScalarTraits<S>::exact)
      atoms.push_back({to_exact_string(a.location), to_exact_string(a.weight)});
    else
      atoms.push_back({a.location, a.weight});
  }
  return {{"atoms", atoms}, {"mode", ScalarTraits<S>::mode_name}};
}

namespace detail {

template <Scalar S>
S scalar_from_json(const nlohmann::json& v) {
  if constexpr (ScalarTraits<S>::exact) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long long>());
    throw ValidationError("exact-mode values must be decimal or fraction strings");
  } else {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_rational(v.get<std::string>()).convert_to<double>();
    throw ValidationError("float-mode values must be numbers");
  }
}

}  // namespace detail

/// Parses a measure; the document's mode must match S.
template <Scalar S>
DiscreteMeasure<S> measure_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("atoms") || !doc["atoms"].is_array())
    throw ValidationError("measure JSON needs an \"atoms\" array",
                          R"(expected {"atoms": [[location, weight], ...], "mode": "exact"|"float"})");
  const std::string mode = doc.value("mode", std::string(ScalarTraits<S>::mode_name));
  if (mode != ScalarTraits<S>::mode_name)
    throw ValidationError("measure mode '" + mode + "' does not match the requested '" +
                              ScalarTraits<S>::mode_name + "' mode",
                          "exact and float measures cannot be mixed");
  std::vector<Atom<S>> atoms;
  for (const auto& entry : doc["atoms"]) {
    if (!entry.is_array() || entry.size() != 2)
      throw ValidationError("each atom must be a [location, weight] pair");
    atoms.push_back({detail::scalar_from_json<S>(entry[0]), detail::scalar_from_json<S>(entry[1])});
  }
  return DiscreteMeasure<S>(std::move(atoms));
}

using AnyMeasure = std::variant<DiscreteMeasure<Rational>, DiscreteMeasure<double>>;

/// Parses either mode, dispatching on the "mode" field (default exact).
inline AnyMeasure any_measure_from_json(const nlohmann::json& doc) {
  if (doc.is_object() && doc.value("mode", std::string("exact")) == "float")
    return measure_from_json<double>(doc);
  return measure_from_json<Rational>(doc);
}

}  // namespace symvar
