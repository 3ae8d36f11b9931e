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

// Minimum second moment of a symmetrizer y of a trace-p projection e.
//
// Classical independence: the law of e+y is linear in the law of y, so over
// a fixed grid of atoms the problem is a linear program. Free and Boolean
// independence make the symmetry constraints polynomial in the weights and
// locations; there we run a penalized multi-start Nelder-Mead search.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "json.hpp"
#include "symvar/cumulants.hpp"
#include "symvar/errors.hpp"
#include "symvar/measures.hpp"
#include "symvar/nelder_mead.hpp"
#include "symvar/parallel.hpp"
#include "symvar/rational.hpp"
#include "symvar/simplex.hpp"

namespace symvar {

/// Candidate atoms lo, lo+step, ..., <= hi plus `must_include`.
struct GridSpec {
  Rational lo;
  Rational hi;
  Rational step;
  std::vector<Rational> must_include{Rational(-1), Rational(0)};

  static constexpr long kMaxPoints = 100000;

  void validate() const {
    if (!(lo < hi)) throw ValidationError("grid needs lo < hi", "grid syntax is lo:hi:step");
    if (!(step > 0)) throw ValidationError("grid step must be positive", "grid syntax is lo:hi:step");
    if (Rational((hi - lo) / step) > kMaxPoints)
      throw SizeError("grid has more than 1e5 points", "increase the step or shrink the range");
  }

  std::vector<Rational> points() const {
    validate();
    std::vector<Rational> pts;
    for (Rational t = lo; t <= hi; t += step) pts.push_back(t);
    pts.insert(pts.end(), must_include.begin(), must_include.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
  }

  /// "lo:hi:step".
  static GridSpec parse(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = text.find(':', start)) != std::string::npos; start = pos + 1)
      parts.push_back(text.substr(start, pos - start));
    parts.push_back(text.substr(start));
    if (parts.size() != 3) throw ValidationError("malformed grid '" + text + "'", "grid syntax is lo:hi:step");
    GridSpec g{parse_rational(parts[0]), parse_rational(parts[1]), parse_rational(parts[2])};
    g.validate();
    return g;
  }
};

/// Symmetry constraint used by the classical linear program: invariance of
/// the whole law of X+Y under t -> -t, or only vanishing odd moments of
/// orders 1, 3, ..., 2K+1.
struct ClassicalMode {
  bool exact_law = true;
  int relax_order = 0;

  static ClassicalMode ExactLaw() { return {true, 0}; }
  static ClassicalMode MomentRelax(int k) { return {false, k}; }
};

struct SearchConfig {
  int max_odd_order = 13;
  std::vector<double> penalty_weights{1e2, 1e4, 1e6, 1e8};
  int restarts = 32;
  int atom_budget = 6;
  std::uint64_t seed = 0;
  /// Run at p = 1/2 anyway; results are exploratory data only.
  bool allow_critical = false;
  std::size_t evaluations_per_stage = 6000;

  void validate() const {
    if (max_odd_order < 1 || max_odd_order > kMaxMomentOrder || max_odd_order % 2 == 0)
      throw ValidationError("max_odd_order must be odd and at most 13");
    if (penalty_weights.empty()) throw ValidationError("penalty schedule is empty");
    for (std::size_t i = 0; i < penalty_weights.size(); ++i) {
      if (!(penalty_weights[i] > 0)) throw ValidationError("penalty weights must be positive");
      if (i > 0 && !(penalty_weights[i] > penalty_weights[i - 1]))
        throw ValidationError("penalty schedule must be strictly increasing");
    }
    if (restarts < 1) throw ValidationError("restarts must be positive");
    if (atom_budget < 2 || atom_budget > 16) throw ValidationError("atom budget must lie in [2, 16]");
  }
};

enum class OptStatus { Optimal, Feasible, Infeasible };

inline std::string_view to_string(OptStatus s) {
  switch (s) {
    case OptStatus::Optimal: return "optimal";
    case OptStatus::Feasible: return "feasible";
    case OptStatus::Infeasible: return "infeasible";
  }
  return "?";
}

inline OptStatus parse_opt_status(std::string_view s) {
  if (s == "optimal") return OptStatus::Optimal;
  if (s == "feasible") return OptStatus::Feasible;
  if (s == "infeasible") return OptStatus::Infeasible;
  throw ValidationError("unknown optimization status '" + std::string(s) + "'");
}

/// Outcome of one start of the nonlinear search.
struct SearchRun {
  std::uint64_t seed = 0;
  bool seeded_start = false;
  double objective = 0;
  double residual = 0;
  friend bool operator==(const SearchRun&, const SearchRun&) = default;
};

/// objective: Var(Y) for the classical program, phi(y^2) for free/Boolean.
/// Both are recomputed from `measure`; residual is the odd-moment residual
/// of e+y at the solution.
template <Scalar S>
struct OptResult {
  S objective{};
  std::optional<DiscreteMeasure<S>> measure;
  S residual{};
  OptStatus status = OptStatus::Infeasible;
  std::vector<SearchRun> runs;
  friend bool operator==(const OptResult&, const OptResult&) = default;
};

namespace detail {

inline void check_open_unit(const Rational& p) {
  if (!(p > 0 && p < 1)) throw DomainError("p must lie in (0, 1)", "choose 0 < p < 1");
}

}  // namespace detail

/// Minimum of Var(Y) over laws on the grid such that X+Y is symmetric,
/// X ~ Bernoulli(p) independent of Y. The objective of the program is m_2(Y);
/// the order-1 symmetry constraint pins m_1(Y) = -p, so this is the same
/// minimizer, and the reported objective is the variance of the optimal law.
template <Scalar S = double>
OptResult<S> classical_min_variance(const Rational& p, const GridSpec& grid,
                                    ClassicalMode mode = ClassicalMode::ExactLaw()) {
  detail::check_open_unit(p);
  if (!mode.exact_law && (mode.relax_order < 0 || 2 * mode.relax_order + 1 > kMaxMomentOrder))
    throw ValidationError("moment relaxation order K must satisfy 2K+1 <= 13");
  const std::vector<Rational> points = grid.points();
  const std::size_t n = points.size();
  const Rational q = 1 - p;
  auto cast = [](const Rational& v) { return ScalarTraits<S>::from_rational(v); };

  std::vector<std::vector<S>> rows;
  std::vector<S> rhs;
  if (mode.exact_law) {
    // mass of X+Y at s: q w[s] + p w[s-1]
    std::map<Rational, std::vector<Rational>> mass;
    for (std::size_t j = 0; j < n; ++j) {
      auto& at_g = mass[points[j]];
      at_g.resize(n);
      at_g[j] += q;
      auto& at_g1 = mass[Rational(points[j] + 1)];
      at_g1.resize(n);
      at_g1[j] += p;
    }
    std::vector<Rational> support;
    for (const auto& [s, coef] : mass) support.push_back(abs_value(s));
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    for (const Rational& s : support) {
      if (s == 0) continue;
      std::vector<Rational> row(n);
      if (auto it = mass.find(s); it != mass.end())
        for (std::size_t j = 0; j < n; ++j) row[j] += it->second[j];
      if (auto it = mass.find(Rational(-s)); it != mass.end())
        for (std::size_t j = 0; j < n; ++j) row[j] -= it->second[j];
      if (std::all_of(row.begin(), row.end(), [](const Rational& v) { return v == 0; })) continue;
      std::vector<S> r;
      for (const auto& v : row) r.push_back(cast(v));
      rows.push_back(std::move(r));
      rhs.push_back(S(0));
    }
  } else {
    for (int k = 0; k <= mode.relax_order; ++k) {
      const unsigned order = static_cast<unsigned>(2 * k + 1);
      std::vector<S> r;
      for (const Rational& g : points) r.push_back(cast(Rational(q * power(g, order) + p * power(Rational(g + 1), order))));
      rows.push_back(std::move(r));
      rhs.push_back(S(0));
    }
  }
  rows.push_back(std::vector<S>(n, S(1)));
  rhs.push_back(S(1));
  std::vector<S> cost;
  for (const Rational& g : points) cost.push_back(cast(Rational(g * g)));

  const LpResult<S> lp = simplex_solve(cost, rows, rhs);
  OptResult<S> result;
  if (lp.status == LpStatus::Unbounded)
    throw InternalError("classical program reported unbounded; the objective is nonnegative on the simplex");
  if (lp.status == LpStatus::Infeasible) {
    result.status = OptStatus::Infeasible;
    return result;
  }
  std::vector<Atom<S>> atoms;
  S total(0);
  for (std::size_t j = 0; j < n; ++j) {
    S w = lp.x[j];
    if constexpr (!ScalarTraits<S>::exact) {
      if (w <= 1e-12) continue;
    }
    if (w == S(0)) continue;
    atoms.push_back({cast(points[j]), w});
    total += w;
  }
  if constexpr (!ScalarTraits<S>::exact)
    for (auto& a : atoms) a.weight /= total;
  DiscreteMeasure<S> y(std::move(atoms));
  const DiscreteMeasure<S> sum = classical_convolution(bernoulli(cast(p)), y);
  result.objective = variance(y);
  result.residual = odd_moment_residual(moments_of(sum, kMaxMomentOrder));
  result.measure = std::move(y);
  result.status = OptStatus::Optimal;
  return result;
}

namespace detail {

/// Allocation-free evaluation of the odd moments of e+y for a candidate y,
/// through kind-cumulant additivity.
class SymmetrizerObjective {
 public:
  SymmetrizerObjective(double p, IndependenceKind kind, int order)
      : kind_(kind), order_(order), polys_(moment_polynomials(kind, order)) {
    const auto e_cumulants = moments_to_cumulants(moments_of(bernoulli(p), order), kind);
    std::copy(e_cumulants.values().begin(), e_cumulants.values().end(), e_cumulants_.begin());
  }

  int order() const { return order_; }

  /// Sum over odd n <= order of m_n(e+y)^2; also returns phi(y^2).
  double odd_energy(const double* loc, const double* w, std::size_t atoms, double& second_moment) const {
    std::array<double, kMaxMomentOrder> m{}, k{};
    for (std::size_t i = 0; i < atoms; ++i) {
      double xp = w[i];
      for (int n = 0; n < order_; ++n) {
        xp *= loc[i];
        m[n] += xp;
      }
    }
    second_moment = order_ >= 2 ? m[1] : 0.0;
    // y cumulants, then add e's
    for (int n = 1; n <= order_; ++n)
      k[n - 1] = m[n - 1] - multi_block_sum<double>(polys_[n], std::span<const double>(k.data(), n - 1));
    for (int n = 0; n < order_; ++n) k[n] += e_cumulants_[n];
    double energy = 0;
    for (int n = 1; n <= order_; n += 2) {
      const double mn = k[n - 1] + multi_block_sum<double>(polys_[n], std::span<const double>(k.data(), n - 1));
      energy += mn * mn;
    }
    return energy;
  }

 private:
  IndependenceKind kind_;
  int order_;
  const MomentPolynomials& polys_;
  std::array<double, kMaxMomentOrder> e_cumulants_{};
};

inline constexpr double kLocationLow = -3.0;
inline constexpr double kLocationHigh = 2.0;

inline double to_location(double u) {
  return kLocationLow + (kLocationHigh - kLocationLow) / (1.0 + std::exp(-u));
}

inline double from_location(double x) {
  const double s = std::clamp((x - kLocationLow) / (kLocationHigh - kLocationLow), 1e-12, 1 - 1e-12);
  return std::log(s / (1 - s));
}

/// theta = (location logits, weight logits).
inline void decode(const std::vector<double>& theta, std::size_t atoms, double* loc, double* w) {
  double top = -HUGE_VAL;
  for (std::size_t i = 0; i < atoms; ++i) {
    loc[i] = to_location(theta[i]);
    top = std::max(top, theta[atoms + i]);
  }
  double total = 0;
  for (std::size_t i = 0; i < atoms; ++i) total += w[i] = std::exp(theta[atoms + i] - top);
  for (std::size_t i = 0; i < atoms; ++i) w[i] /= total;
}

inline DiscreteMeasure<double> decode_measure(const std::vector<double>& theta, std::size_t atoms) {
  std::vector<double> loc(atoms), w(atoms);
  decode(theta, atoms, loc.data(), w.data());
  std::vector<Atom<double>> out;
  for (std::size_t i = 0; i < atoms; ++i) out.push_back({loc[i], w[i]});
  return DiscreteMeasure<double>(std::move(out));
}

}  // namespace detail

/// Odd-moment residual of e+y, e ~ Bernoulli(p), in the given independence.
inline double symmetrizer_residual(double p, const DiscreteMeasure<double>& y, IndependenceKind kind, int order) {
  const auto sum = convolve_moments(moments_of(bernoulli(p), order), moments_of(y, order), kind);
  return odd_moment_residual(sum);
}

/// Minimizes phi(y^2) over laws y with at most cfg.atom_budget atoms in
/// [-3, 2] such that e+y is symmetric up to cfg.max_odd_order, for e a
/// projection of trace p freely or Boolean independent from y.
///
/// The penalty phi(y^2) + lambda * sum_odd m_n(e+y)^2 is minimized for each
/// lambda of the schedule in turn, warm-starting from the previous stage.
/// Starts: cfg.restarts random ones plus y = -e. Every start is reported in
/// `runs` so a caller can scan for counterexamples to the bound phi(y^2) >= p.
inline OptResult<double> nc_min_variance(double p, IndependenceKind kind, const SearchConfig& cfg = {}) {
  if (kind == IndependenceKind::Classical)
    throw ValidationError("nc_min_variance handles free and boolean independence",
                          "use classical_min_variance for the classical case");
  if (!(p > 0 && p < 1)) throw DomainError("p must lie in (0, 1)", "choose 0 < p < 1");
  if (p == 0.5 && !cfg.allow_critical) throw CriticalCase();
  cfg.validate();

  const std::size_t atoms = static_cast<std::size_t>(cfg.atom_budget);
  const detail::SymmetrizerObjective objective(p, kind, cfg.max_odd_order);
  constexpr double kFeasible = 1e-6;

  struct Candidate {
    SearchRun run;
    std::vector<double> theta;
  };

  auto search = [&](std::size_t index) -> Candidate {
    const bool seeded = index == 0;
    const std::uint64_t seed = derive_seed(cfg.seed, index);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(detail::kLocationLow, detail::kLocationHigh);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> theta(2 * atoms);
    for (std::size_t i = 0; i < atoms; ++i) {
      theta[i] = detail::from_location(uniform(rng));
      theta[atoms + i] = normal(rng);
    }
    if (seeded) {
      // y = -e: atoms -1 (weight p) and 0 (weight q); spares carry ~1e-11.
      theta[0] = detail::from_location(-1.0);
      theta[1] = detail::from_location(0.0);
      theta[atoms] = std::log(p);
      theta[atoms + 1] = std::log(1 - p);
      for (std::size_t i = 2; i < atoms; ++i) theta[atoms + i] = -25.0;
    }

    for (double lambda : cfg.penalty_weights) {
      auto penalized = [&](const std::vector<double>& th) {
        std::array<double, 16> loc{}, w{};
        detail::decode(th, atoms, loc.data(), w.data());
        double second = 0;
        const double energy = objective.odd_energy(loc.data(), w.data(), atoms, second);
        return second + lambda * energy;
      };
      NelderMeadOptions opt;
      opt.max_evaluations = cfg.evaluations_per_stage / 2;
      opt.initial_step = seeded ? 0.05 : 0.5;
      auto first = nelder_mead(penalized, theta, opt);
      opt.initial_step *= 0.1;
      auto second = nelder_mead(penalized, first.x, opt);
      theta = second.value <= first.value ? second.x : first.x;
    }

    Candidate c;
    c.theta = theta;
    const auto y = detail::decode_measure(theta, atoms);
    c.run.seed = seed;
    c.run.seeded_start = seeded;
    c.run.objective = y.expectation([](double x) { return x * x; });
    c.run.residual = symmetrizer_residual(p, y, kind, cfg.max_odd_order);
    return c;
  };

  auto candidates = parallel_map(static_cast<std::size_t>(cfg.restarts) + 1, search);

  // The unrefined start y = -e is itself a candidate.
  {
    Candidate exact;
    exact.run.seed = derive_seed(cfg.seed, 0);
    exact.run.seeded_start = true;
    const auto y = negate(bernoulli(p));
    exact.run.objective = y.expectation([](double x) { return x * x; });
    exact.run.residual = symmetrizer_residual(p, y, kind, cfg.max_odd_order);
    candidates.push_back(std::move(exact));
  }

  std::size_t best = 0;
  auto rank = [&](const Candidate& c) {
    return std::make_tuple(c.run.residual < kFeasible ? 0 : 1, c.run.objective, c.run.residual);
  };
  for (std::size_t i = 1; i < candidates.size(); ++i)
    if (rank(candidates[i]) < rank(candidates[best])) best = i;

  OptResult<double> result;
  for (const auto& c : candidates) result.runs.push_back(c.run);
  const bool best_is_plain_seed = best + 1 == candidates.size();
  DiscreteMeasure<double> y = best_is_plain_seed ? negate(bernoulli(p)) : detail::decode_measure(candidates[best].theta, atoms);
  result.objective = y.expectation([](double x) { return x * x; });
  result.residual = symmetrizer_residual(p, y, kind, cfg.max_odd_order);
  result.status = result.residual < kFeasible ? OptStatus::Optimal : OptStatus::Feasible;
  result.measure = std::move(y);
  return result;
}

// JSON: {"objective", "status", "residual", "measure", "runs"}; exact results
// carry decimal strings plus an "exact" companion object.

template <Scalar S>
nlohmann::json to_json(const OptResult<S>& r) {
  nlohmann::json doc;
  if (r.status == OptStatus::Infeasible) {
    doc["objective"] = nullptr;
    doc["residual"] = nullptr;
  } else if constexpr (ScalarTraits<S>::exact) {
    doc["objective"] = to_decimal_string(r.objective);
    doc["residual"] = to_decimal_string(r.residual);
    doc["exact"] = {{"objective", to_fraction_string(r.objective)}, {"residual", to_fraction_string(r.residual)}};
  } else {
    doc["objective"] = r.objective;
    doc["residual"] = r.residual;
  }
  doc["status"] = std::string(to_string(r.status));
  doc["measure"] = r.measure ? to_json(*r.measure) : nlohmann::json(nullptr);
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : r.runs)
    runs.push_back({{"seed", run.seed}, {"seeded_start", run.seeded_start}, {"objective", run.objective}, {"residual", run.residual}});
  doc["runs"] = runs;
  return doc;
}

template <Scalar S>
OptResult<S> opt_result_from_json(const nlohmann::json& doc) {
  try {
    OptResult<S> r;
    r.status = parse_opt_status(doc.at("status").get<std::string>());
    if (r.status == OptStatus::Infeasible) {
    } else if constexpr (ScalarTraits<S>::exact) {
      r.objective = parse_rational(doc.at("exact").at("objective").get<std::string>());
      r.residual = parse_rational(doc.at("exact").at("residual").get<std::string>());
    } else {
      r.objective = doc.at("objective").get<double>();
      r.residual = doc.at("residual").get<double>();
    }
    if (!doc.at("measure").is_null()) r.measure = measure_from_json<S>(doc.at("measure"));
    for (const auto& run : doc.value("runs", nlohmann::json::array()))
      r.runs.push_back({run.at("seed").get<std::uint64_t>(), run.at("seeded_start").get<bool>(),
                        run.at("objective").get<double>(), run.at("residual").get<double>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed optimization result: ") + e.what());
  }
}

}  // namespace symvar
