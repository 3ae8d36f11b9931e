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

// The odd dual function behind the symmetrizer variance bound phi(y^2) >= p.
//
// h is the continuous triangle wave with h(t) = t on [-1/2, 1/2] and
// h(t+1) = -h(t). With q = 1-p,
//
//     psi(t) = h(t) / (q - p) - t
//
// is odd and satisfies q psi(t) + p psi(1+t) = h(t) - t - p identically, so
// the dual inequality q psi(t) + p psi(1+t) <= t^2 - p is equivalent to the
// p-free statement h(t) <= t(t+1). That one is checked here exactly by a
// finite case analysis over the linear pieces of h.

#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "symvar/errors.hpp"
#include "symvar/measures.hpp"
#include "symvar/rational.hpp"

namespace symvar {

/// Rejects p outside (0,1) and the critical p = 1/2.
template <Scalar S>
void check_certificate_parameter(const S& p) {
  if (!(p > S(0) && p < S(1)))
    throw DomainError("certificate parameter p must lie in (0, 1)", "choose 0 < p < 1, p != 1/2");
  if (p * 2 == S(1)) throw CriticalCase();
}

/// Continuous triangle wave: h(t) = t on [-1/2, 1/2], h(t+1) = -h(t).
template <Scalar S>
S sawtooth(const S& t) {
  if constexpr (!ScalarTraits<S>::exact) {
    if (!std::isfinite(t)) throw DomainError("sawtooth needs a finite argument");
  }
  const S half = S(1) / 2;
  // t - 2k lies in [-1/2, 3/2)
  S k = floor_value(S((t + half) / 2));
  S r = t - 2 * k;
  if (r <= half) return r;
  return S(1 - r);
}

template <Scalar S>
S psi(const S& t, const S& p) {
  check_certificate_parameter(p);
  const S q = 1 - p;
  return S(sawtooth(t) / (q - p) - t);
}

/// q psi(t) + p psi(1+t).
template <Scalar S>
S dual_combination(const S& t, const S& p) {
  const S q = 1 - p;
  return S(q * psi(t, p) + p * psi(S(t + 1), p));
}

/// Right-hand side of the dual inequality, t^2 - p.
template <Scalar S>
S dual_bound(const S& t, const S& p) {
  return S(t * t - p);
}

/// q psi(t) + p psi(1+t) == h(t) - t - p at every grid point: exactly for
/// Rational, within 1e-12 for double.
template <Scalar S>
bool verify_identity(const S& p, std::span<const S> grid) {
  check_certificate_parameter(p);
  for (const S& t : grid) {
    S lhs = dual_combination(t, p);
    S rhs = sawtooth(t) - t - p;
    if (abs_value(S(lhs - rhs)) > ScalarTraits<S>::tolerance()) return false;
  }
  return true;
}

/// Affine function slope * t + intercept, exact.
struct AffinePiece {
  Rational slope;
  Rational intercept;
  Rational operator()(const Rational& t) const { return slope * t + intercept; }
  friend bool operator==(const AffinePiece&, const AffinePiece&) = default;
};

/// h restricted to [k - 1/2, k + 1/2]: (-1)^k (t - k).
inline AffinePiece sawtooth_piece(long k) {
  Rational sign = (k % 2 == 0) ? 1 : -1;
  return {sign, Rational(-sign * k)};
}

/// Index k of the piece [k - 1/2, k + 1/2] met when leaving t to the right
/// (`from_left` = false) or arriving at t from the left.
inline long sawtooth_piece_index(const Rational& t, bool from_left) {
  const Rational half(1, 2);
  if (from_left) return -floor_value(Rational(half - t)).convert_to<long>();  // ceil(t - 1/2)
  return floor_value(Rational(t + half)).convert_to<long>();
}

/// One-sided derivatives (left, right) of h at t.
inline std::pair<Rational, Rational> sawtooth_slopes(const Rational& t) {
  return {sawtooth_piece(sawtooth_piece_index(t, true)).slope,
          sawtooth_piece(sawtooth_piece_index(t, false)).slope};
}

enum class CertificateMode { Grid, Exact };

inline std::string_view to_string(CertificateMode mode) {
  return mode == CertificateMode::Exact ? "exact" : "grid";
}

struct Witness {
  Rational t;
  Rational lhs;  // q psi(t) + p psi(1+t)
  Rational rhs;  // t^2 - p
  friend bool operator==(const Witness&, const Witness&) = default;
};

/// Result of checking the dual inequality. max_slack_violation is
/// sup_t [q psi(t) + p psi(1+t) - (t^2 - p)]; positive means violated. In
/// exact mode it is a bound over all real t, in grid mode a sample maximum.
struct CertificateReport {
  Rational p;
  CertificateMode mode = CertificateMode::Exact;
  Rational max_slack_violation;
  std::vector<Witness> witnesses;
  bool identity_ok = false;
  friend bool operator==(const CertificateReport&, const CertificateReport&) = default;
};

namespace detail {

/// Composition f(t + shift) of an affine piece.
inline AffinePiece shifted(const AffinePiece& f, const Rational& shift) {
  return {f.slope, f.slope * shift + f.intercept};
}

/// Symbolic identity check on the pieces k in [-span, span]: the affine form
/// of q psi(t) + p psi(1+t) must coincide with that of h(t) - t - p. The
/// pattern of pieces has period 2 so a few periods cover the real line.
inline bool identity_holds_piecewise(const Rational& p, long span = 4) {
  const Rational q = 1 - p;
  const Rational scale = 1 / (q - p);
  for (long k = -span; k <= span; ++k) {
    const Rational half(1, 2);
    const AffinePiece h = sawtooth_piece(k);
    // t in piece k puts 1+t in piece k+1.
    const AffinePiece h_next = shifted(sawtooth_piece(k + 1), Rational(1));
    const AffinePiece psi_t{h.slope * scale - 1, h.intercept * scale};
    const AffinePiece psi_next{h_next.slope * scale - 1, h_next.intercept * scale - 1};
    const AffinePiece combo{q * psi_t.slope + p * psi_next.slope,
                            q * psi_t.intercept + p * psi_next.intercept};
    const AffinePiece target{h.slope - 1, h.intercept - p};
    if (!(combo == target)) return false;
    // the closed-form pieces must agree with sawtooth() itself
    for (const Rational& t : {Rational(k) - half, Rational(k), Rational(k) + half / 2})
      if (h(t) != sawtooth(t)) return false;
  }
  return true;
}

inline std::vector<Rational> rational_grid(const Rational& lo, const Rational& hi, const Rational& step) {
  if (!(step > 0) || !(lo <= hi)) throw ValidationError("invalid grid bounds");
  std::vector<Rational> grid;
  for (Rational t = lo; t <= hi; t += step) grid.push_back(t);
  return grid;
}

}  // namespace detail

/// Proves h(t) <= t(t+1) for every real t, and hence the dual inequality.
///
/// Outside [-3/2, 1/2] the parabola is at least 3/4 while |h| <= 1/2. Inside,
/// h has finitely many affine pieces and the gap h(t) - t(t+1) is a concave
/// quadratic on each, maximized at its vertex or at a piece endpoint.
inline CertificateReport verify_inequality_exact(const Rational& p) {
  check_certificate_parameter(p);
  const Rational half(1, 2);
  const Rational lo(-3, 2), hi(1, 2);
  auto parabola = [](const Rational& t) { return Rational(t * (t + 1)); };

  // Parabola decreases left of -1/2 and increases right of it.
  const Rational outside_sup = half - std::min(parabola(lo), parabola(hi));

  struct Candidate {
    Rational t, gap;
  };
  std::vector<Candidate> candidates;
  const long first = sawtooth_piece_index(lo, false);
  const long last = sawtooth_piece_index(hi, true);
  for (long k = first; k <= last; ++k) {
    const AffinePiece h = sawtooth_piece(k);
    const Rational a = std::max(Rational(Rational(k) - half), lo);
    const Rational b = std::min(Rational(Rational(k) + half), hi);
    // gap(t) = slope*t + intercept - t^2 - t, vertex at (slope - 1)/2
    Rational vertex = (h.slope - 1) / 2;
    vertex = std::clamp(vertex, a, b);
    for (const Rational& t : {a, b, vertex}) candidates.push_back({t, Rational(h(t) - parabola(t))});
  }

  Rational worst = outside_sup;
  for (const auto& c : candidates) worst = std::max(worst, c.gap);

  CertificateReport report;
  report.p = p;
  report.mode = CertificateMode::Exact;
  report.max_slack_violation = worst;
  std::vector<Rational> witness_points;
  for (const auto& c : candidates)
    if (c.gap == worst) witness_points.push_back(c.t);
  std::sort(witness_points.begin(), witness_points.end());
  witness_points.erase(std::unique(witness_points.begin(), witness_points.end()), witness_points.end());
  for (const Rational& t : witness_points)
    report.witnesses.push_back({t, dual_combination(t, p), dual_bound(t, p)});

  const auto samples = detail::rational_grid(Rational(-5), Rational(5), Rational(1, 8));
  report.identity_ok = detail::identity_holds_piecewise(p) &&
                       verify_identity<Rational>(p, std::span<const Rational>(samples));
  return report;
}

/// Sampled check of the dual inequality on lo, lo+step, ..., <= hi. Runs
/// exactly for Rational and in double otherwise; `worst` witnesses kept.
template <Scalar S>
CertificateReport verify_inequality_grid(const S& p, const S& lo, const S& hi, const S& step,
                                         std::size_t worst = 5) {
  check_certificate_parameter(p);
  if (!(step > S(0)) || !(lo < hi)) throw ValidationError("grid needs lo < hi and step > 0");
  if (S((hi - lo) / step) > S(1e7)) throw SizeError("grid has more than 1e7 points");
  struct Sample {
    S t, lhs, rhs, slack;
  };
  std::vector<Sample> samples;
  std::vector<S> grid;
  const auto count = static_cast<long>(ScalarTraits<S>::to_double(S((hi - lo) / step)) + 1e-7);
  for (long i = 0; i <= count; ++i) {
    S t = lo + step * S(i);
    if (t > hi) t = hi;  // float rounding on the last step
    grid.push_back(t);
    S lhs = dual_combination(t, p);
    S rhs = dual_bound(t, p);
    samples.push_back({t, lhs, rhs, S(lhs - rhs)});
  }
  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    if (a.slack != b.slack) return a.slack > b.slack;
    return a.t < b.t;
  });
  CertificateReport report;
  report.p = Rational(p);
  report.mode = CertificateMode::Grid;
  report.max_slack_violation = Rational(samples.front().slack);
  for (std::size_t i = 0; i < std::min(worst, samples.size()); ++i)
    report.witnesses.push_back({Rational(samples[i].t), Rational(samples[i].lhs), Rational(samples[i].rhs)});
  report.identity_ok = verify_identity<S>(p, std::span<const S>(grid));
  return report;
}

/// D(y) = phi(y^2) - p - [q phi(psi(y)) + p phi(psi(1+y))], evaluated atomwise.
/// Nonnegative for every law by the pointwise inequality, so phi(y^2) >= p
/// whenever the bracket vanishes.
template <Scalar S>
S certificate_lower_bound(const DiscreteMeasure<S>& y, const S& p) {
  check_certificate_parameter(p);
  const S q = 1 - p;
  const S second = y.expectation([](const S& x) { return S(x * x); });
  const S dual = y.expectation([&](const S& x) { return S(q * psi(x, p) + p * psi(S(x + 1), p)); });
  return S(second - p - dual);
}

// JSON: {"p", "mode", "max_slack_violation", "witnesses": [{"t","lhs","rhs"}],
// "identity_ok", "exact": {"p": "a/b", "max_slack_violation": "a/b"}}

inline nlohmann::json to_json(const CertificateReport& r) {
  nlohmann::json witnesses = nlohmann::json::array();
  for (const auto& w : r.witnesses)
    witnesses.push_back({{"t", to_exact_string(w.t)}, {"lhs", to_exact_string(w.lhs)}, {"rhs", to_exact_string(w.rhs)}});
  return {{"p", to_decimal_string(r.p)},
          {"mode", std::string(to_string(r.mode))},
          {"max_slack_violation", to_decimal_string(r.max_slack_violation)},
          {"witnesses", witnesses},
          {"identity_ok", r.identity_ok},
          {"exact",
           {{"p", to_fraction_string(r.p)}, {"max_slack_violation", to_fraction_string(r.max_slack_violation)}}}};
}

inline CertificateReport certificate_report_from_json(const nlohmann::json& doc) {
  try {
    CertificateReport r;
    const auto& exact = doc.at("exact");
    r.p = parse_rational(exact.at("p").get<std::string>());
    r.max_slack_violation = parse_rational(exact.at("max_slack_violation").get<std::string>());
    const std::string mode = doc.at("mode").get<std::string>();
    if (mode != "exact" && mode != "grid") throw ValidationError("unknown certificate mode '" + mode + "'");
    r.mode = mode == "exact" ? CertificateMode::Exact : CertificateMode::Grid;
    for (const auto& w : doc.at("witnesses"))
      r.witnesses.push_back({parse_rational(w.at("t").get<std::string>()), parse_rational(w.at("lhs").get<std::string>()),
                             parse_rational(w.at("rhs").get<std::string>())});
    r.identity_ok = doc.at("identity_ok").get<bool>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed certificate report: ") + e.what());
  }
}

}  // namespace symvar
