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

// Dense two-phase tableau simplex for
//
//     minimize c.x  subject to  A x = b,  x >= 0
//
// with Bland's rule (lowest-index entering column, lowest-index leaving basic
// variable among ratio ties), which guarantees termination. Runs exactly for
// Rational and with a 1e-9 feasibility tolerance in double.

#pragma once

#include <cmath>
#include <cstddef>
#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "symvar/errors.hpp"
#include "symvar/rational.hpp"

namespace symvar {

enum class LpStatus { Optimal, Infeasible, Unbounded };

inline std::string_view to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

template <Scalar S>
struct LpResult {
  std::vector<S> x;
  S value{};
  LpStatus status = LpStatus::Infeasible;
  std::size_t pivots = 0;
};

template <Scalar S>
struct LpTolerance {
  static S value() {
    if constexpr (ScalarTraits<S>::exact)
      return S(0);
    else
      return 1e-9;
  }
};

inline constexpr std::size_t kMaxSimplexColumns = 100000;

template <Scalar S>
LpResult<S> simplex_solve(const std::vector<S>& c, const std::vector<std::vector<S>>& a_eq,
                          const std::vector<S>& b_eq) {
  const std::size_t m = a_eq.size();
  const std::size_t n = c.size();
  if (b_eq.size() != m) throw ValidationError("constraint matrix and right-hand side disagree in size");
  if (n == 0) throw ValidationError("linear program has no variables");
  if (n > kMaxSimplexColumns) throw SizeError("linear program has more than 1e5 columns");
  for (const auto& row : a_eq)
    if (row.size() != n) throw ValidationError("constraint row length differs from objective length");
  if constexpr (!ScalarTraits<S>::exact) {
    auto finite = [](double v) { return std::isfinite(v); };
    for (double v : c) if (!finite(v)) throw ValidationError("non-finite objective coefficient");
    for (double v : b_eq) if (!finite(v)) throw ValidationError("non-finite right-hand side");
    for (const auto& row : a_eq)
      for (double v : row) if (!finite(v)) throw ValidationError("non-finite constraint coefficient");
  }
  const S eps = LpTolerance<S>::value();

  // Columns: n structural, m artificial, then the right-hand side.
  const std::size_t width = n + m + 1;
  const std::size_t rhs = n + m;
  std::vector<std::vector<S>> t(m, std::vector<S>(width, S(0)));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    const bool flip = b_eq[i] < S(0);
    for (std::size_t j = 0; j < n; ++j) t[i][j] = flip ? S(-a_eq[i][j]) : a_eq[i][j];
    t[i][rhs] = flip ? S(-b_eq[i]) : b_eq[i];
    t[i][n + i] = S(1);
    basis[i] = n + i;
  }

  LpResult<S> result;
  std::vector<S> reduced(width, S(0));

  auto pivot = [&](std::size_t row, std::size_t col) {
    const S scale = t[row][col];
    for (auto& v : t[row]) v /= scale;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || t[i][col] == S(0)) continue;
      const S f = t[i][col];
      for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[row][j];
    }
    if (reduced[col] != S(0)) {
      const S f = reduced[col];
      for (std::size_t j = 0; j < width; ++j) reduced[j] -= f * t[row][j];
    }
    basis[row] = col;
    ++result.pivots;
  };

  // Returns false if unbounded.
  auto run = [&](std::size_t allowed_columns) {
    const std::size_t cap = 50 * (width + m) + 10000;
    for (std::size_t iter = 0;; ++iter) {
      if (iter > cap) throw InternalError("simplex exceeded its pivot budget");
      std::size_t enter = allowed_columns;
      for (std::size_t j = 0; j < allowed_columns; ++j)
        if (reduced[j] < S(-eps)) {
          enter = j;
          break;
        }
      if (enter == allowed_columns) return true;
      std::size_t leave = m;
      S best_ratio{};
      for (std::size_t i = 0; i < m; ++i) {
        if (!(t[i][enter] > eps)) continue;
        S ratio = t[i][rhs] / t[i][enter];
        if (leave == m || ratio < best_ratio || (ratio == best_ratio && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m) return false;
      pivot(leave, enter);
    }
  };

  // Phase 1: minimize the sum of artificials.
  for (std::size_t j = 0; j < width; ++j) {
    if (j >= n && j < rhs) continue;
    S sum(0);
    for (std::size_t i = 0; i < m; ++i) sum += t[i][j];
    reduced[j] = -sum;
  }
  run(n);
  S infeasibility(0);
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] >= n) infeasibility += t[i][rhs];
  if (infeasibility > eps * S(double(m + 1))) {
    result.status = LpStatus::Infeasible;
    return result;
  }
  // Drive zero-level artificials out of the basis where possible; rows that
  // stay artificial are redundant and have no structural entries.
  for (std::size_t i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (abs_value(t[i][j]) > eps) {
        pivot(i, j);
        break;
      }
  }

  // Phase 2.
  for (std::size_t j = 0; j < width; ++j) {
    S r = j < n ? c[j] : S(0);
    for (std::size_t i = 0; i < m; ++i)
      if (basis[i] < n) r -= c[basis[i]] * t[i][j];
    reduced[j] = r;
  }
  if (!run(n)) {
    result.status = LpStatus::Unbounded;
    return result;
  }

  result.x.assign(n, S(0));
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) result.x[basis[i]] = t[i][rhs];
  if constexpr (!ScalarTraits<S>::exact)
    for (double& v : result.x) v = std::max(v, 0.0);
  result.value = S(0);
  for (std::size_t j = 0; j < n; ++j) result.value += c[j] * result.x[j];
  result.status = LpStatus::Optimal;
  return result;
}

}  // namespace symvar
