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

// Moment <-> cumulant transforms for classical, free and Boolean
// independence, and additive convolution through cumulant additivity.
//
// For every kind the moments are
//
//     m_n = sum over partitions pi of {1..n} in the kind's lattice of
//           prod over blocks B of pi of k_|B|
//
// which only depends on the block-size multiset of pi, so each order is a
// short polynomial read off block_type_table(). Inversion peels off the
// single-block term, whose coefficient is always 1.

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "symvar/errors.hpp"
#include "symvar/partitions.hpp"
#include "symvar/rational.hpp"

namespace symvar {

inline constexpr int kMaxMomentOrder = 13;

namespace detail {

inline void check_moment_order(int order) {
  if (order < 1 || order > kMaxMomentOrder)
    throw SizeError("moment order " + std::to_string(order) + " outside [1, " +
                        std::to_string(kMaxMomentOrder) + "]",
                    "orders above 13 are not supported");
}

}  // namespace detail

/// Moments m_1..m_N of a law; m_0 = 1 is implicit.
template <Scalar S>
class MomentSequence {
 public:
  explicit MomentSequence(std::vector<S> values) : values_(std::move(values)) {
    detail::check_moment_order(order());
  }

  int order() const noexcept { return static_cast<int>(values_.size()); }

  /// m_n for 0 <= n <= order().
  S operator[](int n) const {
    if (n == 0) return S(1);
    return values_.at(static_cast<std::size_t>(n - 1));
  }

  std::span<const S> values() const noexcept { return values_; }

  friend bool operator==(const MomentSequence&, const MomentSequence&) = default;

 private:
  std::vector<S> values_;
};

/// Cumulants k_1..k_N of one independence kind.
template <Scalar S>
class CumulantSequence {
 public:
  CumulantSequence(IndependenceKind kind, std::vector<S> values)
      : kind_(kind), values_(std::move(values)) {
    detail::check_moment_order(order());
  }

  IndependenceKind kind() const noexcept { return kind_; }
  int order() const noexcept { return static_cast<int>(values_.size()); }
  const S& operator[](int n) const { return values_.at(static_cast<std::size_t>(n - 1)); }
  std::span<const S> values() const noexcept { return values_; }

  friend bool operator==(const CumulantSequence&, const CumulantSequence&) = default;

 private:
  IndependenceKind kind_;
  std::vector<S> values_;
};

namespace detail {

struct MomentTerm {
  double weight = 0;     // count as double, exact below 2^53
  std::uint64_t count = 0;
  std::array<std::uint8_t, kMaxMomentOrder> sizes{};
  std::uint8_t blocks = 0;
};

/// Per-order term lists without the single-block term.
using MomentPolynomials = std::array<std::vector<MomentTerm>, kMaxMomentOrder + 1>;

inline const MomentPolynomials& moment_polynomials(IndependenceKind kind, int order) {
  static std::mutex mutex;
  static std::array<MomentPolynomials, 3> polys;
  static std::array<int, 3> built{0, 0, 0};
  const auto slot = static_cast<std::size_t>(kind);
  std::lock_guard lock(mutex);
  for (int n = built[slot] + 1; n <= order; ++n) {
    for (const BlockType& t : block_type_table(n, kind)) {
      if (t.sizes.size() == 1) continue;
      MomentTerm term;
      term.count = t.count;
      term.weight = static_cast<double>(t.count);
      term.blocks = static_cast<std::uint8_t>(t.sizes.size());
      std::copy(t.sizes.begin(), t.sizes.end(), term.sizes.begin());
      polys[slot][n].push_back(term);
    }
    built[slot] = n;
  }
  return polys[slot];
}

template <Scalar S>
S term_coefficient(const MomentTerm& term) {
  if constexpr (ScalarTraits<S>::exact)
    return S(term.count);
  else
    return term.weight;
}

/// Sum over multi-block terms of order n, given k_1..k_{n-1}.
template <Scalar S>
S multi_block_sum(const std::vector<MomentTerm>& terms, std::span<const S> k) {
  S total(0);
  for (const MomentTerm& term : terms) {
    S product = term_coefficient<S>(term);
    for (std::uint8_t b = 0; b < term.blocks; ++b) product *= k[term.sizes[b] - 1];
    total += product;
  }
  return total;
}

}  // namespace detail

template <Scalar S>
CumulantSequence<S> moments_to_cumulants(const MomentSequence<S>& m, IndependenceKind kind) {
  const int order = m.order();
  const auto& polys = detail::moment_polynomials(kind, order);
  std::vector<S> k(static_cast<std::size_t>(order));
  for (int n = 1; n <= order; ++n)
    k[n - 1] = m[n] - detail::multi_block_sum<S>(polys[n], std::span<const S>(k.data(), n - 1));
  return CumulantSequence<S>(kind, std::move(k));
}

template <Scalar S>
MomentSequence<S> cumulants_to_moments(const CumulantSequence<S>& k) {
  const int order = k.order();
  const auto& polys = detail::moment_polynomials(k.kind(), order);
  std::vector<S> m(static_cast<std::size_t>(order));
  for (int n = 1; n <= order; ++n) m[n - 1] = k[n] + detail::multi_block_sum<S>(polys[n], k.values());
  return MomentSequence<S>(std::move(m));
}

/// Moments of X+Y for X, Y independent in the given sense.
template <Scalar S>
MomentSequence<S> convolve_moments(const MomentSequence<S>& x, const MomentSequence<S>& y,
                                   IndependenceKind kind) {
  if (x.order() != y.order())
    throw ValidationError("cannot convolve moment sequences of orders " + std::to_string(x.order()) +
                              " and " + std::to_string(y.order()),
                          "truncate both laws to the same order");
  auto kx = moments_to_cumulants(x, kind);
  auto ky = moments_to_cumulants(y, kind);
  std::vector<S> sum(kx.values().begin(), kx.values().end());
  for (int n = 1; n <= x.order(); ++n) sum[n - 1] += ky[n];
  return cumulants_to_moments(CumulantSequence<S>(kind, std::move(sum)));
}

/// max over odd n <= order of |m_n|; zero iff the law is symmetric to the
/// truncation order.
template <Scalar S>
S odd_moment_residual(const MomentSequence<S>& m) {
  S worst(0);
  for (int n = 1; n <= m.order(); n += 2) {
    S a = abs_value(m[n]);
    if (a > worst) worst = a;
  }
  return worst;
}

}  // namespace symvar
