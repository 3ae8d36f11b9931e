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


#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "oracles/oracles.hpp"
#include "symvar/partitions.hpp"

using symvar::IndependenceKind;
using symvar::Partition;

namespace {

std::set<Partition> as_set(const std::vector<Partition>& v) { return {v.begin(), v.end()}; }

std::set<Partition> oracle_set(int n, IndependenceKind kind) {
  std::set<Partition> out;
  for (auto& blocks : oracle::all_set_partitions(n)) {
    if (kind == IndependenceKind::Free && oracle::crossing(blocks)) continue;
    if (kind == IndependenceKind::Boolean && !oracle::all_blocks_consecutive(blocks)) continue;
    out.insert(Partition(n, blocks));
  }
  return out;
}

}  // namespace

TEST_CASE("singleton has one partition in every lattice") {
  for (auto kind : symvar::kAllKinds) {
    auto parts = symvar::enumerate(1, kind);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0] == Partition(1, {{1}}));
  }
}

TEST_CASE("small lattice sizes") {
  CHECK(symvar::enumerate(4, IndependenceKind::Classical).size() == 15);
  CHECK(symvar::enumerate(4, IndependenceKind::Free).size() == 14);
  CHECK(symvar::enumerate(4, IndependenceKind::Boolean).size() == 8);
  auto free4 = as_set(symvar::enumerate(4, IndependenceKind::Free));
  CHECK_FALSE(free4.count(Partition(4, {{1, 3}, {2, 4}})));
}

TEST_CASE("crossing and interval predicates") {
  CHECK_FALSE(symvar::is_noncrossing(Partition(4, {{1, 3}, {2, 4}})));
  CHECK(symvar::is_noncrossing(Partition(4, {{1, 4}, {2, 3}})));
  CHECK(symvar::is_noncrossing(Partition(4, {{1, 2, 3, 4}})));
  CHECK(symvar::is_interval(Partition(4, {{1, 2}, {3, 4}})));
  CHECK_FALSE(symvar::is_interval(Partition(4, {{1, 3}, {2}, {4}})));
  CHECK(symvar::is_interval(Partition(4, {{1}, {2}, {3}, {4}})));
}

TEST_CASE("enumeration matches brute force and the counting formulas") {
  for (int n = 1; n <= 10; ++n) {
    INFO("n = " << n);
    const auto classical = as_set(symvar::enumerate(n, IndependenceKind::Classical));
    const auto free = as_set(symvar::enumerate(n, IndependenceKind::Free));
    const auto boolean = as_set(symvar::enumerate(n, IndependenceKind::Boolean));
    CHECK(classical.size() == oracle::bell(n));
    CHECK(free.size() == oracle::catalan(n));
    CHECK(boolean.size() == (std::uint64_t{1} << (n - 1)));
    CHECK(symvar::count_partitions(n, IndependenceKind::Free) == oracle::catalan(n));
    if (n <= 8) {
      CHECK(classical == oracle_set(n, IndependenceKind::Classical));
      CHECK(free == oracle_set(n, IndependenceKind::Free));
      CHECK(boolean == oracle_set(n, IndependenceKind::Boolean));
    }
    CHECK(std::includes(free.begin(), free.end(), boolean.begin(), boolean.end()));
    CHECK(std::includes(classical.begin(), classical.end(), free.begin(), free.end()));
  }
}

TEST_CASE("enumerated partitions satisfy their lattice predicate") {
  for (auto kind : symvar::kAllKinds)
    for (const auto& part : symvar::enumerate(7, kind)) CHECK(symvar::in_lattice(part, kind));
}

TEST_CASE("odd ground sets force an odd block") {
  for (int n = 1; n <= 9; n += 2)
    for (const auto& part : symvar::enumerate(n, IndependenceKind::Classical)) {
      const auto sizes = part.block_sizes();
      CHECK(std::any_of(sizes.begin(), sizes.end(), [](int s) { return s % 2 == 1; }));
    }
}

TEST_CASE("block type tables sum to the lattice size") {
  for (auto kind : symvar::kAllKinds)
    for (int n = 1; n <= 12; ++n) {
      std::uint64_t total = 0;
      for (const auto& t : symvar::block_type_table(n, kind)) {
        int sum = 0;
        for (int s : t.sizes) sum += s;
        CHECK(sum == n);
        total += t.count;
      }
      CHECK(total == symvar::count_partitions(n, kind));
    }
}

TEST_CASE("partition validation") {
  CHECK_THROWS_AS(Partition(3, {{1, 2}}), symvar::ValidationError);
  CHECK_THROWS_AS(Partition(3, {{1, 2}, {2, 3}}), symvar::ValidationError);
  CHECK_THROWS_AS(Partition(3, {{1, 2}, {}, {3}}), symvar::ValidationError);
  CHECK_THROWS_AS(Partition(2, {{1, 3}}), symvar::ValidationError);
  CHECK_THROWS_AS(symvar::enumerate(0, IndependenceKind::Free), symvar::SizeError);
  CHECK_THROWS_AS(symvar::enumerate(15, IndependenceKind::Free), symvar::SizeError);
  CHECK_THROWS_AS(symvar::parse_kind("monotone"), symvar::ValidationError);
  CHECK(Partition(4, {{3, 2}, {4, 1}}).str() == "{{1,4}{2,3}}");
}
