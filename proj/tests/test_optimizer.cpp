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

#include <cmath>
#include <cstdlib>

#include "symvar/optimizer.hpp"

using symvar::ClassicalMode;
using symvar::GridSpec;
using symvar::IndependenceKind;
using symvar::OptStatus;
using symvar::Rational;

namespace {

bool matches_negated_bernoulli(const symvar::DiscreteMeasure<double>& y, double p, double tol) {
  if (y.size() != 2) return false;
  const auto& a = y.atoms();
  return std::abs(a[0].location + 1) <= tol && std::abs(a[0].weight - p) <= tol && std::abs(a[1].location) <= tol &&
         std::abs(a[1].weight - (1 - p)) <= tol;
}

}  // namespace

TEST_CASE("grid parsing") {
  const auto g = GridSpec::parse("-2:1:0.25");
  CHECK(g.lo == -2);
  CHECK(g.step == Rational(1, 4));
  CHECK(g.points().size() == 13);
  auto h = GridSpec::parse("-1/3:1:1/3");
  CHECK(h.points().size() == 6);  // includes -1
  CHECK_THROWS_AS(GridSpec::parse("1:0:0.1"), symvar::ValidationError);
  CHECK_THROWS_AS(GridSpec::parse("0:1:0"), symvar::ValidationError);
  CHECK_THROWS_AS(GridSpec::parse("0:1"), symvar::ValidationError);
  CHECK_THROWS_AS(GridSpec::parse("0:1000:0.001"), symvar::SizeError);
}

TEST_CASE("classical program reaches pq at the negated Bernoulli law") {
  const auto grid = GridSpec::parse("-2:1:0.25");
  for (const char* text : {"0.1", "0.2", "0.3", "0.4", "0.45", "0.6", "0.75", "0.9"}) {
    const Rational p = symvar::parse_rational(text);
    const double pd = p.convert_to<double>();
    const auto r = symvar::classical_min_variance<double>(p, grid);
    INFO("p = " << pd);
    REQUIRE(r.status == OptStatus::Optimal);
    CHECK(std::abs(r.objective - pd * (1 - pd)) <= 1e-9);
    CHECK(matches_negated_bernoulli(*r.measure, pd, 1e-9));
    CHECK(std::abs(symvar::variance(*r.measure) - r.objective) <= 1e-9);
    CHECK(r.residual <= 1e-12);
  }
}

TEST_CASE("exact classical program") {
  const auto r = symvar::classical_min_variance<Rational>(Rational(3, 10), GridSpec::parse("-2:1:0.5"));
  REQUIRE(r.status == OptStatus::Optimal);
  CHECK(r.objective == Rational(21, 100));
  CHECK(r.residual == 0);
  CHECK(*r.measure == symvar::negate(symvar::bernoulli(Rational(3, 10))));
}

TEST_CASE("critical p in the classical program is only bounded above") {
  const auto r = symvar::classical_min_variance<double>(Rational(1, 2), GridSpec::parse("-2:1:0.5"));
  REQUIRE(r.status == OptStatus::Optimal);
  CHECK(r.objective <= 0.25 + 1e-12);
}

TEST_CASE("moment relaxations are nested below the exact law") {
  const Rational p(3, 10);
  const auto grid = GridSpec::parse("-2:1:0.25");
  const auto exact = symvar::classical_min_variance<Rational>(p, grid);
  Rational previous(-1);
  for (int k = 0; k <= 6; ++k) {
    const auto r = symvar::classical_min_variance<Rational>(p, grid, ClassicalMode::MomentRelax(k));
    REQUIRE(r.status == OptStatus::Optimal);
    CHECK(r.objective >= previous);
    CHECK(r.objective <= exact.objective);
    previous = r.objective;
  }
  CHECK(symvar::classical_min_variance<Rational>(p, grid, ClassicalMode::MomentRelax(0)).objective <= Rational(21, 100));
  CHECK_THROWS_AS(symvar::classical_min_variance<double>(p, grid, ClassicalMode::MomentRelax(7)), symvar::ValidationError);
}

TEST_CASE("a grid without symmetrizing supports is infeasible") {
  GridSpec g = GridSpec::parse("0.25:0.75:0.5");
  g.must_include.clear();
  const auto r = symvar::classical_min_variance<double>(Rational(3, 10), g);
  CHECK(r.status == OptStatus::Infeasible);
  CHECK_FALSE(r.measure.has_value());
  CHECK(symvar::to_json(r)["objective"].is_null());
}

TEST_CASE("classical program parameter errors") {
  const auto grid = GridSpec::parse("-2:1:0.5");
  CHECK_THROWS_AS(symvar::classical_min_variance<double>(Rational(0), grid), symvar::DomainError);
  CHECK_THROWS_AS(symvar::classical_min_variance<double>(Rational(1), grid), symvar::DomainError);
}

TEST_CASE("free and Boolean search land on p") {
  symvar::SearchConfig cfg;
  cfg.seed = 2026;
  for (auto kind : {IndependenceKind::Free, IndependenceKind::Boolean})
    for (double p : {0.3, 0.7}) {
      INFO(symvar::to_string(kind) << " p = " << p);
      const auto r = symvar::nc_min_variance(p, kind, cfg);
      CHECK(r.status == OptStatus::Optimal);
      CHECK(r.residual < 1e-6);
      CHECK(r.objective >= p - 1e-4);
      CHECK(r.objective <= p + 1e-3);
      for (const auto& run : r.runs)
        if (run.residual < 1e-8) CHECK(run.objective >= p - 1e-4);
      // the unrefined seed y = -e is exact
      const auto& plain = r.runs.back();
      CHECK(plain.seeded_start);
      CHECK(plain.objective == Catch::Approx(p).epsilon(1e-15));
      CHECK(plain.residual == 0);
    }
}

TEST_CASE("search is reproducible") {
  symvar::SearchConfig cfg;
  cfg.seed = 99;
  cfg.restarts = 6;
  const auto a = symvar::nc_min_variance(0.3, IndependenceKind::Free, cfg);
  const auto b = symvar::nc_min_variance(0.3, IndependenceKind::Free, cfg);
  CHECK(a == b);
  cfg.seed = 100;
  const auto c = symvar::nc_min_variance(0.3, IndependenceKind::Free, cfg);
  CHECK(c.runs[1].seed != a.runs[1].seed);
}

TEST_CASE("low truncation orders admit spurious minima that higher orders reject") {
  // Only m1, m3, m5 are constrained here, so the search may go below p; such
  // a y must then break symmetry at some higher odd order.
  symvar::SearchConfig cfg;
  cfg.seed = 5;
  cfg.restarts = 8;
  cfg.max_odd_order = 5;
  const auto r = symvar::nc_min_variance(0.3, IndependenceKind::Boolean, cfg);
  CHECK(r.status == OptStatus::Optimal);
  REQUIRE(r.measure.has_value());
  if (r.objective < 0.3 - 1e-4)
    CHECK(symvar::symmetrizer_residual(0.3, *r.measure, IndependenceKind::Boolean, 13) > 1e-6);
}

TEST_CASE("search parameter errors") {
  CHECK_THROWS_AS(symvar::nc_min_variance(0.5, IndependenceKind::Free), symvar::CriticalCase);
  CHECK_THROWS_AS(symvar::nc_min_variance(0.5, IndependenceKind::Boolean), symvar::CriticalCase);
  CHECK_THROWS_AS(symvar::nc_min_variance(0.3, IndependenceKind::Classical), symvar::ValidationError);
  CHECK_THROWS_AS(symvar::nc_min_variance(1.3, IndependenceKind::Free), symvar::DomainError);
  symvar::SearchConfig bad;
  bad.atom_budget = 1;
  CHECK_THROWS_AS(symvar::nc_min_variance(0.3, IndependenceKind::Free, bad), symvar::ValidationError);
  bad = {};
  bad.max_odd_order = 4;
  CHECK_THROWS_AS(symvar::nc_min_variance(0.3, IndependenceKind::Free, bad), symvar::ValidationError);
  bad = {};
  bad.penalty_weights = {1e4, 1e2};
  CHECK_THROWS_AS(symvar::nc_min_variance(0.3, IndependenceKind::Free, bad), symvar::ValidationError);
}

TEST_CASE("critical exploration runs when requested") {
  symvar::SearchConfig cfg;
  cfg.allow_critical = true;
  cfg.restarts = 3;
  const auto r = symvar::nc_min_variance(0.5, IndependenceKind::Free, cfg);
  CHECK(r.measure.has_value());
  CHECK(r.objective >= 0.25 - 1e-6);
}

TEST_CASE("results survive JSON") {
  const auto exact = symvar::classical_min_variance<Rational>(Rational(3, 10), GridSpec::parse("-2:1:0.5"));
  CHECK(symvar::opt_result_from_json<Rational>(nlohmann::json::parse(symvar::to_json(exact).dump())) == exact);
  symvar::SearchConfig cfg;
  cfg.restarts = 2;
  const auto search = symvar::nc_min_variance(0.7, IndependenceKind::Boolean, cfg);
  CHECK(symvar::opt_result_from_json<double>(nlohmann::json::parse(symvar::to_json(search).dump())) == search);
}

TEST_CASE("search result does not depend on the worker count") {
  symvar::SearchConfig cfg;
  cfg.seed = 4;
  cfg.restarts = 5;
  setenv("SYMVAR_THREADS", "1", 1);
  const auto serial = symvar::nc_min_variance(0.7, IndependenceKind::Free, cfg);
  setenv("SYMVAR_THREADS", "3", 1);
  const auto threaded = symvar::nc_min_variance(0.7, IndependenceKind::Free, cfg);
  unsetenv("SYMVAR_THREADS");
  CHECK(serial == threaded);
}
