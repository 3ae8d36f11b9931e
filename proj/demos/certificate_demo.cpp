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


// Exact check of the dual inequality, then the lower bound it gives for a
// few measures with mean -p.

#include <iostream>

#include "symvar/symvar.hpp"

int main() {
  using namespace symvar;
  const Rational p(3, 10);
  const CertificateReport report = verify_inequality_exact(p);
  std::cout << to_json(report).dump(2) << "\n";

  const DiscreteMeasure<Rational> candidates[] = {
      negate(bernoulli(p)),
      DiscreteMeasure<Rational>::point_mass(-p),
      DiscreteMeasure<Rational>({{Rational(-3, 2), Rational(1, 10)}, {Rational(-1, 6), Rational(9, 10)}}),
  };
  for (const auto& y : candidates)
    std::cout << "E[y^2] = " << to_exact_string(moments_of(y, 2)[2])
              << ", bound slack = " << to_exact_string(certificate_lower_bound(y, p)) << "\n";
}
