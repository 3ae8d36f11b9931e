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


// Adds bernoulli(p) and its negation under each independence notion and
// prints the odd-moment residual and the variance of the negation.

#include <iostream>

#include "symvar/symvar.hpp"

int main() {
  using namespace symvar;
  const Rational p(3, 10);
  const auto e = bernoulli(p);
  const auto y = negate(e);
  for (IndependenceKind kind : kAllKinds) {
    const auto m = convolve_moments(moments_of(e, 13), moments_of(y, 13), kind);
    std::cout << to_string(kind) << ": odd residual " << to_exact_string(odd_moment_residual(m))
              << ", m2(e+y) = " << to_exact_string(m[2]) << "\n";
  }
  std::cout << "Var(y) = " << to_exact_string(variance(y)) << ", E[y^2] = " << to_exact_string(moments_of(y, 2)[2])
            << "\n";
}
