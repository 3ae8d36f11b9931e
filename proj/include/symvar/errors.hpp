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

#pragma once

#include <stdexcept>
#include <string>

namespace symvar {

/// Base of every error thrown by the library. Carries a short remediation
/// hint that the command line front-end forwards in its error payload.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, std::string hint = {})
      : std::runtime_error(what), hint_(std::move(hint)) {}
  const std::string& hint() const noexcept { return hint_; }

 private:
  std::string hint_;
};

/// Requested size exceeds a hard cap (partition ground set, moment order,
/// matrix dimension).
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Argument outside its mathematical domain (p not in [0,1], NaN input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed input: bad measure, mismatched orders, unparsable strings.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// p = 1/2: the dual function divides by q - p = 1 - 2p and the minimum is an
/// open problem. Never silently handled.
class CriticalCase : public Error {
 public:
  CriticalCase()
      : Error("critical case p=1/2 is open",
              "the dual certificate divides by 1-2p; choose p != 1/2") {}
};

/// A state the algorithms guarantee cannot occur (unbounded LP over the
/// probability simplex, ...).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace symvar
