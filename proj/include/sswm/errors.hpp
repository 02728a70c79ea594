// Copyright 2026 The sswm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SSWM_ERRORS_HPP_
#define SSWM_ERRORS_HPP_

#include <stdexcept>

namespace sswm {

// No solution exists under the requested constraints (distortion budgets,
// decode masks). Distinct from std::invalid_argument, which flags malformed
// inputs rather than well-formed but unsatisfiable ones.
class infeasible_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable file content.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sswm

#endif  // SSWM_ERRORS_HPP_
