// Copyright 2026 The DiffSNN Authors
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

#ifndef DIFFSNN_ERRORS_HPP_
#define DIFFSNN_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace diffsnn {

// Thrown when a model breaks a contract it declared (e.g. an intensity
// exceeding its own upper bound). Never clamped away: samplers that detect
// a violation must fail fast, since silently clamping would bias the law
// of the generated process.
class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace diffsnn

#endif  // DIFFSNN_ERRORS_HPP_
