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

#ifndef DIFFSNN_TESTS_ACCEPTANCE_CRITERIA_HPP_
#define DIFFSNN_TESTS_ACCEPTANCE_CRITERIA_HPP_

#include <string>

namespace diffsnn::acceptance {

struct CriterionResult {
  bool pass = false;
  std::string name;
  std::string details;
};

// Criteria 1..9; each is self-contained and deterministic.
CriterionResult run_criterion(int number);

inline constexpr int kCriterionCount = 9;

}  // namespace diffsnn::acceptance

#endif  // DIFFSNN_TESTS_ACCEPTANCE_CRITERIA_HPP_
