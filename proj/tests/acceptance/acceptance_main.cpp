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
//
// Acceptance-suite driver: runs every criterion (or one, with
// --criterion N) and prints one pass/fail line each.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "criteria.hpp"

int main(int argc, char** argv) {
  using diffsnn::acceptance::CriterionResult;
  using diffsnn::acceptance::kCriterionCount;

  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[i + 1]);
      ++i;
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }

  int failures = 0;
  for (int n = 1; n <= kCriterionCount; ++n) {
    if (only != 0 && n != only) continue;
    const auto start = std::chrono::steady_clock::now();
    const CriterionResult result = diffsnn::acceptance::run_criterion(n);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    std::printf("[%s] criterion %d: %s (%s) [%.1fs]\n",
                result.pass ? "PASS" : "FAIL", n, result.name.c_str(),
                result.details.c_str(), seconds);
    std::fflush(stdout);
    failures += result.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
