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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "diffsnn/io.hpp"
#include "diffsnn/rng.hpp"
#include "diffsnn/snn.hpp"
#include "doctest.h"

using namespace diffsnn;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("train serialization round-trips bit-exactly") {
  Rng rng(501);
  std::vector<SpikeTrain> trains;
  for (int n = 0; n < 30; ++n) {
    SpikeTrain t;
    t.horizon = 40.0 + rng.uniform01();
    double time = 0.0;
    const int events = static_cast<int>(rng.next_u64() % 6);
    for (int i = 0; i < events; ++i) {
      time += 1e-7 + 3.0 * rng.uniform01();
      std::vector<double> mark{rng.uniform01() / 3.0, 1e-17 * rng.uniform01(),
                               0.0};
      t.events.push_back({time, std::move(mark)});
    }
    trains.push_back(std::move(t));
  }
  const auto path = temp_file("diffsnn_io_trains.jsonl");
  write_trains(path.string(), trains);
  const std::vector<SpikeTrain> back = read_trains(path.string());
  REQUIRE(back.size() == trains.size());
  for (std::size_t n = 0; n < trains.size(); ++n) {
    CHECK(back[n].horizon == trains[n].horizon);
    REQUIRE(back[n].events.size() == trains[n].events.size());
    for (std::size_t i = 0; i < trains[n].events.size(); ++i) {
      CHECK(back[n].events[i].time == trains[n].events[i].time);
      CHECK(back[n].events[i].mark == trains[n].events[i].mark);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("parse failures carry the line number") {
  const auto path = temp_file("diffsnn_io_bad.jsonl");
  {
    std::ofstream out(path);
    out << R"({"horizon": 5.0, "events": []})" << "\n";
    out << "this is not json\n";
  }
  try {
    (void)read_trains(path.string());
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("parameter files round-trip bit-exactly") {
  Rng rng(503);
  const SnnParams params = init_params(rng, 4, 2, 5.0, {0.0, 10.0}, {0, 2});
  const auto path = temp_file("diffsnn_io_params.json");
  write_snn_params(path.string(), params);
  const SnnParams back = read_snn_params(path.string());
  CHECK(back.u_bar == params.u_bar);
  CHECK(back.weights == params.weights);
  CHECK(back.kernel_centers == params.kernel_centers);
  CHECK(back.amplitude == params.amplitude);
  CHECK(back.observable == params.observable);
  CHECK(back.hidden == params.hidden);
  std::filesystem::remove(path);
}

TEST_CASE("relaxed trains serialize through the same format") {
  SpikeTrain t;
  t.horizon = 2.0;
  t.events.push_back({0.5, {0.125, 0.25}});
  t.events.push_back({1.0, {1.0 / 3.0, 1e-300}});
  const SpikeTrain back = train_from_json(train_to_json(t));
  CHECK(back.events[1].mark[0] == t.events[1].mark[0]);
  CHECK(back.events[1].mark[1] == t.events[1].mark[1]);
}

TEST_CASE("missing files are reported with their path") {
  try {
    (void)read_trains("/nonexistent/diffsnn.jsonl");
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("/nonexistent") != std::string::npos);
  }
}

TEST_SUITE_END();
