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
// File formats. Trains are JSON Lines, one train per line:
//   {"horizon": T, "events": [[t, [p_1, ..., p_D]], ...]}
// with times ascending and marks as full D-vectors. Parameters are a JSON
// object with keys u_bar, weights (D x D x L nested), kernel_centers,
// amplitude, observable. Numbers are written with 17 significant digits,
// so a write/read round trip is bit-exact.

#ifndef DIFFSNN_IO_HPP_
#define DIFFSNN_IO_HPP_

#include <string>
#include <vector>

#include "diffsnn/point_process.hpp"
#include "diffsnn/snn.hpp"

namespace diffsnn {

std::string train_to_json(const SpikeTrain& train);
SpikeTrain train_from_json(const std::string& line);

void write_trains(const std::string& path,
                  std::span<const SpikeTrain> trains);
// Throws std::runtime_error with the path and 1-based line number of the
// first malformed line.
std::vector<SpikeTrain> read_trains(const std::string& path);

std::string params_to_json(const SnnParams& params);
SnnParams params_from_json(const std::string& text);

void write_snn_params(const std::string& path, const SnnParams& params);
SnnParams read_snn_params(const std::string& path);

}  // namespace diffsnn

#endif  // DIFFSNN_IO_HPP_
