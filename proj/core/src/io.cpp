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

#include "diffsnn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace diffsnn {

namespace {

using nlohmann::json;

// 17 significant digits: enough for a bit-exact double round trip.
void append_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

void append_vector(std::string& out, std::span<const double> v) {
  out += '[';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    append_number(out, v[i]);
  }
  out += ']';
}

std::ifstream open_for_read(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path);
  }
  return in;
}

}  // namespace

std::string train_to_json(const SpikeTrain& train) {
  std::string out = "{\"horizon\": ";
  append_number(out, train.horizon);
  out += ", \"events\": [";
  for (std::size_t i = 0; i < train.events.size(); ++i) {
    if (i > 0) out += ", ";
    out += '[';
    append_number(out, train.events[i].time);
    out += ", ";
    append_vector(out, train.events[i].mark);
    out += ']';
  }
  out += "]}";
  return out;
}

SpikeTrain train_from_json(const std::string& line) {
  const json j = json::parse(line);
  SpikeTrain train;
  train.horizon = j.at("horizon").get<double>();
  for (const json& e : j.at("events")) {
    if (!e.is_array() || e.size() != 2) {
      throw std::runtime_error("event must be a [time, mark] pair");
    }
    MarkedEvent event;
    event.time = e[0].get<double>();
    event.mark = e[1].get<std::vector<double>>();
    train.events.push_back(std::move(event));
  }
  validate_train(train);
  return train;
}

void write_trains(const std::string& path, std::span<const SpikeTrain> trains) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  for (const SpikeTrain& train : trains) {
    out << train_to_json(train) << '\n';
  }
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

std::vector<SpikeTrain> read_trains(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::vector<SpikeTrain> trains;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      trains.push_back(train_from_json(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return trains;
}

std::string params_to_json(const SnnParams& params) {
  std::string out = "{\n  \"u_bar\": ";
  append_vector(out, params.u_bar);
  out += ",\n  \"weights\": [";
  for (int from = 0; from < params.dim(); ++from) {
    if (from > 0) out += ", ";
    out += '[';
    for (int to = 0; to < params.dim(); ++to) {
      if (to > 0) out += ", ";
      out += '[';
      for (int l = 0; l < params.basis(); ++l) {
        if (l > 0) out += ", ";
        append_number(out, params.weight(from, to, l));
      }
      out += ']';
    }
    out += ']';
  }
  out += "],\n  \"kernel_centers\": ";
  append_vector(out, params.kernel_centers);
  out += ",\n  \"amplitude\": ";
  append_number(out, params.amplitude);
  out += ",\n  \"observable\": [";
  for (std::size_t i = 0; i < params.observable.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(params.observable[i]);
  }
  out += "]\n}\n";
  return out;
}

SnnParams params_from_json(const std::string& text) {
  const json j = json::parse(text);
  SnnParams params;
  params.u_bar = j.at("u_bar").get<std::vector<double>>();
  params.kernel_centers = j.at("kernel_centers").get<std::vector<double>>();
  params.amplitude = j.at("amplitude").get<double>();
  params.observable = j.at("observable").get<std::vector<int>>();
  const int dim = static_cast<int>(params.u_bar.size());
  const int basis = static_cast<int>(params.kernel_centers.size());
  const json& w = j.at("weights");
  if (static_cast<int>(w.size()) != dim) {
    throw std::runtime_error("weights: outer dimension mismatch");
  }
  params.weights.resize(static_cast<std::size_t>(dim * dim * basis));
  for (int from = 0; from < dim; ++from) {
    if (static_cast<int>(w[from].size()) != dim) {
      throw std::runtime_error("weights: inner dimension mismatch");
    }
    for (int to = 0; to < dim; ++to) {
      if (static_cast<int>(w[from][to].size()) != basis) {
        throw std::runtime_error("weights: basis dimension mismatch");
      }
      for (int l = 0; l < basis; ++l) {
        params.weight(from, to, l) = w[from][to][l].get<double>();
      }
    }
  }
  std::vector<bool> seen(static_cast<std::size_t>(dim), false);
  for (int o : params.observable) {
    if (o < 0 || o >= dim) {
      throw std::runtime_error("observable index out of range");
    }
    seen[static_cast<std::size_t>(o)] = true;
  }
  params.hidden.clear();
  for (int d = 0; d < dim; ++d) {
    if (!seen[static_cast<std::size_t>(d)]) params.hidden.push_back(d);
  }
  return params;
}

void write_snn_params(const std::string& path, const SnnParams& params) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << params_to_json(params);
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

SnnParams read_snn_params(const std::string& path) {
  std::ifstream in = open_for_read(path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return params_from_json(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace diffsnn
