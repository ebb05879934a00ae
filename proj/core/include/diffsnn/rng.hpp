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

#ifndef DIFFSNN_RNG_HPP_
#define DIFFSNN_RNG_HPP_

#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace diffsnn {

// Anything that yields uniforms in (0, 1). Sampling routines are templated
// on this so that a recorded noise sequence can stand in for a live
// generator (common random numbers for gradient checks and path-wise
// estimates).
template <typename T>
concept UniformSource = requires(T t) {
  { t.uniform01() } -> std::convertible_to<double>;
};

// Seedable, splittable generator around mt19937_64. Uniform draws are
// clamped to [DBL_MIN, 1 - 2^-53]: a draw of exactly 0 or 1 would turn a
// Gumbel into +-inf and poison every softmax downstream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), split_state_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u < std::numeric_limits<double>::min()) {
      u = std::numeric_limits<double>::min();
    }
    return u;  // <= 1 - 2^-53 by construction
  }

  // Inter-event gap of a homogeneous Poisson process with the given rate.
  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  // Derives an independent child stream. Parent and children may be used
  // concurrently; each split is deterministic in (seed, split index).
  Rng split() { return Rng(splitmix64(split_state_)); }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t split_state_;
  std::mt19937_64 engine_;
};

// Standard Gumbel(0, 1) variate: -log(-log u).
template <UniformSource U>
double sample_gumbel(U& rng) {
  return -std::log(-std::log(rng.uniform01()));
}

// Records every uniform drawn through it, in consumption order.
class RecordingSource {
 public:
  explicit RecordingSource(Rng& inner) : inner_(&inner) {}

  double uniform01() {
    double u = inner_->uniform01();
    record_.push_back(u);
    return u;
  }

  const std::vector<double>& record() const { return record_; }
  std::vector<double> take_record() { return std::move(record_); }

 private:
  Rng* inner_;
  std::vector<double> record_;
};

// Replays a previously recorded uniform sequence. Exhausting the record is
// a logic error: replayed computations must consume noise in the exact
// pattern of the recording pass.
class ReplaySource {
 public:
  explicit ReplaySource(const std::vector<double>& record) : record_(&record) {}

  double uniform01() {
    if (cursor_ >= record_->size()) {
      throw std::logic_error("ReplaySource: noise record exhausted");
    }
    return (*record_)[cursor_++];
  }

  void rewind() { cursor_ = 0; }

 private:
  const std::vector<double>* record_;
  std::size_t cursor_ = 0;
};

}  // namespace diffsnn

#endif  // DIFFSNN_RNG_HPP_
