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
// Minimal reverse-mode automatic differentiation over scalars. A Tape is an
// append-only, topologically ordered list of nodes; it is cleared and
// rebuilt for every gradient estimate, since sampled event counts make the
// graph shape vary from draw to draw.
//
// Every operation computes its primal with exactly the same double
// arithmetic as the plain-scalar twins in scalar_ops.hpp, so evaluating a
// formula with doubles or with Vars gives bit-identical values.

#ifndef DIFFSNN_AUTODIFF_HPP_
#define DIFFSNN_AUTODIFF_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace diffsnn::ad {

struct Parent {
  std::int32_t index;
  double partial;
};

class Tape;

// Handle to a node on a Tape. Cheap value type; the primal is cached so
// reads never touch the tape.
class Var {
 public:
  Var() = default;
  double value() const { return value_; }
  std::int32_t index() const { return index_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::int32_t index, double value)
      : tape_(tape), index_(index), value_(value) {}

  Tape* tape_ = nullptr;
  std::int32_t index_ = -1;
  double value_ = 0.0;
};

// Gradient of a root node w.r.t. every node on the tape, indexed by node
// handle. Nodes that do not influence the root read 0.
using GradientMap = std::vector<double>;

inline double grad_of(const GradientMap& grads, Var x) {
  return grads[static_cast<std::size_t>(x.index())];
}

class Tape {
 public:
  Tape() { pstart_.push_back(0); }

  // Parameter node. Non-finite values are rejected: a NaN/inf entering the
  // graph would only surface much later as garbage gradients.
  Var leaf(double value);
  // Same representation as a leaf; named for intent (no gradient wanted).
  Var constant(double value) { return leaf(value); }

  std::size_t size() const { return values_.size(); }
  double value(std::int32_t index) const { return values_[static_cast<std::size_t>(index)]; }

  // Drops all nodes but keeps capacity, ready for the next estimate.
  void clear();
  void reserve(std::size_t nodes, std::size_t parents);

  // Reverse sweep from root. Deterministic: replaying the same tape yields
  // bitwise-identical gradients.
  GradientMap gradients(Var root) const;

  Var record(const char* kind, double value, std::initializer_list<Parent> parents);
  Var record(const char* kind, double value, std::span<const Parent> parents);

 private:
  std::vector<double> values_;
  std::vector<std::int32_t> pstart_;  // size()+1 offsets into the pools
  // Parent pool, split into parallel arrays (12 bytes per edge instead of
  // a padded struct; the reverse sweep walks these linearly).
  std::vector<std::int32_t> parent_index_;
  std::vector<double> parent_partial_;
};

// ---- recorded operations ---------------------------------------------------
// Each op states its local partials; domain violations throw
// std::domain_error naming the offending kind.

Var operator+(Var a, Var b);
Var operator+(Var a, double b);
inline Var operator+(double a, Var b) { return b + a; }

Var operator-(Var a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator-(Var a);  // negation

Var operator*(Var a, Var b);
Var operator*(Var a, double b);
inline Var operator*(double a, Var b) { return b * a; }

Var operator/(Var a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);

Var neg(Var x);
Var exp(Var x);
Var log(Var x);
Var pow(Var x, double c);
Var max0(Var x);  // subgradient 0 at the kink
Var sigmoid_amp(Var x, double amplitude);
Var softplus(Var x);
Var log_sigmoid(Var x);
Var log_sigmoid_of_neg(Var x);
Var log_sum_exp(std::span<const Var> xs);
Var log1mexp(Var a);
// value = bias + sum_i coeffs[i] * xs[i]
Var weighted_sum(std::span<const Var> xs, std::span<const double> coeffs, double bias);
// value = sum_i xs[i] * ys[i]
Var dot(std::span<const Var> xs, std::span<const Var> ys);

// Builds one affine/bilinear node incrementally; the workhorse behind
// weighted_sum and dot. Reusable: clear() keeps capacity.
class LinComb {
 public:
  explicit LinComb(Tape* tape) : tape_(tape) {}

  void clear() {
    value_ = 0.0;
    parents_.clear();
  }

  // Retargets a reused accumulator; keeps the parent buffer capacity.
  void rebind(Tape* tape) {
    tape_ = tape;
    clear();
  }

  void add_const(double c) { value_ += c; }

  void add(Var x, double coeff) {
    value_ += coeff * x.value();
    parents_.push_back({x.index(), coeff});
  }

  // Contributes x*y; both factors receive gradients.
  void add_product(Var x, Var y) {
    value_ += x.value() * y.value();
    parents_.push_back({x.index(), y.value()});
    parents_.push_back({y.index(), x.value()});
  }

  double value() const { return value_; }

  Var commit() { return tape_->record("lin_comb", value_, parents_); }

 private:
  Tape* tape_;
  double value_ = 0.0;
  std::vector<Parent> parents_;
};

}  // namespace diffsnn::ad

#endif  // DIFFSNN_AUTODIFF_HPP_
