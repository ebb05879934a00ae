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

#include "diffsnn/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "diffsnn/numerics.hpp"
#include "diffsnn/scalar_ops.hpp"

namespace diffsnn::ad {

namespace {

void check_same_tape(Var a, Var b) {
  if (a.tape() != b.tape()) {
    throw std::invalid_argument("ad: operands recorded on different tapes");
  }
}

[[noreturn]] void throw_domain(const char* kind, double x) {
  throw std::domain_error(std::string("ad: ") + kind +
                          " outside domain at x=" + std::to_string(x));
}

}  // namespace

Var Tape::leaf(double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("Tape::leaf: non-finite value");
  }
  return record("leaf", value, {});
}

void Tape::clear() {
  values_.clear();
  parent_index_.clear();
  parent_partial_.clear();
  pstart_.clear();
  pstart_.push_back(0);
}

void Tape::reserve(std::size_t nodes, std::size_t parents) {
  values_.reserve(nodes);
  pstart_.reserve(nodes + 1);
  parent_index_.reserve(parents);
  parent_partial_.reserve(parents);
}

Var Tape::record(const char* kind, double value,
                 std::initializer_list<Parent> parents) {
  return record(kind, value, std::span<const Parent>(parents.begin(), parents.size()));
}

Var Tape::record(const char* kind, double value, std::span<const Parent> parents) {
  if (!std::isfinite(value)) {
    throw std::domain_error(std::string("ad: non-finite result from kind '") +
                            kind + "'");
  }
  for (const Parent& p : parents) {
    parent_index_.push_back(p.index);
    parent_partial_.push_back(p.partial);
  }
  values_.push_back(value);
  pstart_.push_back(static_cast<std::int32_t>(parent_index_.size()));
  return Var(this, static_cast<std::int32_t>(values_.size()) - 1, value);
}

GradientMap Tape::gradients(Var root) const {
  if (root.tape() != this) {
    throw std::invalid_argument("Tape::gradients: root from another tape");
  }
  GradientMap adjoint(values_.size(), 0.0);
  adjoint[static_cast<std::size_t>(root.index())] = 1.0;
  for (std::int32_t i = root.index(); i >= 0; --i) {
    double a = adjoint[static_cast<std::size_t>(i)];
    if (a == 0.0) continue;
    for (std::int32_t k = pstart_[static_cast<std::size_t>(i)];
         k < pstart_[static_cast<std::size_t>(i) + 1]; ++k) {
      adjoint[static_cast<std::size_t>(parent_index_[static_cast<std::size_t>(k)])] +=
          a * parent_partial_[static_cast<std::size_t>(k)];
    }
  }
  return adjoint;
}

Var operator+(Var a, Var b) {
  check_same_tape(a, b);
  return a.tape()->record("add", a.value() + b.value(),
                          {{a.index(), 1.0}, {b.index(), 1.0}});
}

Var operator+(Var a, double b) {
  return a.tape()->record("add", a.value() + b, {{a.index(), 1.0}});
}

Var operator-(Var a, Var b) {
  check_same_tape(a, b);
  return a.tape()->record("sub", a.value() - b.value(),
                          {{a.index(), 1.0}, {b.index(), -1.0}});
}

Var operator-(Var a, double b) {
  return a.tape()->record("sub", a.value() - b, {{a.index(), 1.0}});
}

Var operator-(double a, Var b) {
  return b.tape()->record("sub", a - b.value(), {{b.index(), -1.0}});
}

Var operator-(Var a) { return neg(a); }

Var neg(Var x) {
  return x.tape()->record("neg", -x.value(), {{x.index(), -1.0}});
}

Var operator*(Var a, Var b) {
  check_same_tape(a, b);
  return a.tape()->record("mul", a.value() * b.value(),
                          {{a.index(), b.value()}, {b.index(), a.value()}});
}

Var operator*(Var a, double b) {
  return a.tape()->record("mul", a.value() * b, {{a.index(), b}});
}

Var operator/(Var a, Var b) {
  check_same_tape(a, b);
  if (b.value() == 0.0) throw_domain("div", b.value());
  double v = a.value() / b.value();
  return a.tape()->record("div", v,
                          {{a.index(), 1.0 / b.value()},
                           {b.index(), -v / b.value()}});
}

Var operator/(Var a, double b) {
  if (b == 0.0) throw_domain("div", b);
  return a.tape()->record("div", a.value() / b, {{a.index(), 1.0 / b}});
}

Var operator/(double a, Var b) {
  if (b.value() == 0.0) throw_domain("div", b.value());
  double v = a / b.value();
  return b.tape()->record("div", v, {{b.index(), -v / b.value()}});
}

Var exp(Var x) {
  double v = std::exp(x.value());
  return x.tape()->record("exp", v, {{x.index(), v}});
}

Var log(Var x) {
  if (!(x.value() > 0.0)) throw_domain("log", x.value());
  return x.tape()->record("log", std::log(x.value()),
                          {{x.index(), 1.0 / x.value()}});
}

Var pow(Var x, double c) {
  if (!(x.value() > 0.0)) throw_domain("power", x.value());
  double v = std::pow(x.value(), c);
  return x.tape()->record("power", v,
                          {{x.index(), c * std::pow(x.value(), c - 1.0)}});
}

Var max0(Var x) {
  return x.tape()->record("max0", diffsnn::max0(x.value()),
                          {{x.index(), x.value() > 0.0 ? 1.0 : 0.0}});
}

Var sigmoid_amp(Var x, double amplitude) {
  double v = diffsnn::sigmoid_amp(x.value(), amplitude);
  // a*s*(1-s) with s = v/a
  double partial = v * (1.0 - v / amplitude);
  return x.tape()->record("sigmoid_amp", v, {{x.index(), partial}});
}

Var softplus(Var x) {
  double v = diffsnn::softplus(x.value());
  double partial = diffsnn::sigmoid_amp(x.value(), 1.0);
  return x.tape()->record("softplus", v, {{x.index(), partial}});
}

Var log_sigmoid(Var x) {
  double v = diffsnn::log_sigmoid(x.value());
  // d/dx log sigmoid(x) = sigmoid(-x)
  double partial = diffsnn::sigmoid_amp(-x.value(), 1.0);
  return x.tape()->record("log_sigmoid", v, {{x.index(), partial}});
}

Var log_sigmoid_of_neg(Var x) {
  double v = diffsnn::log_sigmoid_of_neg(x.value());
  double partial = -diffsnn::sigmoid_amp(x.value(), 1.0);
  return x.tape()->record("log_sigmoid_of_neg", v, {{x.index(), partial}});
}

Var log_sum_exp(std::span<const Var> xs) {
  if (xs.empty()) {
    throw std::invalid_argument("ad::log_sum_exp: empty input");
  }
  Tape* tape = xs[0].tape();
  double vals_small[8];
  std::vector<double> vals_big;
  std::span<double> vals;
  if (xs.size() <= 8) {
    vals = std::span<double>(vals_small, xs.size());
  } else {
    vals_big.resize(xs.size());
    vals = vals_big;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    check_same_tape(xs[0], xs[i]);
    vals[i] = xs[i].value();
  }
  double v = diffsnn::log_sum_exp(vals);
  Parent parents_small[8];
  std::vector<Parent> parents_big;
  std::span<Parent> parents;
  if (xs.size() <= 8) {
    parents = std::span<Parent>(parents_small, xs.size());
  } else {
    parents_big.resize(xs.size());
    parents = parents_big;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    parents[i] = {xs[i].index(), std::exp(vals[i] - v)};
  }
  return tape->record("logsumexp", v, parents);
}

Var log1mexp(Var a) {
  if (!(a.value() > 0.0)) throw_domain("log1mexp", a.value());
  // d/da log(1 - exp(-a)) = 1 / expm1(a) > 0
  return a.tape()->record("log1mexp", diffsnn::log1mexp(a.value()),
                          {{a.index(), 1.0 / std::expm1(a.value())}});
}

Var weighted_sum(std::span<const Var> xs, std::span<const double> coeffs,
                 double bias) {
  if (xs.size() != coeffs.size()) {
    throw std::invalid_argument("ad::weighted_sum: size mismatch");
  }
  if (xs.empty()) {
    throw std::invalid_argument("ad::weighted_sum: empty input");
  }
  LinComb acc(xs[0].tape());
  acc.add_const(bias);
  for (std::size_t i = 0; i < xs.size(); ++i) acc.add(xs[i], coeffs[i]);
  return acc.commit();
}

Var dot(std::span<const Var> xs, std::span<const Var> ys) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("ad::dot: size mismatch");
  }
  if (xs.empty()) {
    throw std::invalid_argument("ad::dot: empty input");
  }
  LinComb acc(xs[0].tape());
  for (std::size_t i = 0; i < xs.size(); ++i) acc.add_product(xs[i], ys[i]);
  return acc.commit();
}

}  // namespace diffsnn::ad
