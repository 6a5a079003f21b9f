// Copyright 2026 The evcoref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EVCOREF_AUTODIFF_H_
#define EVCOREF_AUTODIFF_H_

#include <deque>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace evcoref {

using Vector = std::vector<double>;

// Raised when operand shapes do not conform. The message names the
// operation and both shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Which learning-rate group a parameter belongs to during training.
enum class ParamGroup { kLower, kUpper };

// A trainable dense matrix (row-major) with its gradient accumulator.
// Vectors are stored as rows x 1 matrices.
struct Parameter {
  std::string name;
  int rows = 0;
  int cols = 0;
  ParamGroup group = ParamGroup::kUpper;
  Vector value;
  Vector grad;

  double &at(int r, int c) { return value[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return value[static_cast<size_t>(r) * cols + c];
  }
  size_t size() const { return value.size(); }
};

// Registry of all trainable parameters of a model, in declaration order.
// Parameter addresses are stable for the lifetime of the store.
class ParameterStore {
 public:
  ParameterStore() = default;
  ParameterStore(const ParameterStore &) = delete;
  ParameterStore &operator=(const ParameterStore &) = delete;

  // Adds a zero-initialized parameter. Names must be unique.
  Parameter &Add(std::string name, int rows, int cols, ParamGroup group);

  Parameter *Find(const std::string &name);
  const Parameter *Find(const std::string &name) const;

  void ZeroGrad();
  size_t NumScalars() const;

  std::deque<Parameter> &params() { return params_; }
  const std::deque<Parameter> &params() const { return params_; }

  // Copies of every parameter value, in declaration order.
  std::vector<Vector> Snapshot() const;
  void Restore(const std::vector<Vector> &snapshot);

 private:
  std::deque<Parameter> params_;
};

// Handle to a node recorded on a Tape.
struct Var {
  int id = -1;
};

// Ordered record of primitive operations over dense vectors. Scalars are
// length-1 vectors. When recording is enabled every operation stores a
// backward closure; Backward() visits them in reverse order exactly once.
//
// A tape is single-writer. Nodes refer to parameters by address, so the
// ParameterStore must outlive the tape.
class Tape {
 public:
  explicit Tape(ParameterStore *store = nullptr, bool recording = true)
      : store_(store), recording_(recording) {}
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  bool recording() const { return recording_; }
  size_t size() const { return nodes_.size(); }

  Var Constant(Vector value);
  Var Scalar(double value) { return Constant(Vector{value}); }

  const Vector &value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const;
  const Vector &grad(Var v) const { return nodes_[v.id].grad; }

  // weight * x + bias. weight is rows x cols, bias rows x 1.
  Var Affine(Parameter &weight, Parameter &bias, Var x);
  // Row r of an embedding matrix; gradients flow into that row only.
  Var Row(Parameter &table, int r);

  Var Relu(Var x);
  Var Sigmoid(Var x);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  // 1 - x, elementwise.
  Var OneMinus(Var x);
  // Length-1 result.
  Var Dot(Var a, Var b);
  // scalar (length 1) times vector.
  Var Scale(Var scalar, Var v);
  Var ScaleConst(double alpha, Var v);
  Var Concat(std::span<const Var> parts);
  // Elementwise mean of equal-length vectors.
  Var Mean(std::span<const Var> parts);
  // Sum of scalars.
  Var Sum(std::span<const Var> scalars);
  // log(sum(exp(s))) over scalars, max-shifted.
  Var LogSumExp(std::span<const Var> scalars);

  // Splits h into the projection on t and the residual. If t.t falls below
  // `singular_threshold` the parallel part is zero and the orthogonal part
  // is h, with identity gradient through h and none through t.
  struct Decomposition {
    Var parallel;
    Var orthogonal;
  };
  Decomposition Decompose(Var t, Var h, double singular_threshold = 1e-12);

  // Zeroes all node and parameter gradients, then accumulates d loss / d
  // every node and registered parameter. No-op on an empty tape.
  void Backward(Var loss);

 private:
  struct Node {
    Vector value;
    Vector grad;
    std::function<void(Tape &)> backward;
  };

  Var Push(Vector value, std::function<void(Tape &)> backward);
  Vector &g(int id) { return nodes_[id].grad; }
  const Vector &v(int id) const { return nodes_[id].value; }
  const Vector &at(Var x) const;

  ParameterStore *store_;
  bool recording_;
  std::vector<Node> nodes_;
};

}  // namespace evcoref

#endif  // EVCOREF_AUTODIFF_H_
