// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Minimal reverse-mode differentiation over dense matrices.
//
// A Tape is an append-only list of nodes. Each recorded op stores its value,
// its parents and a closure that, given the gradient of the node, adds the
// contributions to its parents' gradients. Because nodes are appended after
// their parents the list is topologically ordered and backward() is a single
// reverse sweep.

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "tgode/matrix.hpp"
#include "tgode/sparse.hpp"

namespace tgode {

class Tape;

// Handle to a tape node. Cheap to copy; only valid while its tape lives.
class Var {
 public:
  Var() = default;

  std::size_t id() const noexcept { return id_; }
  Tape* tape() const noexcept { return tape_; }
  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  // Receives the node's own gradient; adds into parents via accumulate().
  using BackwardFn = std::function<void(const Matrix& grad, Tape& tape)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var parameter(Matrix value);
  Var constant(Matrix value);
  Var record(Matrix value, std::vector<Var> parents, BackwardFn backward);

  const Matrix& value(Var v) const { return nodes_[v.id()].value; }
  bool requires_grad(Var v) const { return nodes_[v.id()].requires_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  // grad(v) += g. No-op for nodes that do not require gradients.
  void accumulate(Var v, const Matrix& g);
  // Mutable gradient buffer, zero-initialized on first access.
  Matrix& grad_buffer(Var v);

  // Seeds d loss / d loss = 1 and sweeps the tape in reverse. Throws
  // ShapeError unless `loss` is 1x1.
  void backward(Var loss);

  // Gradient of the last backward() with respect to `v`; zeros when the
  // node did not receive any.
  Matrix grad(Var v) const;

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool has_grad = false;
    bool requires_grad = false;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
};

// Differentiable primitives. Operands must live on the same tape.
namespace ad {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
// a + s * b
Var axpy(Var a, Var b, double s);
Var hadamard(Var a, Var b);
Var matmul(Var a, Var b);
// A is held by reference and must outlive backward().
Var spmm(const SparseAdjacency& a, Var x);
Var sigmoid(Var x);
// 1x1 sum of all entries.
Var sum(Var x);
// Arithmetic mean of equally shaped operands.
Var mean(std::span<const Var> xs);

}  // namespace ad

}  // namespace tgode
