// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/tape.hpp"

#include <string>

#include "tgode/error.hpp"

namespace tgode {

const Matrix& Var::value() const { return tape_->value(*this); }

Var Tape::parameter(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, false, true, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) {
  nodes_.push_back(Node{std::move(value), {}, false, false, nullptr});
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Matrix value, std::vector<Var> parents, BackwardFn backward) {
  bool needs = false;
  for (Var p : parents) {
    if (p.tape() != this) throw Error("tape: operand recorded on a different tape");
    needs = needs || requires_grad(p);
  }
  nodes_.push_back(Node{std::move(value), {}, false, needs, needs ? std::move(backward) : nullptr});
  return Var(this, nodes_.size() - 1);
}

Matrix& Tape::grad_buffer(Var v) {
  Node& node = nodes_[v.id()];
  if (!node.has_grad) {
    node.grad = Matrix(node.value.rows(), node.value.cols());
    node.has_grad = true;
  }
  return node.grad;
}

void Tape::accumulate(Var v, const Matrix& g) {
  if (!requires_grad(v)) return;
  grad_buffer(v) += g;
}

void Tape::backward(Var loss) {
  const Matrix& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw ShapeError("backward: loss must be 1x1, got " + std::to_string(lv.rows()) + "x" +
                     std::to_string(lv.cols()));
  }
  for (Node& n : nodes_) {
    n.grad = Matrix();
    n.has_grad = false;
  }
  grad_buffer(loss)[0] = 1.0;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.has_grad || !node.backward) continue;
    // The closure may append to other nodes' gradients but never to its own.
    const Matrix g = std::move(node.grad);
    node.backward(g, *this);
    node.grad = g;
  }
}

Matrix Tape::grad(Var v) const {
  const Node& node = nodes_[v.id()];
  if (!node.has_grad) return Matrix(node.value.rows(), node.value.cols());
  return node.grad;
}

namespace ad {

Var add(Var a, Var b) {
  Tape& t = *a.tape();
  return t.record(a.value() + b.value(), {a, b}, [a, b](const Matrix& g, Tape& tp) {
    tp.accumulate(a, g);
    tp.accumulate(b, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = *a.tape();
  return t.record(a.value() - b.value(), {a, b}, [a, b](const Matrix& g, Tape& tp) {
    tp.accumulate(a, g);
    if (tp.requires_grad(b)) tp.grad_buffer(b).add_scaled(g, -1.0);
  });
}

Var scale(Var a, double s) {
  Tape& t = *a.tape();
  return t.record(a.value() * s, {a}, [a, s](const Matrix& g, Tape& tp) {
    tp.grad_buffer(a).add_scaled(g, s);
  });
}

Var axpy(Var a, Var b, double s) {
  Tape& t = *a.tape();
  Matrix out = a.value();
  out.add_scaled(b.value(), s);
  return t.record(std::move(out), {a, b}, [a, b, s](const Matrix& g, Tape& tp) {
    tp.accumulate(a, g);
    if (tp.requires_grad(b)) tp.grad_buffer(b).add_scaled(g, s);
  });
}

Var hadamard(Var a, Var b) {
  Tape& t = *a.tape();
  Matrix av = a.value();
  Matrix bv = b.value();
  Matrix out = tgode::hadamard(av, bv);
  return t.record(std::move(out), {a, b},
                  [a, b, av = std::move(av), bv = std::move(bv)](const Matrix& g, Tape& tp) {
                    if (tp.requires_grad(a)) tp.grad_buffer(a) += tgode::hadamard(g, bv);
                    if (tp.requires_grad(b)) tp.grad_buffer(b) += tgode::hadamard(g, av);
                  });
}

Var matmul(Var a, Var b) {
  Tape& t = *a.tape();
  Matrix av = a.value();
  Matrix bv = b.value();
  Matrix out = tgode::matmul(av, bv);
  return t.record(std::move(out), {a, b},
                  [a, b, av = std::move(av), bv = std::move(bv)](const Matrix& g, Tape& tp) {
                    if (tp.requires_grad(a)) tp.grad_buffer(a) += matmul_bt(g, bv);
                    if (tp.requires_grad(b)) tp.grad_buffer(b) += matmul_at(av, g);
                  });
}

Var spmm(const SparseAdjacency& adj, Var x) {
  Tape& t = *x.tape();
  // The adjacency is symmetric by construction, so A^T g = A g.
  return t.record(tgode::spmm(adj, x.value()), {x}, [&adj, x](const Matrix& g, Tape& tp) {
    spmm_accumulate(adj, g, 1.0, tp.grad_buffer(x));
  });
}

Var sigmoid(Var x) {
  Tape& t = *x.tape();
  Matrix y = tgode::sigmoid(x.value());
  Matrix saved = y;
  return t.record(std::move(y), {x}, [x, saved = std::move(saved)](const Matrix& g, Tape& tp) {
    Matrix& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * saved[i] * (1.0 - saved[i]);
  });
}

Var sum(Var x) {
  Tape& t = *x.tape();
  Matrix out(1, 1, tgode::sum(x.value()));
  return t.record(std::move(out), {x}, [x](const Matrix& g, Tape& tp) {
    Matrix& gx = tp.grad_buffer(x);
    for (double& v : gx.values()) v += g[0];
  });
}

Var mean(std::span<const Var> xs) {
  if (xs.empty()) throw ShapeError("mean: no operands");
  Tape& t = *xs.front().tape();
  Matrix out = xs.front().value();
  for (std::size_t i = 1; i < xs.size(); ++i) out += xs[i].value();
  const double s = 1.0 / static_cast<double>(xs.size());
  out *= s;
  std::vector<Var> parents(xs.begin(), xs.end());
  return t.record(std::move(out), parents, [parents, s](const Matrix& g, Tape& tp) {
    for (Var p : parents) {
      if (tp.requires_grad(p)) tp.grad_buffer(p).add_scaled(g, s);
    }
  });
}

}  // namespace ad

}  // namespace tgode
