// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/ode.hpp"

#include <cmath>
#include <string>

#include "tgode/error.hpp"

namespace tgode {

namespace {

// out = (A - I) x + b, overwriting out; b may be null. One pass per row.
void eval_derivative(const SparseAdjacency& a, const Matrix& x, const Matrix* b, Matrix& out) {
  const std::size_t d = x.cols();
  for (std::size_t i = 0; i < a.n; ++i) {
    double* dst = out.row(i).data();
    const double* xi = x.row(i).data();
    if (b != nullptr) {
      const double* bi = b->row(i).data();
      for (std::size_t c = 0; c < d; ++c) dst[c] = bi[c] - xi[c];
    } else {
      for (std::size_t c = 0; c < d; ++c) dst[c] = -xi[c];
    }
    for (std::size_t p = a.offsets[i]; p < a.offsets[i + 1]; ++p) {
      const double w = a.values[p];
      const double* src = x.row(a.columns[p]).data();
      for (std::size_t c = 0; c < d; ++c) dst[c] += w * src[c];
    }
  }
}

// y = h + s * k
void axpy_into(const Matrix& h, const Matrix& k, double s, Matrix& y) {
  for (std::size_t i = 0; i < h.size(); ++i) y[i] = h[i] + s * k[i];
}

// One classical RK4 step, in place. Uses `work` as scratch (5 buffers).
void rk4_step(const SparseAdjacency& a, const Matrix& b, double eps, Matrix& h, Matrix (&work)[5]) {
  Matrix& k1 = work[0];
  Matrix& k2 = work[1];
  Matrix& k3 = work[2];
  Matrix& k4 = work[3];
  Matrix& y = work[4];
  eval_derivative(a, h, &b, k1);
  axpy_into(h, k1, 0.5 * eps, y);
  eval_derivative(a, y, &b, k2);
  axpy_into(h, k2, 0.5 * eps, y);
  eval_derivative(a, y, &b, k3);
  axpy_into(h, k3, eps, y);
  eval_derivative(a, y, &b, k4);
  const double w = eps / 6.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    h[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

// Reverse sweep of rk4_step. Given the gradient `g` of the step output,
// replaces it with the gradient of the step input and adds the forcing
// gradient into `gb`. (A - I) is symmetric, so it is its own transpose.
void rk4_step_backward(const SparseAdjacency& a, double eps, Matrix& g, Matrix& gb,
                       Matrix (&work)[5]) {
  Matrix& kb1 = work[0];
  Matrix& kb2 = work[1];
  Matrix& kb3 = work[2];
  Matrix& kb4 = work[3];
  Matrix& yb = work[4];
  for (std::size_t i = 0; i < g.size(); ++i) {
    kb1[i] = kb4[i] = g[i] * (eps / 6.0);
    kb2[i] = kb3[i] = g[i] * (eps / 3.0);
  }
  // h_out = h + ...: g already holds the identity path into h.
  eval_derivative(a, kb4, nullptr, yb);
  gb += kb4;
  g += yb;
  kb3.add_scaled(yb, eps);

  eval_derivative(a, kb3, nullptr, yb);
  gb += kb3;
  g += yb;
  kb2.add_scaled(yb, 0.5 * eps);

  eval_derivative(a, kb2, nullptr, yb);
  gb += kb2;
  g += yb;
  kb1.add_scaled(yb, 0.5 * eps);

  eval_derivative(a, kb1, nullptr, yb);
  gb += kb1;
  g += yb;
}

void check_problem(const SparseAdjacency& a, const Matrix& h0, const Matrix& b) {
  if (a.n != h0.rows()) {
    throw ShapeError("ode: adjacency has " + std::to_string(a.n) + " nodes, state has " +
                     std::to_string(h0.rows()) + " rows");
  }
  require_same_shape(h0, b, "ode forcing");
}

Matrix solve(const SparseAdjacency& a, const Matrix& h0, const Matrix& b, double horizon,
             double step, SolveStats* stats) {
  check_problem(a, h0, b);
  Matrix h = h0;
  Matrix work[5] = {h0, h0, h0, h0, h0};
  const auto schedule = step_schedule(horizon, step);
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    rk4_step(a, b, schedule[s], h, work);
    if (!all_finite(h)) {
      throw NumericError("rk4_solve: non-finite state after step " + std::to_string(s));
    }
  }
  if (stats != nullptr) {
    stats->steps += schedule.size();
    stats->nfe += 4 * schedule.size();
  }
  return h;
}

}  // namespace

OdeProblem make_ode_problem(const SparseAdjacency& a, Matrix h0, double horizon, double step) {
  OdeProblem p;
  p.adjacency = &a;
  p.forcing = spmm(a, hadamard(h0, h0));
  p.initial = std::move(h0);
  p.horizon = horizon;
  p.step = step;
  return p;
}

Matrix discrete_propagate(const Matrix& h, const SparseAdjacency& a, const Matrix& h0) {
  require_same_shape(h, h0, "discrete_propagate");
  Matrix out = spmm(a, h);
  spmm_accumulate(a, hadamard(h0, h0), 1.0, out);
  return out;
}

Matrix closed_form_propagate(const Matrix& h0, const SparseAdjacency& a, int layers) {
  if (layers < 0) throw Error("closed_form_propagate: negative layer count");
  Matrix power_h = h0;                 // A^i H0
  Matrix power_s = hadamard(h0, h0);   // A^i (H0 ⊙ H0)
  Matrix series(h0.rows(), h0.cols()); // sum_{i=1..l} A^i (H0 ⊙ H0)
  for (int i = 1; i <= layers; ++i) {
    power_h = spmm(a, power_h);
    power_s = spmm(a, power_s);
    series += power_s;
  }
  return power_h + series;
}

Matrix derivative(const Matrix& h, const OdeProblem& problem) {
  check_problem(*problem.adjacency, h, problem.forcing);
  Matrix out(h.rows(), h.cols());
  eval_derivative(*problem.adjacency, h, &problem.forcing, out);
  return out;
}

std::vector<double> step_schedule(double horizon, double step) {
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw Error("ode: horizon must be >= 0");
  if (!(step > 0.0)) throw Error("ode: step must be > 0");
  std::vector<double> out;
  if (horizon == 0.0) return out;
  // Tolerate representation error so that 1 / 0.2 counts as 5 steps.
  const double ratio = horizon / step;
  auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  if (n == 0) n = 1;
  out.assign(n, step);
  out.back() = horizon - static_cast<double>(n - 1) * step;
  if (std::abs(out.back() - step) <= 1e-12 * step) out.back() = step;
  return out;
}

Matrix rk4_solve(const OdeProblem& problem, SolveStats* stats) {
  if (problem.adjacency == nullptr) throw Error("rk4_solve: problem has no adjacency");
  return solve(*problem.adjacency, problem.initial, problem.forcing, problem.horizon, problem.step,
               stats);
}

namespace ad {

Var affinity_forcing(const SparseAdjacency& a, Var h0) {
  return ad::spmm(a, ad::hadamard(h0, h0));
}

Var rk4_solve(const SparseAdjacency& a, Var initial, Var forcing, double horizon, double step,
              SolveStats* stats) {
  Tape& tape = *initial.tape();
  Matrix out = solve(a, initial.value(), forcing.value(), horizon, step, stats);
  auto schedule = step_schedule(horizon, step);
  // The stages are linear in (initial, forcing), so the reverse sweep needs
  // no saved intermediates.
  return tape.record(std::move(out), {initial, forcing},
                     [&a, initial, forcing, schedule = std::move(schedule)](const Matrix& g,
                                                                            Tape& tp) {
                       Matrix gh = g;
                       Matrix gb(g.rows(), g.cols());
                       Matrix work[5] = {gb, gb, gb, gb, gb};
                       for (std::size_t s = schedule.size(); s-- > 0;) {
                         rk4_step_backward(a, schedule[s], gh, gb, work);
                       }
                       tp.accumulate(initial, gh);
                       tp.accumulate(forcing, gb);
                     });
}

}  // namespace ad

}  // namespace tgode
