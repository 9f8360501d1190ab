// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Edge-evolving dynamics on a normalized interaction graph.
//
// The discrete affinity propagation H' = A H + A (H0 ⊙ H0) has the
// continuous counterpart
//
//     dH/dt = (A - I) H + b,     b = A (H0 ⊙ H0),
//
// where b is frozen at the interval's entry state H0. The system is linear
// with constant forcing, so it is integrated here with classical fixed-step
// RK4 and differentiated by reverse sweeps through the unrolled stages.

#pragma once

#include <cstddef>
#include <vector>

#include "tgode/matrix.hpp"
#include "tgode/sparse.hpp"
#include "tgode/tape.hpp"

namespace tgode {

inline constexpr double kDefaultOdeStep = 0.2;

struct OdeProblem {
  const SparseAdjacency* adjacency = nullptr;
  Matrix initial;  // H0
  Matrix forcing;  // b
  double horizon = 1.0;
  double step = kDefaultOdeStep;
};

// Builds the problem for entry state `h0`, computing b = A (h0 ⊙ h0).
OdeProblem make_ode_problem(const SparseAdjacency& a, Matrix h0, double horizon = 1.0,
                            double step = kDefaultOdeStep);

// Derivative evaluations and steps taken by a solve.
struct SolveStats {
  std::size_t nfe = 0;
  std::size_t steps = 0;

  SolveStats& operator+=(const SolveStats& o) {
    nfe += o.nfe;
    steps += o.steps;
    return *this;
  }
};

// H' = A H + A (H0 ⊙ H0).
Matrix discrete_propagate(const Matrix& h, const SparseAdjacency& a, const Matrix& h0);

// A^l H0 + (sum_{i=1..l} A^i)(H0 ⊙ H0), by iterated products.
Matrix closed_form_propagate(const Matrix& h0, const SparseAdjacency& a, int layers);

// (A - I) H + b.
Matrix derivative(const Matrix& h, const OdeProblem& problem);

// Step sizes covering [0, horizon]: ceil(horizon / step) steps, the last one
// shortened when the step does not divide the horizon. Empty for horizon 0.
std::vector<double> step_schedule(double horizon, double step);

// State at t = horizon. Throws NumericError naming the step index when an
// intermediate state becomes non-finite.
Matrix rk4_solve(const OdeProblem& problem, SolveStats* stats = nullptr);

namespace ad {

// b = A (h0 ⊙ h0) on the tape.
Var affinity_forcing(const SparseAdjacency& a, Var h0);

// RK4 solve of dH/dt = (A - I) H + b from `initial`, recorded as one tape
// node whose backward sweeps the unrolled stages in reverse. `a` must
// outlive backward().
Var rk4_solve(const SparseAdjacency& a, Var initial, Var forcing, double horizon, double step,
              SolveStats* stats = nullptr);

}  // namespace ad

}  // namespace tgode
