// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tgode/matrix.hpp"

namespace tgode {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Coefficient of lambda * ||p||^2. Its exact gradient 2 * lambda * p is
  // applied outside the adaptive scaling (decoupled decay).
  double weight_decay = 1e-3;
};

// Adaptive-moment optimizer with decoupled weight decay.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(AdamOptions options = {}) : options_(options) {}

  // Updates every params[i] from grads[i]. The first call fixes the
  // parameter shapes; later calls must match. Throws NumericError on a
  // non-finite gradient, leaving the parameters untouched.
  void step(std::span<Matrix* const> params, std::span<const Matrix> grads);

  std::uint64_t steps() const noexcept { return steps_; }
  const AdamOptions& options() const noexcept { return options_; }
  const std::vector<Matrix>& first_moments() const noexcept { return m_; }
  const std::vector<Matrix>& second_moments() const noexcept { return v_; }

 private:
  AdamOptions options_;
  std::uint64_t steps_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace tgode
