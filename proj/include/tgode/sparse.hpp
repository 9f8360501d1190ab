// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tgode/matrix.hpp"

namespace tgode {

// Square sparse matrix in compressed sparse row layout. Built by
// build_adjacency() it is symmetric with a zero diagonal and carries the
// weights 1/sqrt(deg_i * deg_j).
struct SparseAdjacency {
  std::size_t n = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> columns;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return columns.size(); }
  std::size_t degree(std::size_t row) const noexcept { return offsets[row + 1] - offsets[row]; }

  static SparseAdjacency zero(std::size_t n);
  // Keeps every nonzero of `dense`; for tests and small oracles.
  static SparseAdjacency from_dense(const Matrix& dense);
  Matrix to_dense() const;
};

// Y = A X.
Matrix spmm(const SparseAdjacency& a, const Matrix& x);
// y += s * A X without allocating.
void spmm_accumulate(const SparseAdjacency& a, const Matrix& x, double s, Matrix& y);

}  // namespace tgode
