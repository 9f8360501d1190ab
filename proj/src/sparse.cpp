// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0

#include "tgode/sparse.hpp"

#include <string>

#include "tgode/error.hpp"

namespace tgode {

SparseAdjacency SparseAdjacency::zero(std::size_t n) {
  SparseAdjacency a;
  a.n = n;
  a.offsets.assign(n + 1, 0);
  return a;
}

SparseAdjacency SparseAdjacency::from_dense(const Matrix& dense) {
  if (dense.rows() != dense.cols()) throw ShapeError("from_dense: matrix is not square");
  SparseAdjacency a;
  a.n = dense.rows();
  a.offsets.assign(a.n + 1, 0);
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = 0; j < a.n; ++j) {
      if (dense(i, j) != 0.0) {
        a.columns.push_back(static_cast<std::uint32_t>(j));
        a.values.push_back(dense(i, j));
      }
    }
    a.offsets[i + 1] = a.columns.size();
  }
  return a;
}

Matrix SparseAdjacency::to_dense() const {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) out(i, columns[p]) = values[p];
  }
  return out;
}

void spmm_accumulate(const SparseAdjacency& a, const Matrix& x, double s, Matrix& y) {
  if (a.n != x.rows()) {
    throw ShapeError("spmm: adjacency is " + std::to_string(a.n) + " nodes but operand has " +
                     std::to_string(x.rows()) + " rows");
  }
  if (!y.same_shape(x)) throw ShapeError("spmm: output shape mismatch");
  const std::size_t d = x.cols();
  for (std::size_t i = 0; i < a.n; ++i) {
    double* dst = y.row(i).data();
    for (std::size_t p = a.offsets[i]; p < a.offsets[i + 1]; ++p) {
      const double w = s * a.values[p];
      const double* src = x.row(a.columns[p]).data();
      for (std::size_t c = 0; c < d; ++c) dst[c] += w * src[c];
    }
  }
}

Matrix spmm(const SparseAdjacency& a, const Matrix& x) {
  Matrix y(x.rows(), x.cols());
  spmm_accumulate(a, x, 1.0, y);
  return y;
}

}  // namespace tgode
