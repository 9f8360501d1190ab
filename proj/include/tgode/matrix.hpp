// Copyright 2026 The tgode Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense row-major matrices of doubles and the handful of kernels the model
// needs. Everything here is value-semantic; shape mismatches throw.

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace tgode {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix column(std::initializer_list<double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  void fill(double v);

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s);

  // this += s * other
  Matrix& add_scaled(const Matrix& other, double s);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

Matrix hadamard(const Matrix& a, const Matrix& b);
// a (n x k) times b (k x m).
Matrix matmul(const Matrix& a, const Matrix& b);
// a (n x k) times b^T where b is (m x k).
Matrix matmul_bt(const Matrix& a, const Matrix& b);
// a^T (k x n) times b (n x m), a is (n x k).
Matrix matmul_at(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix identity(std::size_t n);

double dot(std::span<const double> a, std::span<const double> b);
double sum(const Matrix& a);
double max_abs(const Matrix& a);
double max_abs_diff(const Matrix& a, const Matrix& b);

// Numerically stable logistic function; finite for any finite input.
double sigmoid(double x);
Matrix sigmoid(const Matrix& x);
// ln(sigmoid(x)) without underflow for large negative x.
double log_sigmoid(double x);

void require_same_shape(const Matrix& a, const Matrix& b, std::string_view op);
// Throws NumericError naming `where` when any entry is NaN or infinite.
void require_finite(const Matrix& a, std::string_view where);
bool all_finite(const Matrix& a);

}  // namespace tgode
