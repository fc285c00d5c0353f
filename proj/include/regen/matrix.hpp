// Copyright 2026 The regen Authors
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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "regen/error.hpp"
#include "regen/galois.hpp"

namespace regen {

/// Dense row-major matrix of field elements.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = gf::Element(1);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  gf::Element& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  gf::Element operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<gf::Element> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const gf::Element> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::vector<gf::Element> column(std::size_t c) const {
    std::vector<gf::Element> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  Matrix select_columns(std::span<const std::size_t> cols) const {
    Matrix out(rows_, cols.size());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
    return out;
  }

  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = r + 1; c < cols_; ++c)
        if ((*this)(r, c) != (*this)(c, r)) return false;
    return true;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<gf::Element> data_;
};

inline Matrix multiply(const gf::Field& f, const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::LengthMismatch, "matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const gf::Element aik = a(i, k);
      if (aik.is_zero()) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += f.mul(aik, b(k, j));
    }
  return out;
}

/// Row vector times matrix.
inline std::vector<gf::Element> multiply(const gf::Field& f, std::span<const gf::Element> v,
                                         const Matrix& m) {
  if (v.size() != m.rows()) throw Error(Errc::LengthMismatch, "vector-matrix shape mismatch");
  std::vector<gf::Element> out(m.cols());
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k].is_zero()) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += f.mul(v[k], m(k, j));
  }
  return out;
}

inline gf::Element dot(const gf::Field& f, std::span<const gf::Element> x,
                       std::span<const gf::Element> y) {
  if (x.size() != y.size()) throw Error(Errc::LengthMismatch, "inner product length mismatch");
  gf::Element acc{};
  for (std::size_t i = 0; i < x.size(); ++i) acc += f.mul(x[i], y[i]);
  return acc;
}

/// Gauss-Jordan inversion. Throws SingularMatrix.
inline Matrix invert(const gf::Field& f, Matrix a) {
  if (a.rows() != a.cols()) throw Error(Errc::LengthMismatch, "cannot invert a non-square matrix");
  const std::size_t n = a.rows();
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a(pivot, col).is_zero()) ++pivot;
    if (pivot == n) throw Error(Errc::SingularMatrix, "matrix is singular");
    if (pivot != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(pivot, j));
        std::swap(inv(col, j), inv(pivot, j));
      }
    }
    const gf::Element scale = f.inv(a(col, col));
    for (std::size_t j = 0; j < n; ++j) {
      a(col, j) = f.mul(a(col, j), scale);
      inv(col, j) = f.mul(inv(col, j), scale);
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const gf::Element factor = a(r, col);
      if (factor.is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        a(r, j) += f.mul(factor, a(col, j));
        inv(r, j) += f.mul(factor, inv(col, j));
      }
    }
  }
  return inv;
}

}  // namespace regen
