#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "vism/errors.hpp"
#include "vism/numeric.hpp"

namespace vism {

/// Row-major dense matrix. Small and deliberately plain: the solver only
/// needs element access, row views and a symmetric check.
template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n, const T& one = T(1), const T& zero = T(0)) {
    DenseMatrix m(n, n, zero);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
T max_abs_entry(const DenseMatrix<T>& m) {
  T best = 0;
  for (const auto& v : m.data())
    if (abs(v) > best) best = abs(v);
  return best;
}

template <class T>
T frobenius_norm(const DenseMatrix<T>& m) {
  T sum = 0;
  for (const auto& v : m.data()) sum += v * v;
  return sqrt(sum);
}

/// Infinity norm (max absolute row sum).
template <class T>
T inf_norm(const DenseMatrix<T>& m) {
  T best = 0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    T s = 0;
    for (const auto& v : m.row(r)) s += abs(v);
    if (s > best) best = s;
  }
  return best;
}

/// Largest |m(i,j) - m(j,i)|.
template <class T>
T asymmetry(const DenseMatrix<T>& m) {
  T worst = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      T d = abs(m(i, j) - m(j, i));
      if (d > worst) worst = d;
    }
  return worst;
}

/// Decimal-string CSV, row-major, one matrix row per line.
inline void write_matrix_csv(std::ostream& os, const DenseMatrix<HPReal>& m, unsigned digits) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << to_decimal(m(r, c), digits);
    }
    os << '\n';
  }
}

}  // namespace vism
