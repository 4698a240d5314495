#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "apnc/common.hpp"

namespace apnc {

using DenseVector = std::vector<double>;

/// Column-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  /// Adopts `data` (column-major), rejecting size mismatches and non-finite
  /// entries.
  static DenseMatrix from_data(std::size_t rows, std::size_t cols,
                               DenseVector data) {
    require(data.size() == rows * cols, "matrix data size ", data.size(),
            " does not match ", rows, "x", cols);
    for (double v : data) {
      require(std::isfinite(v), "matrix entry is not finite");
    }
    DenseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[j * rows_ + i];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[j * rows_ + i];
  }

  std::span<double> col(std::size_t j) {
    return {data_.data() + j * rows_, rows_};
  }
  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  const DenseVector& data() const { return data_; }
  DenseVector& data() { return data_; }

  DenseMatrix transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
  }

  bool all_finite() const {
    for (double v : data_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  DenseVector data_;
};

/// C = A * B. Accumulation runs k-ascending for every output entry, so the
/// result is bit-stable for a given pair of operands.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions ", a.cols(), " vs ",
          b.rows());
  DenseMatrix c(a.rows(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    auto cj = c.col(j);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      const auto ak = a.col(k);
      for (std::size_t i = 0; i < a.rows(); ++i) cj[i] += ak[i] * bkj;
    }
  }
  return c;
}

/// y = A * x with j-ascending accumulation per output row.
inline DenseVector matvec(const DenseMatrix& a, std::span<const double> x) {
  require(a.cols() == x.size(), "matvec: dimension ", a.cols(), " vs ",
          x.size());
  DenseVector y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const double xj = x[j];
    const auto aj = a.col(j);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] += aj[i] * xj;
  }
  return y;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

inline double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double frobenius_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace apnc
