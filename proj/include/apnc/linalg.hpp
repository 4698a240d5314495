#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "apnc/common.hpp"
#include "apnc/matrix.hpp"

namespace apnc {

inline constexpr double kDefaultEigFloor = 1e-10;  // relative to lambda_max

/// Eigenpairs of a symmetric matrix: values sorted descending, orthonormal
/// column vectors aligned with them.
struct EigenResult {
  DenseVector values;
  DenseMatrix vectors;  // l x r, column j pairs with values[j]
};

namespace detail {

inline double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace detail

/// Symmetric eigendecomposition by cyclic Jacobi sweeps. Deterministic:
/// fixed sweep order, stable descending sort, and a fixed sign rule (the
/// largest-magnitude component of each eigenvector is positive; ties go to
/// the lowest index). Input must be symmetric within 1e-10 relative to its
/// largest entry; it is symmetrized as (Q+Q^T)/2 before iterating.
inline EigenResult sym_eigen(const DenseMatrix& q,
                             std::optional<std::size_t> top_m = std::nullopt) {
  require(q.rows() == q.cols(), "sym_eigen: matrix is ", q.rows(), "x",
          q.cols(), ", not square");
  const std::size_t l = q.rows();
  const double scale = std::max(1.0, max_abs(q));
  DenseMatrix a(l, l);
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t i = 0; i < l; ++i) {
      require(std::abs(q(i, j) - q(j, i)) <= 1e-10 * scale,
              "sym_eigen: input is not symmetric at (", i, ",", j, ")");
      a(i, j) = 0.5 * (q(i, j) + q(j, i));
    }
  }
  DenseMatrix v = DenseMatrix::identity(l);

  const double off_tol = 1e-12 * std::max(frobenius_norm(a), 1e-300);
  constexpr int kMaxSweeps = 100;
  int sweep = 0;
  while (detail::off_diagonal_norm(a) > off_tol) {
    require(sweep < kMaxSweeps,
            "sym_eigen: failed to converge after ", kMaxSweeps, " sweeps");
    ++sweep;
    for (std::size_t p = 0; p + 1 < l; ++p) {
      for (std::size_t qi = p + 1; qi < l; ++qi) {
        const double apq = a(p, qi);
        if (apq == 0.0) continue;
        const double tau = (a(qi, qi) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // A <- J^T A J restricted to rows/cols p,q.
        for (std::size_t k = 0; k < l; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, qi);
          a(k, p) = c * akp - s * akq;
          a(k, qi) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < l; ++k) {
          const double apk = a(p, k);
          const double aqk = a(qi, k);
          a(p, k) = c * apk - s * aqk;
          a(qi, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < l; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, qi);
          v(k, p) = c * vkp - s * vkq;
          v(k, qi) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x) > a(y, y);
  });

  const std::size_t keep = top_m ? std::min(*top_m, l) : l;
  EigenResult result;
  result.values.resize(keep);
  result.vectors = DenseMatrix(l, keep);
  for (std::size_t j = 0; j < keep; ++j) {
    const std::size_t src = order[j];
    result.values[j] = a(src, src);
    auto dst = result.vectors.col(j);
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < l; ++i) {
      dst[i] = v(i, src);
      if (std::abs(dst[i]) > best) {
        best = std::abs(dst[i]);
        arg = i;
      }
    }
    if (dst[arg] < 0.0) {
      for (std::size_t i = 0; i < l; ++i) dst[i] = -dst[i];
    }
  }
  return result;
}

/// H = I - (1/l) e e^T. Symmetric and idempotent; annihilates constants.
inline DenseMatrix centering_matrix(std::size_t l) {
  require(l >= 1, "centering_matrix: l must be >= 1");
  DenseMatrix h(l, l);
  const double inv = 1.0 / static_cast<double>(l);
  for (std::size_t j = 0; j < l; ++j) {
    for (std::size_t i = 0; i < l; ++i) h(i, j) = (i == j ? 1.0 : 0.0) - inv;
  }
  return h;
}

/// Indices of eigenvalues above `floor_rel * lambda_max` (lambda_max being
/// the largest eigenvalue). Negative and near-zero eigenvalues are dropped.
inline std::vector<std::size_t> retained_above_floor(const DenseVector& values,
                                                     double floor_rel) {
  std::vector<std::size_t> keep;
  if (values.empty()) return keep;
  const double lambda_max = values[0];
  if (lambda_max <= 0.0) return keep;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > floor_rel * lambda_max) keep.push_back(i);
  }
  return keep;
}

/// E = Lambda_+^{-1/2} V^T over eigenpairs above the floor; r x l with r the
/// retained rank, and E Q E^T = I_r on the retained subspace.
inline DenseMatrix inv_sqrt_psd(const DenseMatrix& q,
                                double eig_floor = kDefaultEigFloor) {
  const EigenResult eig = sym_eigen(q);
  const auto keep = retained_above_floor(eig.values, eig_floor);
  require(!keep.empty(), "rank-zero matrix: no eigenvalue above the floor");
  const std::size_t l = q.rows();
  DenseMatrix e(keep.size(), l);
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const double w = 1.0 / std::sqrt(eig.values[keep[r]]);
    const auto vcol = eig.vectors.col(keep[r]);
    for (std::size_t j = 0; j < l; ++j) e(r, j) = w * vcol[j];
  }
  return e;
}

}  // namespace apnc
