#pragma once

#include <cstdint>
#include <vector>

#include "apnc/common.hpp"

namespace apnc {

/// One data instance: a 0-based global id plus a sparse feature vector over
/// dimensions [0, dim). Dense data is stored with indices 0..dim-1.
struct Instance {
  std::uint32_t id = 0;
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> idx;  // strictly increasing, all < dim
  std::vector<double> val;

  static Instance dense(std::uint32_t id, const std::vector<double>& features) {
    Instance x;
    x.id = id;
    x.dim = static_cast<std::uint32_t>(features.size());
    x.idx.resize(features.size());
    x.val = features;
    for (std::uint32_t i = 0; i < x.dim; ++i) x.idx[i] = i;
    return x;
  }

  std::size_t nnz() const { return idx.size(); }

  std::vector<double> to_dense() const {
    std::vector<double> out(dim, 0.0);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = val[k];
    return out;
  }

  void check(std::uint32_t expected_dim) const {
    require(dim == expected_dim, "instance ", id, " has dimension ", dim,
            ", expected ", expected_dim);
  }
};

/// Serialized footprint of an instance (id + nnz + index/value pairs), used
/// for the per-block memory budget and shuffle byte accounting.
inline std::uint64_t instance_bytes(const Instance& x) {
  return 8 + 12 * static_cast<std::uint64_t>(x.nnz());
}

/// Inner product, merged in index order; sums accumulate in doubles.
inline double dot(const Instance& x, const Instance& y) {
  require(x.dim == y.dim, "dimension mismatch: ", x.dim, " vs ", y.dim);
  double s = 0.0;
  std::size_t a = 0, b = 0;
  while (a < x.idx.size() && b < y.idx.size()) {
    if (x.idx[a] == y.idx[b]) {
      s += x.val[a] * y.val[b];
      ++a;
      ++b;
    } else if (x.idx[a] < y.idx[b]) {
      ++a;
    } else {
      ++b;
    }
  }
  return s;
}

/// Squared Euclidean distance, merged in index order. Identical feature
/// vectors give exactly 0.
inline double squared_distance(const Instance& x, const Instance& y) {
  require(x.dim == y.dim, "dimension mismatch: ", x.dim, " vs ", y.dim);
  double s = 0.0;
  std::size_t a = 0, b = 0;
  while (a < x.idx.size() || b < y.idx.size()) {
    double d;
    if (b >= y.idx.size() || (a < x.idx.size() && x.idx[a] < y.idx[b])) {
      d = x.val[a];
      ++a;
    } else if (a >= x.idx.size() || y.idx[b] < x.idx[a]) {
      d = -y.val[b];
      ++b;
    } else {
      d = x.val[a] - y.val[b];
      ++a;
      ++b;
    }
    s += d * d;
  }
  return s;
}

}  // namespace apnc
