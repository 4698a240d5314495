#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "apnc/common.hpp"
#include "apnc/dataset.hpp"
#include "apnc/instance.hpp"
#include "apnc/matrix.hpp"
#include "apnc/rng.hpp"

namespace apnc {

enum class KernelKind : std::uint8_t {
  kRbf = 0,
  kPolynomial = 1,
  kNeural = 2,
  kLinear = 3,
};

inline const char* kernel_kind_name(KernelKind k) {
  switch (k) {
    case KernelKind::kRbf: return "rbf";
    case KernelKind::kPolynomial: return "polynomial";
    case KernelKind::kNeural: return "neural";
    case KernelKind::kLinear: return "linear";
  }
  fail("unknown kernel kind");
}

inline KernelKind kernel_kind_from_name(const std::string& name) {
  if (name == "rbf") return KernelKind::kRbf;
  if (name == "polynomial" || name == "poly") return KernelKind::kPolynomial;
  if (name == "neural") return KernelKind::kNeural;
  if (name == "linear") return KernelKind::kLinear;
  fail("unknown kernel kind '", name, "'");
}

/// A closed-form kernel function with its parameters.
///   rbf:        exp(-||x-y||^2 / (2 sigma^2))
///   polynomial: (x.y + offset)^degree
///   neural:     tanh(a x.y + b)
///   linear:     x.y
struct KernelSpec {
  KernelKind kind = KernelKind::kLinear;
  double sigma = 1.0;   // rbf
  int degree = 1;       // polynomial
  double offset = 0.0;  // polynomial
  double a = 0.0;       // neural
  double b = 0.0;       // neural

  static KernelSpec rbf(double sigma) {
    require(sigma > 0.0, "rbf sigma must be > 0, got ", sigma);
    KernelSpec k;
    k.kind = KernelKind::kRbf;
    k.sigma = sigma;
    return k;
  }

  static KernelSpec polynomial(int degree, double offset) {
    require(degree >= 1, "polynomial degree must be >= 1, got ", degree);
    KernelSpec k;
    k.kind = KernelKind::kPolynomial;
    k.degree = degree;
    k.offset = offset;
    return k;
  }

  static KernelSpec neural(double a, double b) {
    KernelSpec k;
    k.kind = KernelKind::kNeural;
    k.a = a;
    k.b = b;
    return k;
  }

  static KernelSpec linear() { return KernelSpec{}; }

  std::string describe() const {
    switch (kind) {
      case KernelKind::kRbf: return concat("rbf(sigma=", sigma, ")");
      case KernelKind::kPolynomial:
        return concat("polynomial(degree=", degree, ",offset=", offset, ")");
      case KernelKind::kNeural: return concat("neural(a=", a, ",b=", b, ")");
      case KernelKind::kLinear: return "linear";
    }
    return "?";
  }
};

inline double kernel_pair(const KernelSpec& spec, const Instance& x,
                          const Instance& y) {
  switch (spec.kind) {
    case KernelKind::kRbf: {
      const double d2 = squared_distance(x, y);
      return std::exp(-d2 / (2.0 * spec.sigma * spec.sigma));
    }
    case KernelKind::kPolynomial: {
      double base = dot(x, y) + spec.offset;
      double p = 1.0;
      for (int i = 0; i < spec.degree; ++i) p *= base;
      return p;
    }
    case KernelKind::kNeural:
      return std::tanh(spec.a * dot(x, y) + spec.b);
    case KernelKind::kLinear:
      return dot(x, y);
  }
  fail("unknown kernel kind");
}

/// Kernel column between a landmark block and one instance:
/// component j is kappa(landmarks[j], x).
inline DenseVector kernel_block(const KernelSpec& spec,
                                std::span<const Instance> landmarks,
                                const Instance& x) {
  require(!landmarks.empty(), "kernel_block: empty landmark block");
  DenseVector out(landmarks.size());
  for (std::size_t j = 0; j < landmarks.size(); ++j) {
    out[j] = kernel_pair(spec, landmarks[j], x);
  }
  return out;
}

/// Symmetric gram matrix over a set of instances. The upper triangle is
/// computed and mirrored, so G == G^T holds bit-for-bit.
inline DenseMatrix kernel_gram(const KernelSpec& spec,
                               std::span<const Instance> instances) {
  require(!instances.empty(), "kernel_gram: empty instance list");
  const std::size_t l = instances.size();
  DenseMatrix g(l, l);
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = i; j < l; ++j) {
      const double v = kernel_pair(spec, instances[i], instances[j]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

/// Root-mean-square pairwise-distance bandwidth over a seeded sample:
/// sigma = sqrt(mean ||x-y||^2 / 2) over all pairs of `sample_size` points.
inline double self_tune_rbf(const PartitionedDataset& dataset,
                            std::uint32_t sample_size, std::uint64_t seed) {
  require(sample_size >= 2, "self_tune_rbf: sample_size must be >= 2");
  require(dataset.n() >= 2, "self_tune_rbf: need at least 2 instances");
  const std::uint32_t take = std::min(sample_size, dataset.n());
  TaskRng rng(derive_seed(seed, /*job_id=*/0x5e1f));
  const auto ids = sample_distinct_indices(rng, dataset.n(), take);
  double sum = 0.0;
  std::uint64_t pairs = 0;
  for (std::uint32_t i = 0; i < take; ++i) {
    for (std::uint32_t j = i + 1; j < take; ++j) {
      sum += squared_distance(dataset.instance(ids[i]), dataset.instance(ids[j]));
      ++pairs;
    }
  }
  const double sigma = std::sqrt(sum / static_cast<double>(pairs) / 2.0);
  require(sigma > 0.0, "degenerate bandwidth: all sampled points identical");
  return sigma;
}

}  // namespace apnc
