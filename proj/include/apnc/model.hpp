#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "apnc/common.hpp"
#include "apnc/kernels.hpp"
#include "apnc/matrix.hpp"
#include "apnc/serialize.hpp"

namespace apnc {

enum class Discrepancy : std::uint8_t { kL2 = 0, kL1 = 1 };
enum class Variant : std::uint8_t { kNystrom = 0, kStable = 1 };

inline const char* discrepancy_name(Discrepancy d) {
  return d == Discrepancy::kL2 ? "l2" : "l1";
}

inline Discrepancy discrepancy_from_name(const std::string& name) {
  if (name == "l2") return Discrepancy::kL2;
  if (name == "l1") return Discrepancy::kL1;
  fail("unknown discrepancy '", name, "'");
}

inline const char* variant_name(Variant v) {
  return v == Variant::kNystrom ? "nystrom" : "stable";
}

inline Variant variant_from_name(const std::string& name) {
  if (name == "nystrom") return Variant::kNystrom;
  if (name == "stable") return Variant::kStable;
  fail("unknown variant '", name, "'");
}

/// Sampled instances, partitioned into disjoint blocks (the fitters produce
/// a single block; multi-block models are supported by the embedding path).
struct Landmarks {
  std::vector<std::vector<Instance>> blocks;

  std::uint32_t l_total() const {
    std::uint32_t total = 0;
    for (const auto& b : blocks) total += static_cast<std::uint32_t>(b.size());
    return total;
  }
  std::uint32_t q() const { return static_cast<std::uint32_t>(blocks.size()); }
};

/// A fitted embedding: block-diagonal coefficients R over the landmark set,
/// plus the kernel and the discrepancy function the embedding pairs with.
/// Block b of R has exactly |landmark block b| columns.
struct ApncModel {
  Variant variant = Variant::kNystrom;
  Landmarks landmarks;
  std::vector<DenseMatrix> blocks;  // R^(b), m_b x |L^(b)|
  std::uint32_t m_effective = 0;
  std::uint32_t d_in = 0;
  KernelSpec kernel;
  Discrepancy discrepancy = Discrepancy::kL2;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> metadata;

  std::uint32_t q() const { return static_cast<std::uint32_t>(blocks.size()); }

  void validate() const {
    require(blocks.size() == landmarks.blocks.size(),
            "model has ", blocks.size(), " coefficient blocks but ",
            landmarks.blocks.size(), " landmark blocks");
    std::uint32_t row_sum = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      require(blocks[b].cols() == landmarks.blocks[b].size(),
              "coefficient block ", b, " has ", blocks[b].cols(),
              " columns for ", landmarks.blocks[b].size(), " landmarks");
      row_sum += static_cast<std::uint32_t>(blocks[b].rows());
    }
    require(row_sum == m_effective, "model m_effective=", m_effective,
            " but blocks provide ", row_sum, " rows");
  }

  std::uint64_t serialized_side_data_bytes(std::size_t b) const {
    std::uint64_t bytes = blocks[b].rows() * blocks[b].cols() * 8;
    for (const auto& inst : landmarks.blocks[b]) bytes += instance_bytes(inst);
    return bytes;
  }
};

namespace detail {

constexpr char kModelMagic[5] = {'A', 'P', 'N', 'C', '1'};
constexpr std::uint32_t kModelFormatVersion = 1;

inline void write_kernel(ByteWriter& w, const KernelSpec& k) {
  w.u8(static_cast<std::uint8_t>(k.kind));
  w.f64(k.sigma);
  w.u32(static_cast<std::uint32_t>(k.degree));
  w.f64(k.offset);
  w.f64(k.a);
  w.f64(k.b);
}

inline KernelSpec read_kernel(ByteReader& r) {
  KernelSpec k;
  const auto kind = r.u8();
  require(kind <= 3, "truncated model: bad kernel kind ", int(kind));
  k.kind = static_cast<KernelKind>(kind);
  k.sigma = r.f64();
  k.degree = static_cast<int>(r.u32());
  k.offset = r.f64();
  k.a = r.f64();
  k.b = r.f64();
  return k;
}

}  // namespace detail

/// Binary model encoding. Layout: magic "APNC1"; header {format_version u32,
/// q u32, m u32, l u32, d_in u32, discrepancy_tag u8}; per block {rows u32,
/// cols u32, row-major f64 payload}; landmark features per block; then
/// kernel spec, variant, seed, and metadata. All floats little-endian f64.
inline Bytes encode_model(const ApncModel& model) {
  model.validate();
  Bytes out;
  ByteWriter w(out);
  out.append(detail::kModelMagic, 5);
  w.u32(detail::kModelFormatVersion);
  w.u32(model.q());
  w.u32(model.m_effective);
  w.u32(model.landmarks.l_total());
  w.u32(model.d_in);
  w.u8(static_cast<std::uint8_t>(model.discrepancy));
  for (const auto& block : model.blocks) {
    w.u32(static_cast<std::uint32_t>(block.rows()));
    w.u32(static_cast<std::uint32_t>(block.cols()));
    for (std::size_t i = 0; i < block.rows(); ++i) {
      for (std::size_t j = 0; j < block.cols(); ++j) w.f64(block(i, j));
    }
  }
  for (const auto& lb : model.landmarks.blocks) {
    w.u32(static_cast<std::uint32_t>(lb.size()));
    for (const auto& inst : lb) {
      const Bytes enc = encode_instance(inst);
      out.append(enc);
    }
  }
  detail::write_kernel(w, model.kernel);
  w.u8(static_cast<std::uint8_t>(model.variant));
  w.u64(model.seed);
  w.u32(static_cast<std::uint32_t>(model.metadata.size()));
  for (const auto& [key, value] : model.metadata) {
    w.bytes(key);
    w.bytes(value);
  }
  return out;
}

inline ApncModel decode_model(const Bytes& raw) {
  require(raw.size() >= 5 && raw.compare(0, 5, detail::kModelMagic, 5) == 0,
          "not an APNC model: bad magic");
  const Bytes body = raw.substr(5);
  ByteReader r(body, "truncated model");
  ApncModel model;
  const auto version = r.u32();
  require(version == detail::kModelFormatVersion,
          "unsupported model format version ", version);
  const auto q = r.u32();
  model.m_effective = r.u32();
  const auto l_total = r.u32();
  model.d_in = r.u32();
  const auto dtag = r.u8();
  require(dtag <= 1, "truncated model: bad discrepancy tag");
  model.discrepancy = static_cast<Discrepancy>(dtag);

  for (std::uint32_t b = 0; b < q; ++b) {
    const auto rows = r.u32();
    const auto cols = r.u32();
    require(static_cast<std::uint64_t>(rows) * cols * 8 <= r.remaining(),
            "truncated model");
    DenseMatrix block(rows, cols);
    for (std::uint32_t i = 0; i < rows; ++i) {
      for (std::uint32_t j = 0; j < cols; ++j) block(i, j) = r.f64();
    }
    model.blocks.push_back(std::move(block));
  }
  std::uint32_t landmark_count = 0;
  for (std::uint32_t b = 0; b < q; ++b) {
    const auto count = r.u32();
    std::vector<Instance> lb;
    lb.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
      Instance inst = decode_instance(r, model.d_in);
      for (auto ix : inst.idx) {
        require(ix < model.d_in, "dimension mismatch: landmark feature index ",
                ix, " >= d_in ", model.d_in);
      }
      lb.push_back(std::move(inst));
    }
    landmark_count += count;
    model.landmarks.blocks.push_back(std::move(lb));
  }
  require(landmark_count == l_total, "dimension mismatch: header says l=",
          l_total, " but payload has ", landmark_count, " landmarks");
  model.kernel = detail::read_kernel(r);
  const auto vtag = r.u8();
  require(vtag <= 1, "truncated model: bad variant tag");
  model.variant = static_cast<Variant>(vtag);
  model.seed = r.u64();
  const auto meta_count = r.u32();
  for (std::uint32_t i = 0; i < meta_count; ++i) {
    Bytes key = r.bytes();
    model.metadata[key] = r.bytes();
  }
  require(r.at_end(), "truncated model: trailing bytes");
  model.validate();
  return model;
}

inline void save_model(const ApncModel& model, const std::string& path) {
  write_file(path, encode_model(model));
}

inline ApncModel load_model(const std::string& path) {
  return decode_model(read_file(path));
}

}  // namespace apnc
