#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "apnc/common.hpp"
#include "apnc/instance.hpp"

namespace apnc {

using Bytes = std::string;

/// Appends little-endian fixed-width values to a byte buffer.
class ByteWriter {
 public:
  explicit ByteWriter(Bytes& out) : out_(out) {}

  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }

  void f64_span(std::span<const double> vs) {
    raw(vs.data(), vs.size() * sizeof(double));
  }

  void bytes(const Bytes& b) {
    u32(static_cast<std::uint32_t>(b.size()));
    out_.append(b);
  }

 private:
  void raw(const void* p, std::size_t n) {
    out_.append(static_cast<const char*>(p), n);
  }
  Bytes& out_;
};

/// Reads little-endian values from a byte buffer; underruns raise `context`.
class ByteReader {
 public:
  ByteReader(const Bytes& in, std::string context)
      : in_(in), context_(std::move(context)) {}

  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(in_[pos_++]);
  }
  std::uint32_t u32() {
    std::uint32_t v;
    copy(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    copy(&v, 8);
    return v;
  }
  double f64() {
    double v;
    copy(&v, 8);
    return v;
  }

  void f64_into(std::span<double> out) {
    copy(out.data(), out.size() * sizeof(double));
  }

  Bytes bytes() {
    const auto n = u32();
    need(n);
    Bytes b = in_.substr(pos_, n);
    pos_ += n;
    return b;
  }

  bool at_end() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) {
    require(pos_ + n <= in_.size(), context_);
  }
  void copy(void* p, std::size_t n) {
    need(n);
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  const Bytes& in_;
  std::string context_;
  std::size_t pos_ = 0;
};

inline Bytes encode_instance(const Instance& x) {
  Bytes out;
  ByteWriter w(out);
  w.u32(x.id);
  w.u32(static_cast<std::uint32_t>(x.nnz()));
  for (std::size_t k = 0; k < x.idx.size(); ++k) {
    w.u32(x.idx[k]);
    w.f64(x.val[k]);
  }
  return out;
}

inline Instance decode_instance(ByteReader& r, std::uint32_t dim) {
  Instance x;
  x.id = r.u32();
  x.dim = dim;
  const auto nnz = r.u32();
  x.idx.resize(nnz);
  x.val.resize(nnz);
  for (std::uint32_t k = 0; k < nnz; ++k) {
    x.idx[k] = r.u32();
    x.val[k] = r.f64();
  }
  return x;
}

inline Bytes encode_f64_vector(std::span<const double> v) {
  Bytes out;
  ByteWriter w(out);
  w.f64_span(v);
  return out;
}

inline std::vector<double> decode_f64_vector(const Bytes& b,
                                             const std::string& context) {
  require(b.size() % 8 == 0, context);
  std::vector<double> v(b.size() / 8);
  ByteReader r(b, context);
  r.f64_into(v);
  return v;
}

inline void write_file(const std::string& path, const Bytes& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), "cannot open ", path, " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  require(out.good(), "write failed for ", path);
}

inline Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open ", path);
  Bytes content((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return content;
}

}  // namespace apnc
