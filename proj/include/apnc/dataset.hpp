#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "apnc/common.hpp"
#include "apnc/instance.hpp"

namespace apnc {

struct PartitionOptions {
  std::uint32_t partition_count = 1;
  std::uint64_t block_budget_bytes = 256ull << 20;  // per-machine memory bound
};

/// Immutable collection of instances split into contiguous id-range blocks.
/// Block b holds rows [b*ceil(n/B), min((b+1)*ceil(n/B), n)), so the same
/// file and partition count always produce identical blocks.
class PartitionedDataset {
 public:
  static PartitionedDataset from_instances(std::vector<Instance> instances,
                                           std::uint32_t d_in,
                                           const PartitionOptions& opts = {}) {
    require(opts.partition_count >= 1, "partition_count must be >= 1");
    PartitionedDataset ds;
    ds.n_ = static_cast<std::uint32_t>(instances.size());
    ds.d_in_ = d_in;
    const std::uint32_t b_count = opts.partition_count;
    const std::uint32_t per =
        ds.n_ == 0 ? 1 : (ds.n_ + b_count - 1) / b_count;  // ceil(n/B)
    ds.blocks_.resize(b_count);
    for (std::uint32_t b = 0; b < b_count; ++b) {
      const std::uint64_t lo = std::min<std::uint64_t>(
          static_cast<std::uint64_t>(b) * per, ds.n_);
      const std::uint64_t hi = std::min<std::uint64_t>(
          static_cast<std::uint64_t>(b + 1) * per, ds.n_);
      auto& block = ds.blocks_[b];
      block.reserve(hi - lo);
      std::uint64_t bytes = 0;
      for (std::uint64_t i = lo; i < hi; ++i) {
        bytes += instance_bytes(instances[i]);
        block.push_back(std::move(instances[i]));
      }
      require(bytes <= opts.block_budget_bytes, "block ", b, " needs ", bytes,
              " bytes, exceeding the ", opts.block_budget_bytes,
              "-byte per-machine budget");
    }
    return ds;
  }

  std::uint32_t n() const { return n_; }
  std::uint32_t d_in() const { return d_in_; }
  std::uint32_t partition_count() const {
    return static_cast<std::uint32_t>(blocks_.size());
  }
  const std::vector<std::vector<Instance>>& blocks() const { return blocks_; }

  const Instance& instance(std::uint32_t id) const {
    require(id < n_, "instance id ", id, " out of range");
    const std::uint32_t per = (n_ + partition_count() - 1) / partition_count();
    const auto& block = blocks_[id / per];
    return block[id % per];
  }

  std::vector<Instance> all_instances() const {
    std::vector<Instance> out;
    out.reserve(n_);
    for (const auto& block : blocks_)
      for (const auto& x : block) out.push_back(x);
    return out;
  }

  /// Same contents under a different block count (content-stable).
  PartitionedDataset repartitioned(std::uint32_t partition_count,
                                   std::uint64_t budget = 256ull << 20) const {
    return from_instances(all_instances(), d_in_,
                          {partition_count, budget});
  }

 private:
  std::vector<std::vector<Instance>> blocks_;
  std::uint32_t n_ = 0;
  std::uint32_t d_in_ = 0;
};

/// Ground-truth class ids aligned with instance ids.
struct LabelVector {
  std::vector<std::uint32_t> labels;

  std::size_t size() const { return labels.size(); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view field, std::size_t line_no) {
  field = trim(field);
  double v = 0.0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  require(ec == std::errc() && ptr == field.data() + field.size(),
          "parse error at line ", line_no, ": bad number '",
          std::string(field), "'");
  return v;
}

inline long parse_long(std::string_view field, std::size_t line_no) {
  field = trim(field);
  long v = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), v);
  require(ec == std::errc() && ptr == field.data() + field.size(),
          "parse error at line ", line_no, ": bad integer '",
          std::string(field), "'");
  return v;
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open ", path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace detail

/// Loads a dense CSV (UTF-8, one instance per line, comma-separated decimal
/// floats, no label column). Ids are assigned by row order.
inline PartitionedDataset load_dense_csv(const std::string& path,
                                         const PartitionOptions& opts = {}) {
  const auto lines = detail::read_lines(path);
  std::vector<Instance> instances;
  std::size_t d_in = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string_view line = detail::trim(lines[li]);
    if (line.empty() && li + 1 == lines.size()) break;  // trailing newline
    std::vector<double> features;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const auto field = line.substr(
          start, comma == std::string_view::npos ? comma : comma - start);
      features.push_back(detail::parse_double(field, li + 1));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (instances.empty()) {
      d_in = features.size();
    } else {
      require(features.size() == d_in, "parse error at line ", li + 1,
              ": ragged row (", features.size(), " fields, expected ", d_in,
              ")");
    }
    instances.push_back(
        Instance::dense(static_cast<std::uint32_t>(instances.size()),
                        features));
  }
  require(!instances.empty(), "empty dataset: ", path);
  return PartitionedDataset::from_instances(
      std::move(instances), static_cast<std::uint32_t>(d_in), opts);
}

/// Loads "label idx:val idx:val ..." text with 1-based ascending indices
/// (libsvm-style). Indices become 0-based; d_in is the largest index seen.
inline std::pair<PartitionedDataset, LabelVector> load_sparse(
    const std::string& path, const PartitionOptions& opts = {}) {
  const auto lines = detail::read_lines(path);
  std::vector<Instance> instances;
  LabelVector labels;
  std::uint32_t d_in = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string_view line = detail::trim(lines[li]);
    if (line.empty() && li + 1 == lines.size()) break;
    Instance x;
    x.id = static_cast<std::uint32_t>(instances.size());
    std::size_t start = 0;
    bool have_label = false;
    while (start < line.size()) {
      auto end = line.find(' ', start);
      if (end == std::string_view::npos) end = line.size();
      const auto token = detail::trim(line.substr(start, end - start));
      start = end + 1;
      if (token.empty()) continue;
      if (!have_label) {
        const long label = detail::parse_long(token, li + 1);
        require(label >= 0, "parse error at line ", li + 1,
                ": negative class label ", label);
        labels.labels.push_back(static_cast<std::uint32_t>(label));
        have_label = true;
        continue;
      }
      const auto colon = token.find(':');
      require(colon != std::string_view::npos, "parse error at line ", li + 1,
              ": expected idx:val, got '", std::string(token), "'");
      const long raw_idx = detail::parse_long(token.substr(0, colon), li + 1);
      require(raw_idx >= 1, "parse error at line ", li + 1,
              ": index must be >= 1");
      const double v = detail::parse_double(token.substr(colon + 1), li + 1);
      const auto idx0 = static_cast<std::uint32_t>(raw_idx - 1);
      require(x.idx.empty() || idx0 > x.idx.back(),
              "parse error at line ", li + 1, ": indices not ascending");
      x.idx.push_back(idx0);
      x.val.push_back(v);
      d_in = std::max(d_in, idx0 + 1);
    }
    require(have_label, "parse error at line ", li + 1, ": missing label");
    instances.push_back(std::move(x));
  }
  require(!instances.empty(), "empty dataset: ", path);
  for (auto& x : instances) x.dim = d_in;
  return {PartitionedDataset::from_instances(std::move(instances), d_in, opts),
          std::move(labels)};
}

/// Labels from text: either one label per line or "id<TAB>label" lines
/// (the assignment output format).
inline LabelVector load_labels(const std::string& path) {
  const auto lines = detail::read_lines(path);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> keyed;
  LabelVector out;
  bool keyed_format = false;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const auto line = detail::trim(lines[li]);
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab != std::string_view::npos) {
      keyed_format = true;
      const long id = detail::parse_long(line.substr(0, tab), li + 1);
      const long label = detail::parse_long(line.substr(tab + 1), li + 1);
      require(id >= 0 && label >= 0, "parse error at line ", li + 1,
              ": negative id or label");
      keyed.emplace_back(static_cast<std::uint32_t>(id),
                         static_cast<std::uint32_t>(label));
    } else {
      const long label = detail::parse_long(line, li + 1);
      require(label >= 0, "parse error at line ", li + 1,
              ": negative class label");
      out.labels.push_back(static_cast<std::uint32_t>(label));
    }
  }
  if (keyed_format) {
    require(out.labels.empty(), "mixed label file formats in ", path);
    out.labels.assign(keyed.size(), 0);
    for (const auto& [id, label] : keyed) {
      require(id < keyed.size(), "label id ", id, " out of range in ", path);
      out.labels[id] = label;
    }
  }
  require(!out.labels.empty(), "empty label file: ", path);
  return out;
}

inline void save_labels(const std::string& path,
                        const std::vector<std::uint32_t>& assignment) {
  std::ofstream outf(path, std::ios::trunc);
  require(outf.good(), "cannot open ", path, " for writing");
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    outf << i << '\t' << assignment[i] << '\n';
  }
  require(outf.good(), "write failed for ", path);
}

}  // namespace apnc
