#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "apnc/common.hpp"
#include "apnc/rng.hpp"
#include "apnc/serialize.hpp"

namespace apnc::mr {

using Key = std::uint32_t;

inline constexpr std::uint64_t kKeyWireBytes = 4;  // u32 keys on the wire

struct KeyedRecord {
  Key key = 0;
  Bytes value;

  bool operator==(const KeyedRecord&) const = default;
};

/// Accounting of one job's intermediate traffic. bytes_shuffled is summed at
/// emit time (key wire size + serialized value size per pair), so it is a
/// pure function of the emitted pairs and independent of scheduling.
struct ShuffleReport {
  std::uint64_t bytes_shuffled = 0;
  std::uint64_t records_shuffled = 0;
  std::uint32_t map_tasks = 0;
  std::uint32_t reduce_tasks = 0;
  std::uint64_t peak_side_data_bytes = 0;

  ShuffleReport& operator+=(const ShuffleReport& o) {
    bytes_shuffled += o.bytes_shuffled;
    records_shuffled += o.records_shuffled;
    map_tasks += o.map_tasks;
    reduce_tasks += o.reduce_tasks;
    peak_side_data_bytes = std::max(peak_side_data_bytes, o.peak_side_data_bytes);
    return *this;
  }

  std::string to_json_line() const {
    return concat("{\"bytes_shuffled\":", bytes_shuffled,
                  ",\"records_shuffled\":", records_shuffled,
                  ",\"map_tasks\":", map_tasks,
                  ",\"reduce_tasks\":", reduce_tasks,
                  ",\"peak_side_data_bytes\":", peak_side_data_bytes, "}");
  }
};

/// Collects map-task output. emit() goes through the shuffle (grouped by key
/// and metered); emit_local() stays in the task's local output partition and
/// moves nothing across the (simulated) network.
class Emitter {
 public:
  void emit(Key key, Bytes value) {
    shuffle_bytes_ += kKeyWireBytes + value.size();
    shuffled_.push_back({key, std::move(value)});
  }

  void emit_local(Key key, Bytes value) {
    local_.push_back({key, std::move(value)});
  }

 private:
  friend struct TaskResult;
  template <typename Rec> friend class JobRunner;
  std::vector<KeyedRecord> shuffled_;
  std::vector<KeyedRecord> local_;
  std::uint64_t shuffle_bytes_ = 0;
};

/// Per-task execution context. The RNG stream is derived from
/// (job seed, job id, task id), so sampling decisions are reproducible under
/// any worker-thread count.
struct TaskContext {
  std::uint32_t job_id = 0;
  std::uint32_t task_id = 0;
  TaskRng rng;
};

/// A map/reduce job over records of type Rec. map_task sees exactly one
/// block; reduce_fn sees all values for one key (ordered by source block,
/// then emission order) and no other key. Side data referenced by the
/// callbacks must be read-only; side_data_bytes declares its serialized size
/// for the report.
template <typename Rec>
struct MrJob {
  std::string name = "job";
  std::uint32_t job_id = 0;
  std::uint64_t seed = 0;
  std::uint64_t side_data_bytes = 0;
  std::function<void(TaskContext&, std::span<const Rec>, Emitter&)> map_task;
  // Optional; when absent the shuffle output passes through unchanged.
  std::function<void(Key, std::span<const Bytes>, Emitter&)> reduce_fn;
};

struct JobOutput {
  std::vector<KeyedRecord> records;             // reduce output, key-ascending
  std::vector<std::vector<KeyedRecord>> local;  // per map task, task order
  ShuffleReport report;
};

namespace detail {

/// Runs `fn(i)` for i in [0, count) on up to `parallelism` threads. Results
/// land in index-addressed slots, so scheduling cannot affect output order.
/// The lowest-index exception wins, matching sequential behavior.
template <typename Fn>
void parallel_for(std::size_t count, unsigned parallelism, Fn&& fn) {
  require(parallelism >= 1, "parallelism must be >= 1");
  if (count == 0) return;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(parallelism, count));
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

/// Executes one job: map over blocks, group by key (values ordered by source
/// block then emission order), reduce per key in ascending key order. Output
/// bytes are identical for any parallelism >= 1.
template <typename Rec>
JobOutput run_job(const MrJob<Rec>& job,
                  std::span<const std::vector<Rec>> blocks,
                  unsigned parallelism) {
  require(parallelism >= 1, "run_job: parallelism must be >= 1");
  require(static_cast<bool>(job.map_task), "run_job: job has no map function");

  const std::size_t task_count = blocks.size();
  std::vector<Emitter> outputs(task_count);

  detail::parallel_for(task_count, parallelism, [&](std::size_t t) {
    TaskContext ctx{job.job_id, static_cast<std::uint32_t>(t),
                    TaskRng(derive_seed(job.seed, job.job_id,
                                        static_cast<std::uint32_t>(t)))};
    try {
      job.map_task(ctx, std::span<const Rec>(blocks[t]), outputs[t]);
    } catch (const Error& e) {
      fail("job '", job.name, "' map task ", t, ": ", e.what());
    }
  });

  JobOutput result;
  result.report.map_tasks = static_cast<std::uint32_t>(task_count);
  result.report.peak_side_data_bytes = job.side_data_bytes;
  result.local.resize(task_count);
  for (std::size_t t = 0; t < task_count; ++t) {
    result.local[t] = std::move(outputs[t].local_);
    result.report.bytes_shuffled += outputs[t].shuffle_bytes_;
    result.report.records_shuffled += outputs[t].shuffled_.size();
  }

  // Shuffle: group by key; per key, values arrive in (block id, emission
  // order) so reduce-side sums are reproducible.
  std::map<Key, std::vector<Bytes>> groups;
  for (std::size_t t = 0; t < task_count; ++t) {
    for (auto& rec : outputs[t].shuffled_) {
      groups[rec.key].push_back(std::move(rec.value));
    }
  }

  result.report.reduce_tasks = static_cast<std::uint32_t>(groups.size());
  if (!job.reduce_fn) {
    for (auto& [key, values] : groups) {
      for (auto& v : values) result.records.push_back({key, std::move(v)});
    }
    return result;
  }

  std::vector<std::pair<const Key, std::vector<Bytes>>*> tasks;
  tasks.reserve(groups.size());
  for (auto& kv : groups) tasks.push_back(&kv);
  std::vector<Emitter> reduce_outputs(tasks.size());
  detail::parallel_for(tasks.size(), parallelism, [&](std::size_t r) {
    try {
      job.reduce_fn(tasks[r]->first, std::span<const Bytes>(tasks[r]->second),
                    reduce_outputs[r]);
    } catch (const Error& e) {
      fail("job '", job.name, "' reduce for key ", tasks[r]->first, ": ",
           e.what());
    }
  });
  for (auto& out : reduce_outputs) {
    for (auto& rec : out.shuffled_) {
      // Reduce output is final job output, not intermediate traffic.
      result.records.push_back(std::move(rec));
    }
    for (auto& rec : out.local_) result.records.push_back(std::move(rec));
  }
  return result;
}

/// Splits keyed records into `partition_count` contiguous blocks (by record
/// position after the key-ascending job output ordering).
inline std::vector<std::vector<KeyedRecord>> partition_by_key_ranges(
    std::vector<KeyedRecord> records, std::uint32_t partition_count) {
  require(partition_count >= 1, "partition_count must be >= 1");
  std::vector<std::vector<KeyedRecord>> blocks(partition_count);
  const std::size_t n = records.size();
  const std::size_t per = n == 0 ? 1 : (n + partition_count - 1) / partition_count;
  for (std::size_t i = 0; i < n; ++i) {
    blocks[i / per].push_back(std::move(records[i]));
  }
  return blocks;
}

/// Functional composition of run_job: each job's output is re-partitioned by
/// key ranges and fed to the next. An empty chain returns its input.
inline std::pair<std::vector<KeyedRecord>, ShuffleReport> run_chain(
    std::span<const MrJob<KeyedRecord>> jobs,
    std::vector<std::vector<KeyedRecord>> input, unsigned parallelism) {
  ShuffleReport total;
  const auto partition_count =
      static_cast<std::uint32_t>(std::max<std::size_t>(1, input.size()));
  for (const auto& job : jobs) {
    JobOutput out = run_job(job, std::span<const std::vector<KeyedRecord>>(input),
                            parallelism);
    total += out.report;
    input = partition_by_key_ranges(std::move(out.records), partition_count);
  }
  std::vector<KeyedRecord> flat;
  for (auto& block : input) {
    for (auto& rec : block) flat.push_back(std::move(rec));
  }
  return {std::move(flat), total};
}

/// Lifts a per-record map function to a task-level one.
template <typename Rec>
auto per_record(std::function<void(TaskContext&, const Rec&, Emitter&)> fn) {
  return [fn = std::move(fn)](TaskContext& ctx, std::span<const Rec> records,
                              Emitter& out) {
    for (const auto& rec : records) fn(ctx, rec, out);
  };
}

}  // namespace apnc::mr
