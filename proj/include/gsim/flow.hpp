#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <vector>

#include "gsim/dram.hpp"

namespace gsim {

/// Pull-based request source. front() returns the next request that may be
/// issued now, or nullptr when nothing is ready. A stream is exhausted once
/// it will never produce again.
class RequestStream {
 public:
  virtual ~RequestStream() = default;
  virtual const MemRequest* front() = 0;
  virtual void pop() = 0;
  virtual bool exhausted() = 0;
};

struct ProducerSpec {
  std::uint64_t base = 0;
  std::uint64_t count = 0;
  std::uint32_t record_bytes = 4;
  AccessKind kind = AccessKind::Read;
  std::uint32_t channel = 0;
  std::uint32_t source = 0;
  RegionKind region = RegionKind::Values;
  std::uint64_t first_index = 0;  // tag of the first record
};

/// Emits `count` record-sized requests at ascending addresses.
class SequentialProducer final : public RequestStream {
 public:
  explicit SequentialProducer(const ProducerSpec& spec);
  const MemRequest* front() override;
  void pop() override;
  bool exhausted() override { return next_ >= spec_.count; }
  std::uint64_t produced() const { return next_; }
  /// Holds back records at or beyond `limit` until the limit is raised.
  void set_limit(std::uint64_t limit) { limit_ = limit; }

 private:
  ProducerSpec spec_;
  std::uint64_t next_ = 0;
  std::uint64_t limit_ = UINT64_MAX;
  MemRequest current_;
};

/// Callback-fed FIFO. Exhausted once closed and drained.
class QueueStream final : public RequestStream {
 public:
  void push(const MemRequest& r) { queue_.push_back(r); }
  void close() { closed_ = true; }
  bool closed() const { return closed_; }
  std::size_t size() const { return queue_.size(); }
  const MemRequest* front() override { return queue_.empty() ? nullptr : &queue_.front(); }
  void pop() override { queue_.pop_front(); }
  bool exhausted() override { return closed_ && queue_.empty(); }

 private:
  std::deque<MemRequest> queue_;
  bool closed_ = false;
};

/// Collapses consecutive requests into the same 64-byte line into a single
/// line request. A record spanning two lines touches both; its tag goes to
/// the line where it ends. A line is released when the next request moves to
/// another line, when the line is filled to its end, or when the input is
/// exhausted; non-adjacent requests to a line never merge.
class CacheLineMerge final : public RequestStream {
 public:
  explicit CacheLineMerge(RequestStream& in) : in_(in) {}
  const MemRequest* front() override;
  void pop() override { out_.pop_front(); }
  bool exhausted() override { return out_.empty() && !has_pending_ && in_.exhausted(); }

 private:
  void flush();
  RequestStream& in_;
  bool has_pending_ = false;
  MemRequest pending_;
  std::uint64_t pending_line_ = 0;
  std::deque<MemRequest> out_;
};

/// Cycles through the inputs; inputs with nothing ready are skipped without
/// using up a turn.
class RoundRobinMerge final : public RequestStream {
 public:
  explicit RoundRobinMerge(std::vector<RequestStream*> inputs) : inputs_(std::move(inputs)) {}
  const MemRequest* front() override;
  void pop() override;
  bool exhausted() override;

 private:
  std::vector<RequestStream*> inputs_;
  std::size_t cursor_ = 0;
  std::size_t chosen_ = 0;
};

/// Always serves the first input (in the given order) with a ready request.
/// Lower-priority inputs may starve.
class PriorityMerge final : public RequestStream {
 public:
  explicit PriorityMerge(std::vector<RequestStream*> inputs) : inputs_(std::move(inputs)) {}
  const MemRequest* front() override;
  void pop() override;
  bool exhausted() override;

 private:
  std::vector<RequestStream*> inputs_;
  std::size_t chosen_ = 0;
};

/// Drops requests for which `keep` returns false.
class Filter final : public RequestStream {
 public:
  Filter(RequestStream& in, std::function<bool(const MemRequest&)> keep) : in_(in), keep_(std::move(keep)) {}
  const MemRequest* front() override;
  void pop() override { in_.pop(); }
  bool exhausted() override { return front() == nullptr && in_.exhausted(); }
  std::uint64_t dropped() const { return dropped_; }

 private:
  RequestStream& in_;
  std::function<bool(const MemRequest&)> keep_;
  std::uint64_t dropped_ = 0;
};

/// Flag set on write requests whose value actually changed.
inline constexpr std::uint32_t kValueChanged = 1;

inline bool value_changed(const MemRequest& r) { return (r.flags & kValueChanged) != 0; }

/// Routes update records to per-partition append-only queues, each followed
/// by its own cache line merge.
class Crossbar {
 public:
  struct Output {
    std::uint32_t channel = 0;
    std::uint64_t base = 0;
    std::uint64_t capacity = 0;  // records
  };

  /// `route` maps a destination vertex to an output index. `cursors` are the
  /// shared append positions of the outputs (shared between crossbars that
  /// write into the same queues).
  Crossbar(std::vector<Output> outputs, std::function<std::uint32_t(VertexId)> route,
           std::vector<std::uint64_t>& cursors, std::uint32_t source, std::uint32_t record_bytes = kUpdateBytes);

  /// Appends one update; returns the output it went to.
  std::uint32_t push(VertexId dst);
  void close();
  std::uint32_t outputs() const { return static_cast<std::uint32_t>(outputs_.size()); }
  RequestStream& stream(std::uint32_t i) { return *merges_[i]; }
  std::uint64_t pushed() const { return pushed_; }

 private:
  std::vector<Output> outputs_;
  std::function<std::uint32_t(VertexId)> route_;
  std::vector<std::uint64_t>& cursors_;
  std::uint32_t source_;
  std::uint32_t record_bytes_;
  std::vector<std::unique_ptr<QueueStream>> queues_;
  std::vector<std::unique_ptr<CacheLineMerge>> merges_;
  std::uint64_t pushed_ = 0;
};

/// Contiguous prefix of completed records of one sequential stream whose
/// line requests may complete out of order.
class CompletionFrontier {
 public:
  void complete(std::uint64_t first, std::uint64_t count);
  std::uint64_t prefix() const { return prefix_; }
  void reset(std::uint64_t start = 0) {
    prefix_ = start;
    ranges_.clear();
  }

 private:
  std::uint64_t prefix_ = 0;
  std::map<std::uint64_t, std::uint64_t> ranges_;
};

/// Completion dispatch keyed by the request's source id.
class CallbackRegistry {
 public:
  using Action = std::function<void(const MemRequest&)>;
  void register_callback(std::uint32_t source, Action action);
  void dispatch(const MemRequest& r) const;

 private:
  std::vector<Action> actions_;
};

/// Stable endpoint for one PE whose underlying stream changes per step.
/// Counts requests handed to memory so the owner can wait for them.
class Endpoint final : public RequestStream {
 public:
  void attach(RequestStream* s) { stream_ = s; }
  RequestStream* attached() const { return stream_; }
  const MemRequest* front() override { return stream_ ? stream_->front() : nullptr; }
  void pop() override {
    stream_->pop();
    ++outstanding_;
    ++issued_;
  }
  bool exhausted() override { return stream_ == nullptr || stream_->exhausted(); }
  void completed() { --outstanding_; }
  std::uint64_t outstanding() const { return outstanding_; }
  std::uint64_t issued() const { return issued_; }
  /// Current step fully produced and all its requests served.
  bool drained() { return exhausted() && outstanding_ == 0; }

 private:
  RequestStream* stream_ = nullptr;
  std::uint64_t outstanding_ = 0;
  std::uint64_t issued_ = 0;
};

/// An accelerator as seen by the event loop.
class Model {
 public:
  virtual ~Model() = default;
  virtual std::uint32_t endpoints() const = 0;
  virtual RequestStream& endpoint(std::uint32_t i) = 0;
  /// Delivered for each served request, in DRAM completion order.
  virtual void on_complete(const MemRequest& r) = 0;
  /// Called once per accelerator cycle before requests are issued. Returns
  /// true when the model made progress on its own (control or pipeline work).
  virtual bool on_cycle(std::uint64_t accel_cycle) = 0;
  virtual bool done() const = 0;
};

/// Maps accelerator cycles onto the DRAM clock.
struct SimClock {
  double accel_mhz = 200.0;
  double dram_mhz = 1200.0;
  std::uint64_t accel_cycle = 0;
  std::uint64_t dram_cycle = 0;

  /// DRAM cycle at which accelerator cycle `a` begins.
  std::uint64_t dram_cycle_of(std::uint64_t a) const;
  double ns_from_dram() const { return double(dram_cycle) * 1000.0 / dram_mhz; }
  double ns_from_accel() const { return double(accel_cycle) * 1000.0 / accel_mhz; }
};

struct RunOptions {
  double accel_mhz = 200.0;
  /// Abort when neither memory nor the model makes progress for this many
  /// DRAM cycles.
  std::uint64_t stall_budget = 1'000'000;
  std::ostream* trace = nullptr;
};

struct LoopResult {
  double elapsed_ns = 0.0;
  std::uint64_t dram_cycles = 0;
  std::uint64_t accel_cycles = 0;
  std::uint64_t requests = 0;
  DramStats dram;
  std::vector<DramStats> per_channel;
  // Accounting by region: payload bytes requested and line requests issued.
  std::map<std::pair<RegionKind, AccessKind>, std::uint64_t> payload_bytes;
  std::map<std::pair<RegionKind, AccessKind>, std::uint64_t> line_requests;
};

/// Runs the model to completion: at most one request per endpoint per
/// accelerator cycle enters DRAM, completions go back to the model.
LoopResult run(Model& model, Dram& dram, const RunOptions& options);

}  // namespace gsim
