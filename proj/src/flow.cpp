#include "gsim/flow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gsim {

SequentialProducer::SequentialProducer(const ProducerSpec& spec) : spec_(spec) {
  current_.kind = spec.kind;
  current_.channel = spec.channel;
  current_.bytes = spec.record_bytes;
  current_.source = spec.source;
  current_.count = 1;
  current_.region = spec.region;
  current_.payload = spec.record_bytes;
}

const MemRequest* SequentialProducer::front() {
  if (next_ >= spec_.count || next_ >= limit_) return nullptr;
  current_.address = spec_.base + next_ * spec_.record_bytes;
  current_.first = spec_.first_index + next_;
  return &current_;
}

void SequentialProducer::pop() { ++next_; }

void CacheLineMerge::flush() {
  if (!has_pending_) return;
  out_.push_back(pending_);
  has_pending_ = false;
}

const MemRequest* CacheLineMerge::front() {
  while (out_.empty()) {
    const MemRequest* r = in_.front();
    if (r == nullptr) {
      if (has_pending_ && in_.exhausted()) flush();
      break;
    }
    const MemRequest req = *r;
    in_.pop();
    const std::uint64_t end = req.address + std::max<std::uint32_t>(req.bytes, 1);
    const std::uint64_t l0 = req.address / kLineBytes;
    const std::uint64_t l1 = (end - 1) / kLineBytes;
    for (std::uint64_t l = l0; l <= l1; ++l) {
      if (has_pending_ && pending_line_ != l) flush();
      if (!has_pending_) {
        pending_ = req;
        pending_.address = l * kLineBytes;
        pending_.bytes = kLineBytes;
        pending_.count = 0;
        pending_.payload = 0;
        pending_.flags = 0;
        pending_line_ = l;
        has_pending_ = true;
      }
      if (l == l1) {
        if (pending_.count == 0) pending_.first = req.first;
        pending_.count += req.count;
        pending_.payload += req.payload;
        pending_.flags |= req.flags;
      }
    }
    if (end % kLineBytes == 0) flush();
  }
  return out_.empty() ? nullptr : &out_.front();
}

const MemRequest* RoundRobinMerge::front() {
  const std::size_t n = inputs_.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t i = (cursor_ + k) % n;
    if (const MemRequest* r = inputs_[i]->front()) {
      chosen_ = i;
      return r;
    }
  }
  return nullptr;
}

void RoundRobinMerge::pop() {
  inputs_[chosen_]->pop();
  cursor_ = (chosen_ + 1) % inputs_.size();
}

bool RoundRobinMerge::exhausted() {
  return std::all_of(inputs_.begin(), inputs_.end(), [](RequestStream* s) { return s->exhausted(); });
}

const MemRequest* PriorityMerge::front() {
  for (std::size_t i = 0; i < inputs_.size(); ++i) {
    if (const MemRequest* r = inputs_[i]->front()) {
      chosen_ = i;
      return r;
    }
  }
  return nullptr;
}

void PriorityMerge::pop() { inputs_[chosen_]->pop(); }

bool PriorityMerge::exhausted() {
  return std::all_of(inputs_.begin(), inputs_.end(), [](RequestStream* s) { return s->exhausted(); });
}

const MemRequest* Filter::front() {
  while (const MemRequest* r = in_.front()) {
    if (keep_(*r)) return r;
    in_.pop();
    ++dropped_;
  }
  return nullptr;
}

Crossbar::Crossbar(std::vector<Output> outputs, std::function<std::uint32_t(VertexId)> route,
                   std::vector<std::uint64_t>& cursors, std::uint32_t source, std::uint32_t record_bytes)
    : outputs_(std::move(outputs)), route_(std::move(route)), cursors_(cursors), source_(source),
      record_bytes_(record_bytes) {
  if (cursors_.size() != outputs_.size()) throw Error("crossbar: cursor count does not match outputs");
  for (std::size_t i = 0; i < outputs_.size(); ++i) {
    queues_.push_back(std::make_unique<QueueStream>());
    merges_.push_back(std::make_unique<CacheLineMerge>(*queues_.back()));
  }
}

std::uint32_t Crossbar::push(VertexId dst) {
  const std::uint32_t q = route_(dst);
  if (q >= outputs_.size()) throw Error("crossbar: vertex " + std::to_string(dst) + " routed to missing output");
  const Output& o = outputs_[q];
  std::uint64_t& cur = cursors_[q];
  if (cur >= o.capacity) throw Error("crossbar: update queue " + std::to_string(q) + " overflow");
  MemRequest r;
  r.kind = AccessKind::Write;
  r.channel = o.channel;
  r.address = o.base + cur * record_bytes_;
  r.bytes = record_bytes_;
  r.source = source_;
  r.first = cur;
  r.count = 1;
  r.region = RegionKind::Updates;
  r.payload = record_bytes_;
  queues_[q]->push(r);
  ++cur;
  ++pushed_;
  return q;
}

void Crossbar::close() {
  for (auto& q : queues_) q->close();
}

void CompletionFrontier::complete(std::uint64_t first, std::uint64_t count) {
  if (count == 0) return;
  if (first != prefix_) {
    ranges_.emplace(first, count);
    return;
  }
  prefix_ += count;
  for (auto it = ranges_.begin(); it != ranges_.end() && it->first == prefix_; it = ranges_.erase(it)) {
    prefix_ += it->second;
  }
}

void CallbackRegistry::register_callback(std::uint32_t source, Action action) {
  if (actions_.size() <= source) actions_.resize(source + 1);
  actions_[source] = std::move(action);
}

void CallbackRegistry::dispatch(const MemRequest& r) const {
  if (r.source >= actions_.size() || !actions_[r.source]) {
    throw Error("no completion handler for source " + std::to_string(r.source));
  }
  actions_[r.source](r);
}

std::uint64_t SimClock::dram_cycle_of(std::uint64_t a) const {
  return static_cast<std::uint64_t>(std::floor(double(a) * dram_mhz / accel_mhz + 1e-9));
}

LoopResult run(Model& model, Dram& dram, const RunOptions& options) {
  if (options.accel_mhz <= 0.0) throw Error("accelerator clock must be positive");
  LoopResult out;
  SimClock clock{options.accel_mhz, dram.config().clock_mhz};
  std::vector<Completion> trace_rows;
  std::uint64_t quiet = 0;
  const std::uint32_t endpoints = model.endpoints();

  while (!(model.done() && dram.idle())) {
    bool progress = false;
    if (dram.cycle() >= clock.dram_cycle_of(clock.accel_cycle)) {
      progress |= model.on_cycle(clock.accel_cycle);
      for (std::uint32_t i = 0; i < endpoints; ++i) {
        RequestStream& ep = model.endpoint(i);
        const MemRequest* r = ep.front();
        if (r == nullptr || !dram.can_accept(r->channel)) continue;
        MemRequest q = *r;
        ep.pop();
        q.id = out.requests++;
        q.issue_cycle = clock.accel_cycle;
        dram.enqueue(q);
        out.payload_bytes[{q.region, q.kind}] += q.payload;
        out.line_requests[{q.region, q.kind}] += 1;
        progress = true;
      }
      ++clock.accel_cycle;
    }
    for (const Completion& c : dram.tick()) {
      if (options.trace) trace_rows.push_back(c);
      model.on_complete(c.request);
      progress = true;
    }
    if (progress || !dram.idle()) {
      quiet = 0;
    } else if (++quiet > options.stall_budget) {
      throw Error("simulation stalled: no progress for " + std::to_string(options.stall_budget) + " DRAM cycles");
    }
  }

  clock.dram_cycle = dram.cycle();
  out.dram_cycles = clock.dram_cycle;
  out.accel_cycles = clock.accel_cycle;
  out.elapsed_ns = clock.ns_from_dram();
  out.dram = dram.stats();
  for (std::uint32_t c = 0; c < dram.config().channels; ++c) out.per_channel.push_back(dram.channel_stats(c));
  if (options.trace) {
    std::sort(trace_rows.begin(), trace_rows.end(), [](const Completion& a, const Completion& b) { return a.seq < b.seq; });
    write_trace_header(*options.trace);
    for (const auto& c : trace_rows) write_trace_row(*options.trace, c);
  }
  return out;
}

}  // namespace gsim
