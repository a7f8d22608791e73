#include <algorithm>

#include "model_base.hpp"

namespace gsim::detail {

namespace {

enum Slot : std::uint32_t { kPrefetch, kDstValues, kPointers, kNeighbors, kWrites };

class AccuGraph final : public ModelBase {
 public:
  AccuGraph(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval)
      : ModelBase(g, cfg, root, 1), layout_(horizontal_csr(g, interval, true)) {
    edge_record_bytes_ = 4;
    k_ = static_cast<std::uint32_t>(layout_.partitions.size());
    dirty_.assign(k_, 0);
    for (VertexId v = 0; v < g.n; ++v) {
      if (initially_active(spec_, values_[v])) dirty_[v / interval] = 1;
    }
    if (spec_.reduction == Reduction::Sum) start_sum_iteration();

    callbacks_.register_callback(source_id(0, kPrefetch), [this](const MemRequest& r) { prefetched_.complete(r.first, r.count); });
    callbacks_.register_callback(source_id(0, kDstValues), [this](const MemRequest& r) { dst_.complete(r.first, r.count); });
    callbacks_.register_callback(source_id(0, kPointers), [this](const MemRequest& r) {
      ptr_.complete(r.first, r.count);
      if (neighbors_ && ptr_.prefix() > 0) neighbors_->set_limit(current().pointers[ptr_.prefix() - 1]);
    });
    callbacks_.register_callback(source_id(0, kNeighbors), [this](const MemRequest& r) { nbr_.complete(r.first, r.count); });
    callbacks_.register_callback(source_id(0, kWrites), [](const MemRequest&) {});
  }

  std::vector<std::uint64_t> footprint() const override { return {layout_.memory.payload_bytes(0)}; }

  bool on_cycle(std::uint64_t cycle) override {
    switch (phase_) {
      case Phase::Start: return start();
      case Phase::Prefetch:
        if (!eps_[0].drained()) return false;
        onchip_ = static_cast<std::int64_t>(part_);
        begin_process();
        return true;
      case Phase::Process: return process(cycle);
      case Phase::Done: return false;
    }
    return false;
  }

 private:
  enum class Phase { Start, Prefetch, Process, Done };

  const CsrPartition& current() const { return layout_.partitions[part_]; }

  void start_sum_iteration() {
    base_ = values_;
    acc_.assign(g_.n, identity(spec_));
  }

  bool start() {
    while (part_ < k_ && cfg_.optimizations.has(Optimization::PartitionSkip) && !dirty_[part_]) ++part_;
    if (part_ == k_) {
      if (finish_iteration(changed_)) {
        part_ = 0;
        changed_ = false;
        if (spec_.reduction == Reduction::Sum) start_sum_iteration();
      } else {
        phase_ = Phase::Done;
        detach(0);
      }
      return true;
    }
    dirty_[part_] = 0;
    if (cfg_.optimizations.has(Optimization::PrefetchSkip) && onchip_ == static_cast<std::int64_t>(part_)) {
      begin_process();
      return true;
    }
    const PartitionInfo& info = current().info;
    steps_[0].clear();
    prefetched_.reset();
    attach(0, steps_[0].sequential(spec(0, kPrefetch, 0, RegionKind::Values, AccessKind::Read, info.value_base,
                                        info.size(), kValueBytes)));
    phase_ = Phase::Prefetch;
    return true;
  }

  void begin_process() {
    const CsrPartition& part = current();
    Step& s = steps_[0];
    s.clear();
    dst_.reset();
    ptr_.reset();
    nbr_.reset();
    next_v_ = 0;
    busy_until_ = 0;

    auto& dv = s.sequential(spec(0, kDstValues, 0, RegionKind::Values, AccessKind::Read, layout_.values_base, g_.n,
                                 kValueBytes));
    auto& pt = s.sequential(spec(0, kPointers, 0, RegionKind::Pointers, AccessKind::Read, part.info.pointer_base,
                                 std::uint64_t{g_.n} + 1, kPointerBytes));
    neighbors_ = &s.add<SequentialProducer>(
        spec(0, kNeighbors, 0, RegionKind::Edges, AccessKind::Read, part.info.edge_base, part.neighbors.size(), 4));
    neighbors_->set_limit(0);
    auto& nb = s.add<CacheLineMerge>(*neighbors_);
    writes_ = &s.add<QueueStream>();
    auto& filtered = s.add<Filter>(*writes_, value_changed);
    auto& wm = s.add<CacheLineMerge>(filtered);
    auto& rr = s.add<RoundRobinMerge>(std::vector<RequestStream*>{&dv, &pt});
    attach(0, s.add<PriorityMerge>(std::vector<RequestStream*>{&wm, &nb, &rr}));
    phase_ = Phase::Process;
  }

  bool process(std::uint64_t cycle) {
    const CsrPartition& part = current();
    bool progress = false;
    if (next_v_ < g_.n && cycle >= busy_until_) {
      const VertexId v = next_v_;
      const std::uint32_t b = part.pointers[v], e = part.pointers[v + 1];
      if (dst_.prefix() > v && ptr_.prefix() > std::uint64_t{v} + 1 && nbr_.prefix() >= e) {
        update_vertex(part, v, b, e);
        const std::uint32_t deg = e - b;
        busy_until_ = cycle + std::max<std::uint64_t>(1, (deg + cfg_.pipeline_width - 1) / cfg_.pipeline_width);
        ++next_v_;
        progress = true;
      }
    }
    if (next_v_ == g_.n && !writes_->closed()) {
      writes_->close();
      progress = true;
    }
    if (writes_->closed() && eps_[0].drained()) {
      neighbors_ = nullptr;
      ++part_;
      phase_ = Phase::Start;
      progress = true;
    }
    return progress;
  }

  void update_vertex(const CsrPartition& part, VertexId v, std::uint32_t b, std::uint32_t e) {
    bool write = false;
    bool changed = false;
    if (spec_.reduction == Reduction::Sum) {
      for (std::uint32_t i = b; i < e; ++i) {
        VertexId u = part.neighbors[i];
        acc_[v] = reduce(spec_, acc_[v], edge_update(spec_, base_[u], 1, out_deg_[u]));
      }
      if (part_ + 1 == k_) {
        values_[v] = apply(spec_, acc_[v], base_[v], g_.n).value;
        write = changed = true;
      } else if (e > b) {
        write = changed = true;
      }
    } else {
      Value acc = identity(spec_);
      for (std::uint32_t i = b; i < e; ++i) {
        VertexId u = part.neighbors[i];
        acc = reduce(spec_, acc, edge_update(spec_, values_[u], 1, out_deg_[u]));
      }
      Applied a = apply(spec_, acc, values_[v], g_.n);
      write = true;
      if (a.changed) {
        values_[v] = a.value;
        dirty_[v / layout_.config.interval_size] = 1;
        changed_ = changed = true;
      }
    }
    if (!write) return;
    MemRequest w;
    w.kind = AccessKind::Write;
    w.address = layout_.values_base + std::uint64_t{v} * kValueBytes;
    w.bytes = kValueBytes;
    w.source = source_id(0, kWrites);
    w.first = v;
    w.region = RegionKind::Values;
    w.payload = kValueBytes;
    w.flags = changed ? kValueChanged : 0;
    writes_->push(w);
  }

  CsrLayout layout_;
  std::uint32_t k_ = 1;
  Phase phase_ = Phase::Start;
  std::uint32_t part_ = 0;
  std::int64_t onchip_ = -1;
  std::vector<char> dirty_;
  bool changed_ = false;
  VertexValues base_, acc_;

  CompletionFrontier prefetched_, dst_, ptr_, nbr_;
  SequentialProducer* neighbors_ = nullptr;
  QueueStream* writes_ = nullptr;
  VertexId next_v_ = 0;
  std::uint64_t busy_until_ = 0;
};

}  // namespace

std::unique_ptr<ModelBase> make_accugraph(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval) {
  return std::make_unique<AccuGraph>(g, cfg, root, interval);
}

}  // namespace gsim::detail
