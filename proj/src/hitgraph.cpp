#include "model_base.hpp"

namespace gsim::detail {

namespace {

enum Slot : std::uint32_t { kScatterPrefetch, kEdges, kUpdates, kGatherPrefetch, kUpdateReads, kValueWrites };

struct Update {
  VertexId dst;
  Value value;
};

class HitGraph final : public ModelBase {
 public:
  HitGraph(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval)
      : ModelBase(g, cfg, root, cfg.p), layout_(build(g, cfg, interval)), pes_(cfg.p) {
    edge_record_bytes_ = layout_.config.edge_record_bytes;
    update_record_bytes_ = kUpdateBytes;
    k_ = static_cast<std::uint32_t>(layout_.partitions.size());
    cursors_.assign(k_, 0);
    queues_.resize(k_);
    active_.assign(g.n, 0);
    for (VertexId v = 0; v < g.n; ++v) active_[v] = initially_active(spec_, values_[v]) ? 1 : 0;

    for (std::uint32_t pe = 0; pe < cfg.p; ++pe) {
      for (std::uint32_t j = pe; j < k_; j += cfg.p) pes_[pe].parts.push_back(j);
    }

    for (std::uint32_t pe = 0; pe < cfg.p; ++pe) {
      callbacks_.register_callback(source_id(pe, kScatterPrefetch), [this, pe](const MemRequest& r) {
        pes_[pe].prefetch.complete(r.first, r.count);
        pump_scatter(pe);
      });
      callbacks_.register_callback(source_id(pe, kEdges), [this, pe](const MemRequest& r) {
        pes_[pe].records.complete(r.first, r.count);
        pump_scatter(pe);
      });
      callbacks_.register_callback(source_id(pe, kUpdates), [](const MemRequest&) {});
      callbacks_.register_callback(source_id(pe, kGatherPrefetch), [this, pe](const MemRequest& r) {
        pes_[pe].prefetch.complete(r.first, r.count);
        pump_gather(pe);
      });
      callbacks_.register_callback(source_id(pe, kUpdateReads), [this, pe](const MemRequest& r) {
        pes_[pe].records.complete(r.first, r.count);
        pump_gather(pe);
      });
      callbacks_.register_callback(source_id(pe, kValueWrites), [](const MemRequest&) {});
    }
    begin_scatter();
  }

  std::vector<std::uint64_t> footprint() const override {
    std::vector<std::uint64_t> out;
    for (std::uint32_t c = 0; c < cfg_.p; ++c) out.push_back(layout_.memory.payload_bytes(c));
    return out;
  }

  bool on_cycle(std::uint64_t) override {
    if (finished_) return false;
    bool progress = false;
    bool idle = true;
    for (std::uint32_t pe = 0; pe < cfg_.p; ++pe) {
      progress |= gather_ ? advance_gather(pe) : advance_scatter(pe);
      idle = idle && pes_[pe].phase == Phase::Idle;
    }
    if (!idle || !all_drained()) return progress;
    if (!gather_) {
      gather_ = true;
      begin_gather();
      return true;
    }
    if (finish_iteration(changed_)) {
      begin_scatter();
    } else {
      for (std::uint32_t pe = 0; pe < cfg_.p; ++pe) detach(pe);
    }
    return true;
  }

 private:
  enum class Phase { Next, Prefetch, Stream, Drain, Idle };

  struct Pe {
    std::vector<std::uint32_t> parts;
    std::size_t cursor = 0;
    std::uint32_t part = 0;
    Phase phase = Phase::Next;
    std::unique_ptr<Crossbar> crossbar;
    std::unique_ptr<RoundRobinMerge> crossbar_out;
    CompletionFrontier prefetch, records;
    std::uint64_t prefetch_size = 0;
    std::uint64_t record_count = 0;
    std::uint64_t processed = 0;
    bool has_pending = false;
    Update pending{};
    QueueStream* writes = nullptr;
  };

  static EdgeListLayout build(const Graph& g, const AccelConfig& cfg, std::uint32_t interval) {
    EdgeListLayout l = horizontal_edge_list(g, interval, cfg.p);
    if (cfg.optimizations.has(Optimization::DstSort)) l = sort_by_destination(std::move(l));
    return l;
  }

  void begin_scatter() {
    gather_ = false;
    changed_ = false;
    std::fill(cursors_.begin(), cursors_.end(), 0);
    for (auto& q : queues_) q.clear();
    next_active_.assign(g_.n, 0);
    if (spec_.reduction == Reduction::Sum) acc_.assign(g_.n, identity(spec_));
    std::vector<Crossbar::Output> outputs;
    for (const auto& part : layout_.partitions) {
      outputs.push_back({part.info.channel, part.info.update_base, part.info.update_capacity});
    }
    const std::uint32_t isize = layout_.config.interval_size;
    for (std::uint32_t pe = 0; pe < cfg_.p; ++pe) {
      Pe& s = pes_[pe];
      s.cursor = 0;
      s.phase = Phase::Next;
      s.crossbar = std::make_unique<Crossbar>(
          outputs, [isize](VertexId v) { return v / isize; }, cursors_, source_id(pe, kUpdates));
      std::vector<RequestStream*> outs;
      for (std::uint32_t q = 0; q < k_; ++q) outs.push_back(&s.crossbar->stream(q));
      s.crossbar_out = std::make_unique<RoundRobinMerge>(std::move(outs));
    }
  }

  void begin_gather() {
    for (std::uint32_t pe = 0; pe < cfg_.p; ++pe) {
      pes_[pe].cursor = 0;
      pes_[pe].phase = Phase::Next;
    }
  }

  bool partition_active(std::uint32_t j) const {
    const PartitionInfo& info = layout_.partitions[j].info;
    for (VertexId v = info.begin; v < info.end; ++v) {
      if (active_[v]) return true;
    }
    return false;
  }

  bool advance_scatter(std::uint32_t pe) {
    Pe& s = pes_[pe];
    Step& step = steps_[pe];
    switch (s.phase) {
      case Phase::Next: {
        while (s.cursor < s.parts.size()) {
          const std::uint32_t j = s.parts[s.cursor++];
          const EdgePartition& part = layout_.partitions[j];
          if (part.edges.empty()) continue;
          if (cfg_.optimizations.has(Optimization::PartitionSkip) && !partition_active(j)) continue;
          s.part = j;
          s.prefetch.reset();
          s.records.reset();
          s.prefetch_size = part.info.size();
          s.record_count = part.edges.size();
          s.processed = 0;
          s.has_pending = false;
          step.clear();
          auto& pf = step.sequential(spec(pe, kScatterPrefetch, part.info.channel, RegionKind::Values,
                                          AccessKind::Read, part.info.value_base, part.info.size(), kValueBytes));
          auto& edges = step.sequential(spec(pe, kEdges, part.info.channel, RegionKind::Edges, AccessKind::Read,
                                             part.info.edge_base, part.edges.size(), edge_record_bytes_));
          auto& reads = step.add<PriorityMerge>(std::vector<RequestStream*>{&pf, &edges});
          attach(pe, step.add<PriorityMerge>(std::vector<RequestStream*>{s.crossbar_out.get(), &reads}));
          s.phase = Phase::Stream;
          return true;
        }
        s.crossbar->close();
        step.clear();
        attach(pe, *s.crossbar_out);
        s.phase = Phase::Drain;
        return true;
      }
      case Phase::Stream:
        pump_scatter(pe);
        if (s.processed < s.record_count) return false;
        s.phase = Phase::Next;
        return true;
      case Phase::Drain:
        if (!eps_[pe].drained()) return false;
        s.phase = Phase::Idle;
        detach(pe);
        return true;
      default: return false;
    }
  }

  void emit(Pe& s, const Update& u) {
    const std::uint32_t q = s.crossbar->push(u.dst);
    queues_[q].push_back(u);
  }

  void pump_scatter(std::uint32_t pe) {
    Pe& s = pes_[pe];
    if (gather_ || s.phase != Phase::Stream || s.prefetch.prefix() < s.prefetch_size) return;
    const EdgePartition& part = layout_.partitions[s.part];
    const bool filter = cfg_.optimizations.has(Optimization::UpdateFilter);
    const bool combine = cfg_.optimizations.has(Optimization::UpdateCombine);
    const std::uint64_t ready = s.records.prefix();
    for (; s.processed < ready; ++s.processed) {
      const Edge& e = part.edges[s.processed];
      if (filter && !active_[e.src]) continue;
      Update u{e.dst, edge_update(spec_, values_[e.src], e.weight, out_deg_[e.src])};
      if (!combine) {
        emit(s, u);
        continue;
      }
      if (s.has_pending && s.pending.dst == u.dst) {
        s.pending.value = reduce(spec_, s.pending.value, u.value);
      } else {
        if (s.has_pending) emit(s, s.pending);
        s.pending = u;
        s.has_pending = true;
      }
    }
    if (s.processed == s.record_count && s.has_pending) {
      emit(s, s.pending);
      s.has_pending = false;
    }
  }

  bool advance_gather(std::uint32_t pe) {
    Pe& s = pes_[pe];
    Step& step = steps_[pe];
    const bool sum = spec_.reduction == Reduction::Sum;
    switch (s.phase) {
      case Phase::Next: {
        while (s.cursor < s.parts.size()) {
          const std::uint32_t j = s.parts[s.cursor++];
          const PartitionInfo& info = layout_.partitions[j].info;
          if (cursors_[j] == 0 && !sum) continue;
          s.part = j;
          s.prefetch.reset();
          s.records.reset();
          s.prefetch_size = info.size();
          s.record_count = cursors_[j];
          s.processed = 0;
          step.clear();
          auto& pf = step.sequential(spec(pe, kGatherPrefetch, info.channel, RegionKind::Values, AccessKind::Read,
                                          info.value_base, info.size(), kValueBytes));
          auto& ups = step.sequential(spec(pe, kUpdateReads, info.channel, RegionKind::Updates, AccessKind::Read,
                                           info.update_base, cursors_[j], kUpdateBytes));
          s.writes = &step.add<QueueStream>();
          auto& wm = step.add<CacheLineMerge>(*s.writes);
          auto& reads = step.add<PriorityMerge>(std::vector<RequestStream*>{&pf, &ups});
          attach(pe, step.add<PriorityMerge>(std::vector<RequestStream*>{&wm, &reads}));
          s.phase = Phase::Stream;
          return true;
        }
        s.phase = Phase::Drain;
        return true;
      }
      case Phase::Stream:
        pump_gather(pe);
        if (s.processed < s.record_count || s.prefetch.prefix() < s.prefetch_size) return false;
        if (!s.writes->closed()) {
          if (sum) finish_sum_partition(s);
          s.writes->close();
          return true;
        }
        if (!eps_[pe].exhausted()) return false;
        s.phase = Phase::Next;
        return true;
      case Phase::Drain:
        if (!eps_[pe].drained()) return false;
        s.phase = Phase::Idle;
        detach(pe);
        return true;
      default: return false;
    }
  }

  void write_value(Pe& s, std::uint32_t pe, VertexId v) {
    const PartitionInfo& info = layout_.partitions[s.part].info;
    MemRequest w;
    w.kind = AccessKind::Write;
    w.channel = info.channel;
    w.address = info.value_base + std::uint64_t{v - info.begin} * kValueBytes;
    w.bytes = kValueBytes;
    w.source = source_id(pe, kValueWrites);
    w.first = v;
    w.region = RegionKind::Values;
    w.payload = kValueBytes;
    s.writes->push(w);
  }

  void pump_gather(std::uint32_t pe) {
    Pe& s = pes_[pe];
    if (!gather_ || s.phase != Phase::Stream || s.prefetch.prefix() < s.prefetch_size) return;
    const std::vector<Update>& q = queues_[s.part];
    const std::uint64_t ready = s.records.prefix();
    for (; s.processed < ready; ++s.processed) {
      const Update& u = q[s.processed];
      if (spec_.reduction == Reduction::Sum) {
        acc_[u.dst] = reduce(spec_, acc_[u.dst], u.value);
        continue;
      }
      Applied a = apply(spec_, u.value, values_[u.dst], g_.n);
      if (a.changed) {
        values_[u.dst] = a.value;
        next_active_[u.dst] = 1;
        changed_ = true;
        write_value(s, pe, u.dst);
      }
    }
  }

  void finish_sum_partition(Pe& s) {
    const PartitionInfo& info = layout_.partitions[s.part].info;
    const std::uint32_t pe = static_cast<std::uint32_t>(&s - pes_.data());
    for (VertexId v = info.begin; v < info.end; ++v) {
      Applied a = apply(spec_, acc_[v], values_[v], g_.n);
      values_[v] = a.value;
      next_active_[v] = 1;
      changed_ = true;
      write_value(s, pe, v);
    }
  }

  bool finish_iteration(bool changed) {
    active_ = next_active_;
    return ModelBase::finish_iteration(changed);
  }

  EdgeListLayout layout_;
  std::vector<Pe> pes_;
  std::uint32_t k_ = 1;
  std::vector<std::uint64_t> cursors_;
  std::vector<std::vector<Update>> queues_;
  std::vector<char> active_, next_active_;
  VertexValues acc_;
  bool gather_ = false;
  bool changed_ = false;
};

}  // namespace

std::unique_ptr<ModelBase> make_hitgraph(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval) {
  return std::make_unique<HitGraph>(g, cfg, root, interval);
}

}  // namespace gsim::detail
