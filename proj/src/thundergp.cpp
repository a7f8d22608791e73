#include "model_base.hpp"

namespace gsim::detail {

namespace {

enum Slot : std::uint32_t { kPrefetch, kEdges, kSourceReads, kPartialWrites, kPartialReads, kValueWrites };

class ThunderGP final : public ModelBase {
 public:
  ThunderGP(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval)
      : ModelBase(g, cfg, root, cfg.p), layout_(build(g, cfg, interval)), pes_(cfg.p) {
    edge_record_bytes_ = layout_.config.edge_record_bytes;
    update_record_bytes_ = kValueBytes;
    k_ = static_cast<std::uint32_t>(layout_.partitions.size());
    partials_.resize(layout_.chunks.size());
    chunks_of_.resize(k_);
    for (std::size_t i = 0; i < layout_.chunks.size(); ++i) {
      const Chunk& ch = layout_.chunks[i];
      if (!ch.edges.empty()) chunks_of_[ch.partition].push_back(i);
    }
    for (std::uint32_t pe = 0; pe < cfg.p; ++pe) {
      for (const Chunk* ch : layout_.chunks_on(pe)) {
        if (!ch->edges.empty()) pes_[pe].chunks.push_back(static_cast<std::size_t>(ch - layout_.chunks.data()));
      }
      for (std::uint32_t j = pe; j < k_; j += cfg.p) pes_[pe].parts.push_back(j);
    }

    for (std::uint32_t pe = 0; pe < cfg.p; ++pe) {
      callbacks_.register_callback(source_id(pe, kPrefetch), [this, pe](const MemRequest& r) {
        pes_[pe].prefetch.complete(r.first, r.count);
        pump(pe);
      });
      callbacks_.register_callback(source_id(pe, kEdges), [this, pe](const MemRequest& r) {
        pes_[pe].records.complete(r.first, r.count);
        pump(pe);
      });
      callbacks_.register_callback(source_id(pe, kSourceReads), [](const MemRequest&) {});
      callbacks_.register_callback(source_id(pe, kPartialWrites), [](const MemRequest&) {});
      callbacks_.register_callback(source_id(pe, kPartialReads), [](const MemRequest&) {});
      callbacks_.register_callback(source_id(pe, kValueWrites), [](const MemRequest&) {});
    }
    begin_sg();
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
      progress |= apply_phase_ ? advance_apply(pe) : advance_sg(pe);
      idle = idle && pes_[pe].phase == Phase::Idle;
    }
    if (!idle || !all_drained()) return progress;
    if (!apply_phase_) {
      apply_phase_ = true;
      for (auto& s : pes_) {
        s.cursor = 0;
        s.phase = Phase::Next;
      }
      return true;
    }
    if (finish_iteration(changed_)) {
      begin_sg();
    } else {
      for (std::uint32_t pe = 0; pe < cfg_.p; ++pe) detach(pe);
    }
    return true;
  }

 private:
  enum class Phase { Next, Stream, WritePartial, ReadPartials, WriteValues, Idle };

  struct Pe {
    std::vector<std::size_t> chunks;
    std::vector<std::uint32_t> parts;
    std::size_t cursor = 0;
    std::size_t chunk = 0;
    std::uint32_t part = 0;
    Phase phase = Phase::Next;
    CompletionFrontier prefetch, records;
    std::uint64_t prefetch_size = 0;
    std::uint64_t processed = 0;
    QueueStream* sources = nullptr;
    std::vector<std::int64_t> tags;  // direct-mapped source buffer
  };

  static VerticalLayout build(const Graph& g, const AccelConfig& cfg, std::uint32_t interval) {
    VerticalLayout l = vertical_edge_list(g, interval, cfg.p);
    if (cfg.optimizations.has(Optimization::ChunkSchedule)) l = schedule_chunks(std::move(l), cfg.p);
    return l;
  }

  void begin_sg() {
    apply_phase_ = false;
    changed_ = false;
    for (auto& s : pes_) {
      s.cursor = 0;
      s.phase = Phase::Next;
      s.tags.assign(cfg_.source_buffer_entries, -1);
    }
  }

  bool advance_sg(std::uint32_t pe) {
    Pe& s = pes_[pe];
    Step& step = steps_[pe];
    switch (s.phase) {
      case Phase::Next: {
        if (s.cursor == s.chunks.size()) {
          s.phase = Phase::Idle;
          detach(pe);
          return true;
        }
        s.chunk = s.chunks[s.cursor++];
        const Chunk& ch = layout_.chunks[s.chunk];
        const PartitionInfo& info = layout_.partitions[ch.partition];
        partials_[s.chunk].assign(info.size(), identity(spec_));
        s.prefetch.reset();
        s.records.reset();
        s.prefetch_size = info.size();
        s.processed = 0;
        step.clear();
        auto& pf = step.sequential(spec(pe, kPrefetch, pe, RegionKind::Values, AccessKind::Read,
                                        layout_.values_base[pe] + std::uint64_t{info.begin} * kValueBytes, info.size(),
                                        kValueBytes));
        auto& edges = step.sequential(spec(pe, kEdges, pe, RegionKind::Edges, AccessKind::Read, ch.edge_base,
                                           ch.edges.size(), edge_record_bytes_));
        s.sources = &step.add<QueueStream>();
        auto& src = step.add<CacheLineMerge>(*s.sources);
        auto& reads = step.add<PriorityMerge>(std::vector<RequestStream*>{&pf, &edges});
        attach(pe, step.add<PriorityMerge>(std::vector<RequestStream*>{&src, &reads}));
        s.phase = Phase::Stream;
        return true;
      }
      case Phase::Stream: {
        pump(pe);
        const Chunk& ch = layout_.chunks[s.chunk];
        if (s.processed < ch.edges.size()) return false;
        if (!s.sources->closed()) {
          s.sources->close();
          return true;
        }
        if (!eps_[pe].drained()) return false;
        const PartitionInfo& info = layout_.partitions[ch.partition];
        step.clear();
        attach(pe, step.sequential(spec(pe, kPartialWrites, pe, RegionKind::Updates, AccessKind::Write,
                                        layout_.updates_base[pe] + std::uint64_t{info.begin} * kValueBytes,
                                        info.size(), kValueBytes)));
        s.phase = Phase::WritePartial;
        return true;
      }
      case Phase::WritePartial:
        if (!eps_[pe].exhausted()) return false;
        s.phase = Phase::Next;
        return true;
      default: return false;
    }
  }

  void pump(std::uint32_t pe) {
    Pe& s = pes_[pe];
    if (apply_phase_ || s.phase != Phase::Stream || s.prefetch.prefix() < s.prefetch_size) return;
    const Chunk& ch = layout_.chunks[s.chunk];
    const PartitionInfo& info = layout_.partitions[ch.partition];
    std::vector<Value>& partial = partials_[s.chunk];
    const std::uint64_t ready = s.records.prefix();
    const std::uint64_t slots = s.tags.size();
    for (; s.processed < ready; ++s.processed) {
      const Edge& e = ch.edges[s.processed];
      std::int64_t& tag = s.tags[e.src % slots];
      if (tag != static_cast<std::int64_t>(e.src)) {
        tag = e.src;
        MemRequest r;
        r.kind = AccessKind::Read;
        r.channel = pe;
        r.address = layout_.values_base[pe] + std::uint64_t{e.src} * kValueBytes;
        r.bytes = kValueBytes;
        r.source = source_id(pe, kSourceReads);
        r.first = e.src;
        r.region = RegionKind::Values;
        r.payload = kValueBytes;
        s.sources->push(r);
      }
      Value& slot = partial[e.dst - info.begin];
      slot = reduce(spec_, slot, edge_update(spec_, values_[e.src], e.weight, out_deg_[e.src]));
    }
  }

  bool advance_apply(std::uint32_t pe) {
    Pe& s = pes_[pe];
    Step& step = steps_[pe];
    switch (s.phase) {
      case Phase::Next: {
        if (s.cursor == s.parts.size()) {
          s.phase = Phase::Idle;
          detach(pe);
          return true;
        }
        s.part = s.parts[s.cursor++];
        const PartitionInfo& info = layout_.partitions[s.part];
        step.clear();
        std::vector<RequestStream*> reads;
        for (std::size_t ci : chunks_of_[s.part]) {
          const std::uint32_t c = layout_.chunks[ci].channel;
          reads.push_back(&step.sequential(spec(pe, kPartialReads, c, RegionKind::Updates, AccessKind::Read,
                                                layout_.updates_base[c] + std::uint64_t{info.begin} * kValueBytes,
                                                info.size(), kValueBytes)));
        }
        attach(pe, step.add<PriorityMerge>(std::move(reads)));
        s.phase = Phase::ReadPartials;
        return true;
      }
      case Phase::ReadPartials: {
        if (!eps_[pe].drained()) return false;
        const PartitionInfo& info = layout_.partitions[s.part];
        for (VertexId v = info.begin; v < info.end; ++v) {
          Value acc = identity(spec_);
          for (std::size_t ci : chunks_of_[s.part]) acc = reduce(spec_, acc, partials_[ci][v - info.begin]);
          Applied a = apply(spec_, acc, values_[v], g_.n);
          if (spec_.reduction == Reduction::Sum) {
            values_[v] = a.value;
          } else if (a.changed) {
            values_[v] = a.value;
            changed_ = true;
          }
        }
        step.clear();
        std::vector<RequestStream*> writes;
        for (std::uint32_t c = 0; c < cfg_.p; ++c) {
          writes.push_back(&step.sequential(spec(pe, kValueWrites, c, RegionKind::Values, AccessKind::Write,
                                                 layout_.values_base[c] + std::uint64_t{info.begin} * kValueBytes,
                                                 info.size(), kValueBytes)));
        }
        attach(pe, step.add<PriorityMerge>(std::move(writes)));
        s.phase = Phase::WriteValues;
        return true;
      }
      case Phase::WriteValues:
        if (!eps_[pe].exhausted()) return false;
        s.phase = Phase::Next;
        return true;
      default: return false;
    }
  }

  VerticalLayout layout_;
  std::vector<Pe> pes_;
  std::uint32_t k_ = 1;
  std::vector<std::vector<Value>> partials_;          // per chunk
  std::vector<std::vector<std::size_t>> chunks_of_;   // non-empty chunks per partition
  bool apply_phase_ = false;
  bool changed_ = false;
};

}  // namespace

std::unique_ptr<ModelBase> make_thundergp(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval) {
  return std::make_unique<ThunderGP>(g, cfg, root, interval);
}

}  // namespace gsim::detail
