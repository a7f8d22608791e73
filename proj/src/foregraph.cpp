#include "model_base.hpp"

namespace gsim::detail {

namespace {

enum Slot : std::uint32_t { kSrcPrefetch, kDstPrefetch, kEdges, kWriteBack };

class ForeGraph final : public ModelBase {
 public:
  ForeGraph(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval)
      : ModelBase(g, cfg, root, cfg.p), layout_(build(g, cfg, interval)), pes_(cfg.p) {
    edge_record_bytes_ = kShardEdgeBytes;
    k_ = static_cast<std::uint32_t>(layout_.intervals.size());
    list_begin_.assign(k_ + 1, 0);
    for (const ShardList& l : layout_.lists) ++list_begin_[l.src_interval + 1];
    for (std::uint32_t i = 0; i < k_; ++i) list_begin_[i + 1] += list_begin_[i];
    dirty_.assign(k_, 0);
    for (VertexId v = 0; v < g.n; ++v) {
      if (initially_active(spec_, values_[v])) dirty_[v / interval] = 1;
    }
    if (spec_.reduction == Reduction::Sum) start_sum_iteration();

    std::vector<RequestStream*> inputs;
    for (auto& e : eps_) inputs.push_back(&e);
    shared_ = std::make_unique<RoundRobinMerge>(std::move(inputs));

    for (std::uint32_t pe = 0; pe < cfg.p; ++pe) {
      callbacks_.register_callback(source_id(pe, kSrcPrefetch), [this, pe](const MemRequest& r) {
        pes_[pe].src.complete(r.first, r.count);
        pump(pe);
      });
      callbacks_.register_callback(source_id(pe, kDstPrefetch), [this, pe](const MemRequest& r) {
        pes_[pe].dst.complete(r.first, r.count);
        pump(pe);
      });
      callbacks_.register_callback(source_id(pe, kEdges), [this, pe](const MemRequest& r) {
        pes_[pe].edges.complete(r.first, r.count);
        pump(pe);
      });
      callbacks_.register_callback(source_id(pe, kWriteBack), [](const MemRequest&) {});
    }
    restart();
  }

  std::uint32_t endpoints() const override { return 1; }
  RequestStream& endpoint(std::uint32_t) override { return *shared_; }

  std::vector<std::uint64_t> footprint() const override { return {layout_.memory.payload_bytes(0)}; }

  bool on_cycle(std::uint64_t) override {
    if (finished_) return false;
    bool progress = false;
    bool idle = true;
    for (std::uint32_t pe = 0; pe < cfg_.p; ++pe) {
      progress |= advance(pe);
      idle = idle && pes_[pe].phase == Phase::Idle;
    }
    if (idle && all_drained()) {
      if (spec_.reduction == Reduction::Sum) {
        for (VertexId v = 0; v < g_.n; ++v) values_[v] = apply(spec_, acc_[v], base_[v], g_.n).value;
      }
      if (finish_iteration(changed_)) {
        changed_ = false;
        if (spec_.reduction == Reduction::Sum) start_sum_iteration();
        restart();
      } else {
        for (std::uint32_t pe = 0; pe < cfg_.p; ++pe) detach(pe);
      }
      progress = true;
    }
    return progress;
  }

 private:
  enum class Phase { NextInterval, SrcPrefetch, NextList, DstPrefetch, Edges, WriteBack, Idle };

  struct Pe {
    Phase phase = Phase::NextInterval;
    std::uint32_t interval = 0;  // next source interval to consider
    std::uint32_t src_interval = 0;
    std::size_t list = 0;
    std::size_t list_end = 0;
    std::uint64_t src_size = 0;
    std::uint64_t dst_total = 0;
    std::uint64_t processed = 0;
    CompletionFrontier src, dst, edges;
  };

  static ShardLayout build(const Graph& g, const AccelConfig& cfg, std::uint32_t interval) {
    ShardLayout l = interval_shard(g, interval, cfg.p);
    if (cfg.optimizations.has(Optimization::EdgeShuffle)) l = shuffle_edges(std::move(l), cfg.p);
    return l;
  }

  void start_sum_iteration() {
    base_ = values_;
    acc_.assign(g_.n, identity(spec_));
  }

  void restart() {
    for (std::uint32_t pe = 0; pe < cfg_.p; ++pe) {
      pes_[pe].phase = Phase::NextInterval;
      pes_[pe].interval = pe;
    }
  }

  bool advance(std::uint32_t pe) {
    Pe& s = pes_[pe];
    Step& step = steps_[pe];
    switch (s.phase) {
      case Phase::NextInterval: {
        while (s.interval < k_) {
          const std::uint32_t i = s.interval;
          s.interval += cfg_.p;
          if (list_begin_[i] == list_begin_[i + 1]) continue;
          if (cfg_.optimizations.has(Optimization::ShardSkip) && !dirty_[i]) continue;
          dirty_[i] = 0;
          const PartitionInfo& info = layout_.intervals[i];
          s.src_interval = i;
          s.list = list_begin_[i];
          s.list_end = list_begin_[i + 1];
          s.src_size = info.size();
          s.src.reset();
          step.clear();
          attach(pe, step.sequential(spec(pe, kSrcPrefetch, 0, RegionKind::Values, AccessKind::Read,
                                          layout_.values_base + std::uint64_t{info.begin} * kValueBytes, info.size(),
                                          kValueBytes)));
          s.phase = Phase::SrcPrefetch;
          return true;
        }
        s.phase = Phase::Idle;
        detach(pe);
        return true;
      }
      case Phase::SrcPrefetch:
        if (!eps_[pe].exhausted()) return false;
        s.phase = Phase::NextList;
        return true;
      case Phase::NextList: {
        if (s.list == s.list_end) {
          s.phase = Phase::NextInterval;
          return true;
        }
        const ShardList& l = layout_.lists[s.list];
        std::vector<RequestStream*> lanes;
        std::uint64_t offset = 0;
        step.clear();
        for (std::uint32_t dj : l.dst_intervals) {
          const PartitionInfo& info = layout_.intervals[dj];
          ProducerSpec ps = spec(pe, kDstPrefetch, 0, RegionKind::Values, AccessKind::Read,
                                 layout_.values_base + std::uint64_t{info.begin} * kValueBytes, info.size(), kValueBytes);
          ps.first_index = offset;
          offset += info.size();
          lanes.push_back(&step.sequential(ps));
        }
        s.dst_total = offset;
        s.dst.reset();
        s.edges.reset();
        s.processed = 0;
        auto& dst = step.add<PriorityMerge>(std::move(lanes));
        auto& edges = step.sequential(spec(pe, kEdges, 0, RegionKind::Edges, AccessKind::Read, l.edge_base,
                                           l.records.size(), kShardEdgeBytes));
        attach(pe, step.add<PriorityMerge>(std::vector<RequestStream*>{&dst, &edges}));
        s.phase = Phase::DstPrefetch;
        return true;
      }
      case Phase::DstPrefetch:
      case Phase::Edges: {
        pump(pe);
        const ShardList& l = layout_.lists[s.list];
        if (s.processed < l.records.size()) return false;
        step.clear();
        std::vector<RequestStream*> lanes;
        for (std::uint32_t dj : l.dst_intervals) {
          const PartitionInfo& info = layout_.intervals[dj];
          lanes.push_back(&step.sequential(spec(pe, kWriteBack, 0, RegionKind::Values, AccessKind::Write,
                                                layout_.values_base + std::uint64_t{info.begin} * kValueBytes,
                                                info.size(), kValueBytes)));
        }
        attach(pe, step.add<PriorityMerge>(std::move(lanes)));
        s.phase = Phase::WriteBack;
        return true;
      }
      case Phase::WriteBack:
        if (!eps_[pe].exhausted()) return false;
        ++s.list;
        s.phase = Phase::NextList;
        return true;
      case Phase::Idle: return false;
    }
    return false;
  }

  /// Applies edges whose records, source and destination values are on chip.
  void pump(std::uint32_t pe) {
    Pe& s = pes_[pe];
    if (s.phase != Phase::DstPrefetch && s.phase != Phase::Edges) return;
    if (s.src.prefix() < s.src_size || s.dst.prefix() < s.dst_total) return;
    const ShardList& l = layout_.lists[s.list];
    const PartitionInfo& si = layout_.intervals[l.src_interval];
    const std::uint64_t ready = s.edges.prefix();
    for (; s.processed < ready; ++s.processed) {
      const std::uint64_t pos = s.processed;
      if (l.is_null(pos)) continue;
      const ShardEdge rec = l.records[pos];
      const std::uint32_t dj = l.dst_interval_at(pos);
      const VertexId u = si.begin + rec.src;
      const VertexId v = layout_.intervals[dj].begin + rec.dst;
      if (spec_.reduction == Reduction::Sum) {
        acc_[v] = reduce(spec_, acc_[v], edge_update(spec_, base_[u], 1, out_deg_[u]));
        continue;
      }
      Value cand = edge_update(spec_, values_[u], 1, out_deg_[u]);
      Applied a = apply(spec_, cand, values_[v], g_.n);
      if (a.changed) {
        values_[v] = a.value;
        dirty_[dj] = 1;
        changed_ = true;
      }
    }
  }

  ShardLayout layout_;
  std::vector<Pe> pes_;
  std::unique_ptr<RoundRobinMerge> shared_;
  std::uint32_t k_ = 1;
  std::vector<std::size_t> list_begin_;
  std::vector<char> dirty_;
  bool changed_ = false;
  VertexValues base_, acc_;
};

}  // namespace

std::unique_ptr<ModelBase> make_foregraph(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval) {
  return std::make_unique<ForeGraph>(g, cfg, root, interval);
}

}  // namespace gsim::detail
