#pragma once

// Shared scaffolding for the accelerator models.

#include <memory>
#include <utility>
#include <vector>

#include "gsim/accelerator.hpp"
#include "gsim/flow.hpp"
#include "gsim/partition.hpp"

namespace gsim::detail {

/// Streams owned by one control step of a PE.
class Step {
 public:
  template <typename T, typename... A>
  T& add(A&&... args) {
    auto p = std::make_unique<T>(std::forward<A>(args)...);
    T& ref = *p;
    owned_.push_back(std::move(p));
    return ref;
  }
  /// Sequential producer behind a cache line merge.
  RequestStream& sequential(const ProducerSpec& spec) {
    auto& prod = add<SequentialProducer>(spec);
    return add<CacheLineMerge>(prod);
  }
  void clear() { owned_.clear(); }

 private:
  std::vector<std::unique_ptr<RequestStream>> owned_;
};

inline constexpr std::uint32_t kSlotsPerPe = 8;
inline std::uint32_t source_id(std::uint32_t pe, std::uint32_t slot) { return pe * kSlotsPerPe + slot; }

class ModelBase : public Model {
 public:
  ModelBase(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t pes)
      : g_(g), cfg_(cfg), spec_(cfg.problem), eps_(pes), steps_(pes) {
    values_ = init_values(spec_, g, root);
    out_deg_ = out_degrees(g);
    edges_read_.push_back(0);
    values_read_.push_back(0);
  }

  std::uint32_t endpoints() const override { return static_cast<std::uint32_t>(eps_.size()); }
  RequestStream& endpoint(std::uint32_t i) override { return eps_[i]; }
  bool done() const override { return finished_; }

  void on_complete(const MemRequest& r) override {
    eps_[r.source / kSlotsPerPe].completed();
    if (r.kind == AccessKind::Read) {
      if (r.region == RegionKind::Edges) edges_read_.back() += r.payload / edge_record_bytes_;
      if (r.region == RegionKind::Values) values_read_.back() += r.payload / kValueBytes;
    } else if (r.region == RegionKind::Updates) {
      updates_written_ += r.payload / update_record_bytes_;
    }
    callbacks_.dispatch(r);
  }

  const VertexValues& values() const { return values_; }
  unsigned iterations() const { return iterations_; }
  const std::vector<std::uint64_t>& edges_read() const { return edges_read_; }
  const std::vector<std::uint64_t>& values_read() const { return values_read_; }
  std::uint64_t updates_written() const { return updates_written_; }
  virtual std::vector<std::uint64_t> footprint() const = 0;

 protected:
  void attach(std::uint32_t pe, RequestStream& s) { eps_[pe].attach(&s); }
  void detach(std::uint32_t pe) { eps_[pe].attach(nullptr); }
  bool all_drained() {
    for (auto& e : eps_) {
      if (!e.drained()) return false;
    }
    return true;
  }

  /// Closes an iteration; returns true when the run continues.
  bool finish_iteration(bool changed) {
    ++iterations_;
    const bool stop = spec_.fixed_iterations ? iterations_ >= *spec_.fixed_iterations : !changed;
    if (stop) {
      finished_ = true;
    } else {
      edges_read_.push_back(0);
      values_read_.push_back(0);
    }
    return !stop;
  }

  ProducerSpec spec(std::uint32_t pe, std::uint32_t slot, std::uint32_t channel, RegionKind region, AccessKind kind,
                    std::uint64_t base, std::uint64_t count, std::uint32_t record_bytes) const {
    ProducerSpec s;
    s.base = base;
    s.count = count;
    s.record_bytes = record_bytes;
    s.kind = kind;
    s.channel = channel;
    s.source = source_id(pe, slot);
    s.region = region;
    return s;
  }

  const Graph& g_;
  AccelConfig cfg_;
  ProblemSpec spec_;
  std::vector<Endpoint> eps_;
  std::vector<Step> steps_;
  CallbackRegistry callbacks_;
  VertexValues values_;
  std::vector<std::uint32_t> out_deg_;
  std::uint32_t edge_record_bytes_ = 8;
  std::uint32_t update_record_bytes_ = kUpdateBytes;
  unsigned iterations_ = 0;
  bool finished_ = false;
  std::vector<std::uint64_t> edges_read_;
  std::vector<std::uint64_t> values_read_;
  std::uint64_t updates_written_ = 0;
};

std::unique_ptr<ModelBase> make_accugraph(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval);
std::unique_ptr<ModelBase> make_foregraph(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval);
std::unique_ptr<ModelBase> make_hitgraph(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval);
std::unique_ptr<ModelBase> make_thundergp(const Graph& g, const AccelConfig& cfg, VertexId root, std::uint32_t interval);

}  // namespace gsim::detail
