#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gsim/graph.hpp"

namespace gsim {

inline constexpr std::uint64_t kLineBytes = 64;
inline constexpr std::uint32_t kValueBytes = 4;
inline constexpr std::uint32_t kPointerBytes = 4;
inline constexpr std::uint32_t kUpdateBytes = 8;  // (destination id, value)
inline constexpr std::uint32_t kShardEdgeBytes = 4;
inline constexpr std::uint32_t kMaxShardInterval = 65536;
inline constexpr std::uint32_t kAccuGraphInterval = 1024000;  // largest single-partition graph
inline constexpr std::uint32_t kNullShardEdge = 0xffffffffu;

enum class RegionKind { Values, Pointers, Edges, Updates };
std::string_view to_string(RegionKind k);

struct Region {
  std::string name;
  RegionKind kind = RegionKind::Values;
  std::uint32_t channel = 0;
  std::uint64_t base = 0;
  std::uint64_t bytes = 0;  // payload, without alignment padding
};

/// Per-channel bump allocator. Regions are 64-byte aligned and allocated in
/// call order, so callers fix the order values, pointers, edges, updates.
class MemoryMap {
 public:
  explicit MemoryMap(std::uint32_t channels = 1) : next_(channels, 0) {}

  std::uint64_t allocate(std::uint32_t channel, std::string name, RegionKind kind, std::uint64_t bytes);

  std::uint32_t channels() const { return static_cast<std::uint32_t>(next_.size()); }
  const std::vector<Region>& regions() const { return regions_; }
  /// Aligned end of the last region in `channel`.
  std::uint64_t total_bytes(std::uint32_t channel) const { return next_.at(channel); }
  /// Sum of region payloads in `channel`.
  std::uint64_t payload_bytes(std::uint32_t channel) const;

  void dump(std::ostream& os) const;

 private:
  std::vector<std::uint64_t> next_;
  std::vector<Region> regions_;
};

enum class PartitionScheme { Horizontal, Vertical, IntervalShard };

struct LayoutConfig {
  PartitionScheme scheme = PartitionScheme::Horizontal;
  std::uint32_t interval_size = 1;
  std::uint32_t k = 1;  // partition (interval) count
  std::uint32_t p = 1;  // PE / channel count
  std::uint32_t edge_record_bytes = 8;
  std::uint32_t value_bytes = kValueBytes;
  std::uint32_t pointer_bytes = kPointerBytes;
  std::uint32_t alignment = kLineBytes;

  /// Throws when an invariant of the configuration does not hold.
  void validate(bool weighted) const;
};

LayoutConfig make_layout_config(PartitionScheme scheme, const Graph& g, std::uint32_t interval_size,
                                std::uint32_t p, bool weighted);

inline std::uint32_t interval_count(std::uint32_t n, std::uint32_t interval_size) {
  return n == 0 ? 1 : static_cast<std::uint32_t>((std::uint64_t{n} + interval_size - 1) / interval_size);
}

/// One vertex interval [begin, end) and what a layout stores for it.
struct PartitionInfo {
  VertexId begin = 0;
  VertexId end = 0;
  std::uint64_t edge_count = 0;
  std::uint32_t channel = 0;
  std::uint64_t edge_base = 0;
  std::uint64_t value_base = 0;
  std::uint64_t pointer_base = 0;
  std::uint64_t update_base = 0;
  std::uint64_t update_capacity = 0;  // records

  std::uint32_t size() const { return end - begin; }
};

// ---------------------------------------------------------------------------
// AccuGraph: horizontally partitioned CSR. Partition i holds, for every vertex
// v of the graph, the neighbors of v that lie in interval i, so each partition
// carries n + 1 pointers.

struct CsrPartition {
  PartitionInfo info;
  std::vector<std::uint32_t> pointers;  // n + 1 entries
  std::vector<VertexId> neighbors;
};

struct CsrLayout {
  LayoutConfig config;
  MemoryMap memory{1};
  std::uint64_t values_base = 0;
  bool inverted = true;
  std::vector<CsrPartition> partitions;
};

/// inverted=true builds in-neighbor lists (pull), partitioned by the interval
/// of the neighbor (the edge source).
CsrLayout horizontal_csr(const Graph& g, std::uint32_t interval_size, bool inverted = true);

// ---------------------------------------------------------------------------
// HitGraph: horizontally partitioned edge list, partitions dealt round-robin to
// channels, one update queue per partition on the partition's channel.

struct EdgePartition {
  PartitionInfo info;
  std::vector<Edge> edges;
};

struct EdgeListLayout {
  LayoutConfig config;
  MemoryMap memory{1};
  std::vector<EdgePartition> partitions;
  bool sorted_by_destination = false;

  std::uint32_t partition_of(VertexId v) const { return v / config.interval_size; }
};

EdgeListLayout horizontal_edge_list(const Graph& g, std::uint32_t interval_size, std::uint32_t p);

/// Stable sort of each partition's edges by destination id.
EdgeListLayout sort_by_destination(EdgeListLayout layout);

// ---------------------------------------------------------------------------
// ThunderGP: vertically partitioned edge list. Every channel stores the full
// value array, one chunk of each partition, and a full-size update array.

struct Chunk {
  std::uint32_t partition = 0;
  std::uint32_t index = 0;     // position within the partition's chunk split
  std::uint32_t channel = 0;
  std::uint64_t edge_base = 0;
  std::vector<Edge> edges;     // sorted by source vertex
};

struct VerticalLayout {
  LayoutConfig config;
  MemoryMap memory{1};
  std::vector<PartitionInfo> partitions;  // destination intervals
  std::vector<Chunk> chunks;              // partition-major, then chunk index
  std::vector<std::uint64_t> values_base;   // per channel
  std::vector<std::uint64_t> updates_base;  // per channel

  /// Chunks stored on `channel`, in partition order.
  std::vector<const Chunk*> chunks_on(std::uint32_t channel) const;
};

VerticalLayout vertical_edge_list(const Graph& g, std::uint32_t interval_size, std::uint32_t p);

/// Greedy longest-processing-time assignment. Returns the bin of every item;
/// ties go to the lowest bin index, items are taken in descending load order
/// (stable for equal loads).
std::vector<std::uint32_t> lpt_assign(const std::vector<double>& loads, std::uint32_t bins);

/// Reassigns chunks to channels by LPT on predicted time (chunk edges plus the
/// interval's value volume) and rebuilds the per-channel edge regions.
VerticalLayout schedule_chunks(VerticalLayout layout, std::uint32_t p);

// ---------------------------------------------------------------------------
// ForeGraph: interval-shard grid of compressed 32-bit edges.

struct ShardEdge {
  std::uint16_t src;  // interval-local
  std::uint16_t dst;  // interval-local

  std::uint32_t record() const { return std::uint32_t{src} << 16 | dst; }
};

/// One sequentially read edge list. Without shuffling it is a single shard;
/// after shuffling it zips up to p shards of the same source interval, lane
/// l holding the shard to destination interval dst_intervals[l]. Position i
/// belongs to lane i % lanes and is a null edge when i / lanes >= lane_size[lane].
struct ShardList {
  std::uint32_t src_interval = 0;
  std::vector<std::uint32_t> dst_intervals;
  std::vector<std::uint64_t> lane_size;
  std::vector<ShardEdge> records;  // null positions hold kNullShardEdge bits
  std::uint64_t pad_count = 0;
  std::uint64_t edge_base = 0;

  std::uint32_t lanes() const { return static_cast<std::uint32_t>(dst_intervals.size()); }
  bool is_null(std::uint64_t pos) const { return pos / lanes() >= lane_size[pos % lanes()]; }
  std::uint32_t dst_interval_at(std::uint64_t pos) const { return dst_intervals[pos % lanes()]; }
};

struct ShardLayout {
  LayoutConfig config;
  MemoryMap memory{1};
  std::uint64_t values_base = 0;
  std::vector<PartitionInfo> intervals;
  /// Ordered by source interval, then destination interval. Empty shards are
  /// not stored.
  std::vector<ShardList> lists;
  bool shuffled = false;

  std::uint64_t stored_edges() const;  // including null pads
  std::uint64_t real_edges() const;
};

ShardLayout interval_shard(const Graph& g, std::uint32_t interval_size, std::uint32_t p);

/// Zips the shards of each source interval in groups of p consecutive
/// destination intervals, padding shorter lanes with null edges.
ShardLayout shuffle_edges(ShardLayout layout, std::uint32_t p);

// ---------------------------------------------------------------------------

struct StrideMapping {
  Graph graph;
  std::vector<VertexId> new_id;  // old -> new
  std::vector<VertexId> old_id;  // new -> old
};

/// Renames vertices so that consecutive new ids belong to the same residue
/// class v mod k. When k divides n this is new = (v mod k) * (n / k) + v / k.
StrideMapping stride_map(const Graph& g, std::uint32_t k);

template <typename T>
std::vector<T> unmap_values(const std::vector<T>& mapped, const std::vector<VertexId>& new_id) {
  std::vector<T> out(mapped.size());
  for (std::size_t v = 0; v < new_id.size(); ++v) out[v] = mapped[new_id[v]];
  return out;
}

}  // namespace gsim
