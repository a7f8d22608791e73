#include "gsim/partition.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace gsim {

namespace {

std::uint64_t align_up(std::uint64_t x, std::uint64_t a) { return (x + a - 1) / a * a; }

std::vector<PartitionInfo> make_intervals(std::uint32_t n, std::uint32_t interval_size) {
  std::uint32_t k = interval_count(n, interval_size);
  std::vector<PartitionInfo> parts(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    parts[i].begin = static_cast<VertexId>(std::min<std::uint64_t>(std::uint64_t{i} * interval_size, n));
    parts[i].end = static_cast<VertexId>(std::min<std::uint64_t>(std::uint64_t{i + 1} * interval_size, n));
  }
  return parts;
}

}  // namespace

std::string_view to_string(RegionKind k) {
  switch (k) {
    case RegionKind::Values: return "values";
    case RegionKind::Pointers: return "pointers";
    case RegionKind::Edges: return "edges";
    case RegionKind::Updates: return "updates";
  }
  return "?";
}

std::uint64_t MemoryMap::allocate(std::uint32_t channel, std::string name, RegionKind kind, std::uint64_t bytes) {
  if (channel >= next_.size()) throw Error("region channel out of range");
  std::uint64_t base = next_[channel];
  regions_.push_back(Region{std::move(name), kind, channel, base, bytes});
  next_[channel] = align_up(base + bytes, kLineBytes);
  return base;
}

std::uint64_t MemoryMap::payload_bytes(std::uint32_t channel) const {
  std::uint64_t total = 0;
  for (const Region& r : regions_) {
    if (r.channel == channel) total += r.bytes;
  }
  return total;
}

void MemoryMap::dump(std::ostream& os) const {
  os << "channel  kind      base                size                name\n";
  for (const Region& r : regions_) {
    os << std::setw(7) << r.channel << "  " << std::left << std::setw(8) << to_string(r.kind) << std::right
       << "  0x" << std::hex << std::setw(16) << std::setfill('0') << r.base << "  0x" << std::setw(16) << r.bytes
       << std::dec << std::setfill(' ') << "  " << r.name << "\n";
  }
  for (std::uint32_t c = 0; c < channels(); ++c) {
    os << "channel " << c << " total 0x" << std::hex << total_bytes(c) << std::dec << " (" << payload_bytes(c)
       << " payload bytes)\n";
  }
}

void LayoutConfig::validate(bool weighted) const {
  if (interval_size == 0) throw Error("interval size must be positive");
  if (p == 0) throw Error("PE count must be positive");
  if (edge_record_bytes != 4 && edge_record_bytes != 8 && edge_record_bytes != 12) {
    throw Error("edge records are 4, 8, or 12 bytes");
  }
  if (scheme == PartitionScheme::IntervalShard) {
    if (interval_size > kMaxShardInterval) throw Error("interval-shard intervals are limited to 65536 vertices");
    if (edge_record_bytes != 4) throw Error("interval-shard edges are 4-byte records");
    if (weighted) throw Error("interval-shard edges carry no weights");
  } else if (weighted && edge_record_bytes != 12) {
    throw Error("weighted edges need 12-byte records");
  }
}

LayoutConfig make_layout_config(PartitionScheme scheme, const Graph& g, std::uint32_t interval_size,
                                std::uint32_t p, bool weighted) {
  LayoutConfig c;
  c.scheme = scheme;
  c.interval_size = interval_size;
  c.p = p;
  c.edge_record_bytes = scheme == PartitionScheme::IntervalShard ? kShardEdgeBytes : (weighted ? 12 : 8);
  c.validate(weighted);
  c.k = interval_count(g.n, interval_size);
  return c;
}

// ---------------------------------------------------------------------------

CsrLayout horizontal_csr(const Graph& g, std::uint32_t interval_size, bool inverted) {
  if (g.n == 0) throw Error("cannot partition an empty vertex set");
  CsrLayout layout;
  layout.config = make_layout_config(PartitionScheme::Horizontal, g, interval_size, 1, false);
  layout.config.edge_record_bytes = 4;
  layout.inverted = inverted;
  auto intervals = make_intervals(g.n, interval_size);
  const std::uint32_t k = static_cast<std::uint32_t>(intervals.size());

  // owner = vertex stored in the neighbor list's pointer slot, neighbor = the
  // vertex stored in the neighbor array, partitioned by its interval.
  auto owner = [&](const Edge& e) { return inverted ? e.dst : e.src; };
  auto neighbor = [&](const Edge& e) { return inverted ? e.src : e.dst; };

  layout.partitions.resize(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    layout.partitions[i].info = intervals[i];
    layout.partitions[i].pointers.assign(std::uint64_t{g.n} + 1, 0);
  }
  for (const Edge& e : g.edges) {
    auto& part = layout.partitions[neighbor(e) / interval_size];
    ++part.pointers[owner(e) + 1];
  }
  for (auto& part : layout.partitions) {
    for (std::uint32_t v = 0; v < g.n; ++v) part.pointers[v + 1] += part.pointers[v];
    part.neighbors.resize(part.pointers[g.n]);
    part.info.edge_count = part.neighbors.size();
  }
  std::vector<std::vector<std::uint32_t>> fill(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    fill[i].assign(layout.partitions[i].pointers.begin(), layout.partitions[i].pointers.end() - 1);
  }
  for (const Edge& e : g.edges) {
    std::uint32_t i = neighbor(e) / interval_size;
    layout.partitions[i].neighbors[fill[i][owner(e)]++] = neighbor(e);
  }

  layout.values_base = layout.memory.allocate(0, "values", RegionKind::Values, std::uint64_t{g.n} * kValueBytes);
  for (std::uint32_t i = 0; i < k; ++i) {
    layout.partitions[i].info.value_base = layout.values_base + std::uint64_t{intervals[i].begin} * kValueBytes;
    layout.partitions[i].info.pointer_base = layout.memory.allocate(
        0, "pointers[" + std::to_string(i) + "]", RegionKind::Pointers, (std::uint64_t{g.n} + 1) * kPointerBytes);
  }
  for (std::uint32_t i = 0; i < k; ++i) {
    layout.partitions[i].info.edge_base =
        layout.memory.allocate(0, "neighbors[" + std::to_string(i) + "]", RegionKind::Edges,
                               layout.partitions[i].neighbors.size() * 4);
  }
  return layout;
}

// ---------------------------------------------------------------------------

namespace {

void place_edge_list(EdgeListLayout& layout, const Graph& g) {
  const std::uint32_t p = layout.config.p;
  const std::uint32_t rec = layout.config.edge_record_bytes;
  layout.memory = MemoryMap(p);

  std::vector<std::uint64_t> in_count(layout.partitions.size(), 0);
  for (const Edge& e : g.edges) ++in_count[layout.partition_of(e.dst)];

  for (auto& part : layout.partitions) {
    part.info.value_base = layout.memory.allocate(part.info.channel, "values[" + std::to_string(&part - &layout.partitions[0]) + "]",
                                                  RegionKind::Values, std::uint64_t{part.info.size()} * kValueBytes);
  }
  for (auto& part : layout.partitions) {
    part.info.edge_base = layout.memory.allocate(part.info.channel, "edges[" + std::to_string(&part - &layout.partitions[0]) + "]",
                                                 RegionKind::Edges, part.edges.size() * rec);
  }
  for (std::size_t j = 0; j < layout.partitions.size(); ++j) {
    auto& info = layout.partitions[j].info;
    info.update_capacity = in_count[j];
    info.update_base = layout.memory.allocate(info.channel, "updates[" + std::to_string(j) + "]", RegionKind::Updates,
                                              in_count[j] * kUpdateBytes);
  }
}

}  // namespace

EdgeListLayout horizontal_edge_list(const Graph& g, std::uint32_t interval_size, std::uint32_t p) {
  if (g.n == 0) throw Error("cannot partition an empty vertex set");
  EdgeListLayout layout;
  layout.config = make_layout_config(PartitionScheme::Horizontal, g, interval_size, p, g.weighted);
  auto intervals = make_intervals(g.n, interval_size);
  layout.partitions.resize(intervals.size());
  for (std::size_t j = 0; j < intervals.size(); ++j) {
    layout.partitions[j].info = intervals[j];
    layout.partitions[j].info.channel = static_cast<std::uint32_t>(j % p);
  }
  for (const Edge& e : g.edges) layout.partitions[e.src / interval_size].edges.push_back(e);
  for (auto& part : layout.partitions) part.info.edge_count = part.edges.size();
  place_edge_list(layout, g);
  return layout;
}

EdgeListLayout sort_by_destination(EdgeListLayout layout) {
  for (auto& part : layout.partitions) {
    std::stable_sort(part.edges.begin(), part.edges.end(),
                     [](const Edge& a, const Edge& b) { return a.dst < b.dst; });
  }
  layout.sorted_by_destination = true;
  return layout;
}

// ---------------------------------------------------------------------------

std::vector<const Chunk*> VerticalLayout::chunks_on(std::uint32_t channel) const {
  std::vector<const Chunk*> out;
  for (const Chunk& c : chunks) {
    if (c.channel == channel) out.push_back(&c);
  }
  return out;
}

namespace {

void place_vertical(VerticalLayout& layout, std::uint32_t n) {
  const std::uint32_t p = layout.config.p;
  const std::uint32_t rec = layout.config.edge_record_bytes;
  layout.memory = MemoryMap(p);
  layout.values_base.assign(p, 0);
  layout.updates_base.assign(p, 0);
  for (std::uint32_t c = 0; c < p; ++c) {
    layout.values_base[c] = layout.memory.allocate(c, "values", RegionKind::Values, std::uint64_t{n} * kValueBytes);
  }
  for (std::uint32_t c = 0; c < p; ++c) {
    std::uint64_t bytes = 0;
    for (const Chunk& ch : layout.chunks) {
      if (ch.channel == c) bytes += ch.edges.size() * rec;
    }
    std::uint64_t base = layout.memory.allocate(c, "edges", RegionKind::Edges, bytes);
    for (Chunk& ch : layout.chunks) {
      if (ch.channel == c) {
        ch.edge_base = base;
        base += ch.edges.size() * rec;
      }
    }
  }
  for (std::uint32_t c = 0; c < p; ++c) {
    layout.updates_base[c] = layout.memory.allocate(c, "updates", RegionKind::Updates, std::uint64_t{n} * kValueBytes);
  }
}

}  // namespace

VerticalLayout vertical_edge_list(const Graph& g, std::uint32_t interval_size, std::uint32_t p) {
  if (g.n == 0) throw Error("cannot partition an empty vertex set");
  VerticalLayout layout;
  layout.config = make_layout_config(PartitionScheme::Vertical, g, interval_size, p, g.weighted);
  layout.partitions = make_intervals(g.n, interval_size);
  const auto k = static_cast<std::uint32_t>(layout.partitions.size());

  std::vector<std::vector<Edge>> by_dst(k);
  for (const Edge& e : g.edges) by_dst[e.dst / interval_size].push_back(e);

  // Chunks differ in size by at most one edge; the surplus edges rotate over
  // the channels from one partition to the next so channel totals stay within
  // one edge of m / p.
  std::uint32_t rotate = 0;
  for (std::uint32_t j = 0; j < k; ++j) {
    auto& edges = by_dst[j];
    std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.src < b.src; });
    layout.partitions[j].edge_count = edges.size();
    const std::uint64_t base = edges.size() / p;
    const std::uint64_t rem = edges.size() % p;
    std::uint64_t pos = 0;
    for (std::uint32_t c = 0; c < p; ++c) {
      std::uint64_t len = base + ((c + p - rotate) % p < rem ? 1 : 0);
      Chunk chunk;
      chunk.partition = j;
      chunk.index = c;
      chunk.channel = c;
      chunk.edges.assign(edges.begin() + static_cast<std::ptrdiff_t>(pos),
                         edges.begin() + static_cast<std::ptrdiff_t>(pos + len));
      pos += len;
      layout.chunks.push_back(std::move(chunk));
    }
    rotate = static_cast<std::uint32_t>((rotate + rem) % p);
  }
  place_vertical(layout, g.n);
  return layout;
}

std::vector<std::uint32_t> lpt_assign(const std::vector<double>& loads, std::uint32_t bins) {
  if (bins == 0) throw Error("LPT needs at least one bin");
  std::vector<std::size_t> order(loads.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return loads[a] > loads[b]; });
  std::vector<double> bin_load(bins, 0.0);
  std::vector<std::uint32_t> assignment(loads.size(), 0);
  for (std::size_t item : order) {
    auto best = static_cast<std::uint32_t>(std::min_element(bin_load.begin(), bin_load.end()) - bin_load.begin());
    assignment[item] = best;
    bin_load[best] += loads[item];
  }
  return assignment;
}

VerticalLayout schedule_chunks(VerticalLayout layout, std::uint32_t p) {
  if (p != layout.config.p) throw Error("chunk scheduling must keep the channel count");
  std::vector<double> loads;
  loads.reserve(layout.chunks.size());
  for (const Chunk& c : layout.chunks) {
    // edges plus the destination interval prefetched for this chunk
    loads.push_back(static_cast<double>(c.edges.size()) + layout.partitions[c.partition].size());
  }
  auto assignment = lpt_assign(loads, p);
  for (std::size_t i = 0; i < layout.chunks.size(); ++i) layout.chunks[i].channel = assignment[i];
  std::uint32_t n = layout.partitions.empty() ? 0 : layout.partitions.back().end;
  place_vertical(layout, n);
  return layout;
}

// ---------------------------------------------------------------------------

std::uint64_t ShardLayout::stored_edges() const {
  std::uint64_t total = 0;
  for (const auto& l : lists) total += l.records.size();
  return total;
}

std::uint64_t ShardLayout::real_edges() const {
  std::uint64_t total = 0;
  for (const auto& l : lists) total += l.records.size() - l.pad_count;
  return total;
}

namespace {

void place_shards(ShardLayout& layout, std::uint32_t n) {
  layout.memory = MemoryMap(1);
  layout.values_base = layout.memory.allocate(0, "values", RegionKind::Values, std::uint64_t{n} * kValueBytes);
  for (auto& interval : layout.intervals) {
    interval.value_base = layout.values_base + std::uint64_t{interval.begin} * kValueBytes;
  }
  for (auto& list : layout.lists) {
    std::string name = "shard[" + std::to_string(list.src_interval) + "," + std::to_string(list.dst_intervals.front());
    if (list.lanes() > 1) name += ".." + std::to_string(list.dst_intervals.back());
    list.edge_base = layout.memory.allocate(0, name + "]", RegionKind::Edges, list.records.size() * kShardEdgeBytes);
  }
}

}  // namespace

ShardLayout interval_shard(const Graph& g, std::uint32_t interval_size, std::uint32_t p) {
  if (g.n == 0) throw Error("cannot partition an empty vertex set");
  ShardLayout layout;
  layout.config = make_layout_config(PartitionScheme::IntervalShard, g, interval_size, p, false);
  layout.intervals = make_intervals(g.n, interval_size);
  const auto k = static_cast<std::uint32_t>(layout.intervals.size());

  std::vector<std::uint64_t> count(std::uint64_t{k} * k, 0);
  for (const Edge& e : g.edges) ++count[std::uint64_t{e.src / interval_size} * k + e.dst / interval_size];
  std::vector<std::int64_t> slot(count.size(), -1);
  for (std::uint32_t i = 0; i < k; ++i) {
    for (std::uint32_t j = 0; j < k; ++j) {
      std::uint64_t c = count[std::uint64_t{i} * k + j];
      if (c == 0) continue;
      slot[std::uint64_t{i} * k + j] = static_cast<std::int64_t>(layout.lists.size());
      ShardList list;
      list.src_interval = i;
      list.dst_intervals = {j};
      list.lane_size = {c};
      list.records.reserve(c);
      layout.lists.push_back(std::move(list));
    }
  }
  for (const Edge& e : g.edges) {
    std::uint32_t i = e.src / interval_size, j = e.dst / interval_size;
    auto local_src = e.src - layout.intervals[i].begin;
    auto local_dst = e.dst - layout.intervals[j].begin;
    if (local_src > 0xffff || local_dst > 0xffff) throw Error("interval-local id exceeds 16 bits");
    layout.lists[static_cast<std::size_t>(slot[std::uint64_t{i} * k + j])].records.push_back(
        ShardEdge{static_cast<std::uint16_t>(local_src), static_cast<std::uint16_t>(local_dst)});
  }
  for (auto& interval : layout.intervals) {
    interval.edge_count = 0;
  }
  for (const auto& list : layout.lists) layout.intervals[list.src_interval].edge_count += list.records.size();
  place_shards(layout, g.n);
  return layout;
}

ShardLayout shuffle_edges(ShardLayout layout, std::uint32_t p) {
  if (layout.shuffled) throw Error("shards are already shuffled");
  if (p <= 1) {
    layout.shuffled = true;
    return layout;
  }
  const auto k = static_cast<std::uint32_t>(layout.intervals.size());
  std::vector<ShardList> zipped;
  std::size_t idx = 0;
  while (idx < layout.lists.size()) {
    const std::uint32_t src = layout.lists[idx].src_interval;
    std::size_t end = idx;
    while (end < layout.lists.size() && layout.lists[end].src_interval == src) ++end;
    // Group by destination interval block [g*p, g*p + p).
    for (std::uint32_t group = 0; group * p < k; ++group) {
      std::vector<const ShardList*> members;
      for (std::size_t s = idx; s < end; ++s) {
        if (layout.lists[s].dst_intervals.front() / p == group) members.push_back(&layout.lists[s]);
      }
      if (members.empty()) continue;
      ShardList out;
      out.src_interval = src;
      std::uint64_t longest = 0;
      for (const auto* m : members) {
        out.dst_intervals.push_back(m->dst_intervals.front());
        out.lane_size.push_back(m->records.size());
        longest = std::max<std::uint64_t>(longest, m->records.size());
      }
      const auto lanes = static_cast<std::uint32_t>(members.size());
      out.records.reserve(longest * lanes);
      for (std::uint64_t row = 0; row < longest; ++row) {
        for (std::uint32_t l = 0; l < lanes; ++l) {
          if (row < members[l]->records.size()) {
            out.records.push_back(members[l]->records[row]);
          } else {
            out.records.push_back(ShardEdge{0xffff, 0xffff});
            ++out.pad_count;
          }
        }
      }
      zipped.push_back(std::move(out));
    }
    idx = end;
  }
  layout.lists = std::move(zipped);
  layout.shuffled = true;
  std::uint32_t n = layout.intervals.empty() ? 0 : layout.intervals.back().end;
  place_shards(layout, n);
  return layout;
}

// ---------------------------------------------------------------------------

StrideMapping stride_map(const Graph& g, std::uint32_t k) {
  if (k == 0) throw Error("stride mapping needs k >= 1");
  StrideMapping out;
  out.new_id.resize(g.n);
  out.old_id.resize(g.n);
  // Residue class r holds ceil((n - r) / k) vertices.
  std::vector<std::uint64_t> offset(k + 1, 0);
  for (std::uint32_t r = 0; r < k; ++r) {
    std::uint64_t members = g.n > r ? (std::uint64_t{g.n} - r + k - 1) / k : 0;
    offset[r + 1] = offset[r] + members;
  }
  for (std::uint32_t v = 0; v < g.n; ++v) {
    auto id = static_cast<VertexId>(offset[v % k] + v / k);
    out.new_id[v] = id;
    out.old_id[id] = v;
  }
  out.graph = g;
  for (std::uint32_t v = 0; v < g.n && !g.labels.empty(); ++v) out.graph.labels[out.new_id[v]] = g.labels[v];
  for (Edge& e : out.graph.edges) {
    e.src = out.new_id[e.src];
    e.dst = out.new_id[e.dst];
  }
  return out;
}

}  // namespace gsim
