#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gsim/graph.hpp"
#include "gsim/partition.hpp"

namespace gsim {

enum class DramStandard { DDR3, DDR4, HBM };
std::string_view to_string(DramStandard s);

/// Geometry and timing of one DRAM standard. Timings are in DRAM clock
/// cycles of `clock_mhz`.
struct DramConfig {
  std::string name = "ddr4";
  DramStandard standard = DramStandard::DDR4;
  std::uint32_t channels = 1;
  std::uint32_t ranks = 1;
  std::uint32_t bank_groups = 4;
  std::uint32_t banks_per_rank = 16;  // across all bank groups
  std::uint32_t row_buffer_bytes = 8192;
  std::uint32_t data_rate = 2400;     // MT/s
  double clock_mhz = 1200.0;
  std::uint32_t bus_bits = 64;
  std::uint32_t burst_length = 8;
  std::uint32_t tCL = 17;
  std::uint32_t tRCD = 17;
  std::uint32_t tRP = 17;
  std::uint32_t tRAS = 39;
  std::uint32_t tRTP = 9;
  std::uint32_t tWR = 18;
  std::uint32_t tCCD_S = 4;
  std::uint32_t tCCD_L = 4;
  std::uint32_t tCWL = 17;
  std::uint64_t capacity_gbit = 16;   // per device
  std::uint32_t device_width = 8;     // bits per device
  std::uint32_t queue_depth = 32;     // per-channel request queue

  double tck_ns() const { return 1000.0 / clock_mhz; }
  /// Data bus cycles occupied by one burst.
  std::uint32_t burst_cycles() const;
  std::uint32_t bytes_per_request() const { return bus_bits * burst_length / 8; }
  /// Bytes per second per channel.
  double peak_bandwidth() const { return double(data_rate) * 1e6 * bus_bits / 8.0; }
  std::uint64_t rows_per_bank() const;
  std::uint64_t channel_bytes() const;

  void validate() const;
};

/// Shipped presets: "ddr4" (DDR4-2400), "ddr3" (DDR3-2133), "ddr3-1600",
/// "hbm" (HBM 1000 MT/s, 128-bit channel).
DramConfig dram_preset(std::string_view name);

/// Key-value text file ("key = value", '#' comments). An optional "preset"
/// key selects the starting point; later keys override it.
DramConfig load_dram_config(const std::filesystem::path& path);
DramConfig parse_dram_config(std::string_view text, std::string_view origin = "<string>");

/// Preset name or config file path.
DramConfig resolve_dram(std::string_view name_or_path);

struct DramCoord {
  std::uint32_t rank = 0;
  std::uint32_t bank_group = 0;
  std::uint32_t bank = 0;  // within the bank group
  std::uint64_t row = 0;
  std::uint32_t column = 0;  // in 64-byte units

  friend bool operator==(const DramCoord&, const DramCoord&) = default;
};

/// Column bits lowest, then bank group, bank, rank, row. Sequential lines
/// stay in one row up to the row boundary and then rotate through the banks.
DramCoord decode(std::uint64_t address, const DramConfig& config);

enum class AccessKind : std::uint8_t { Read, Write };
enum class RowOutcome : std::uint8_t { Unknown, Hit, Miss, Conflict };
std::string_view to_string(AccessKind k);
std::string_view to_string(RowOutcome o);

/// Request as seen by the memory: a cache-line access plus bookkeeping that
/// lets the issuing producer resolve its completion.
struct MemRequest {
  std::uint64_t id = 0;
  AccessKind kind = AccessKind::Read;
  std::uint32_t channel = 0;
  std::uint64_t address = 0;
  std::uint32_t bytes = 64;
  std::uint64_t issue_cycle = 0;  // accelerator cycle
  // Completion routing: producer id and the record range covered.
  std::uint32_t source = 0;
  std::uint64_t first = 0;
  std::uint32_t count = 1;
  // Accounting: region kind and payload bytes requested before line merging.
  RegionKind region = RegionKind::Values;
  std::uint32_t payload = 0;
  std::uint32_t flags = 0;
};

struct Completion {
  MemRequest request;
  RowOutcome outcome = RowOutcome::Unknown;
  std::uint64_t seq = 0;            // global enqueue order
  std::uint64_t enqueue_cycle = 0;  // DRAM cycles
  std::uint64_t done_cycle = 0;
};

struct DramStats {
  std::uint64_t row_hits = 0;
  std::uint64_t row_misses = 0;
  std::uint64_t row_conflicts = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t busy_cycles = 0;
  std::uint64_t bytes_transferred = 0;
  std::uint64_t latency_cycles = 0;  // sum of enqueue-to-completion latencies
  std::uint64_t elapsed_cycles = 0;
  double peak_bytes_per_cycle = 0.0;  // over the channels covered
  double utilization = 0.0;

  std::uint64_t requests() const { return reads + writes; }
  double mean_latency() const { return requests() ? double(latency_cycles) / double(requests()) : 0.0; }
  DramStats& operator+=(const DramStats& other);
};

/// Cycle-stepped open-row DRAM model with a per-channel FR-FCFS queue.
class Dram {
 public:
  explicit Dram(DramConfig config);

  const DramConfig& config() const { return config_; }
  std::uint64_t cycle() const { return now_; }

  bool can_accept(std::uint32_t channel) const;
  /// Queues a request at the current cycle. Throws if the channel is full,
  /// out of range, or the address is misaligned or beyond capacity.
  void enqueue(const MemRequest& request);

  /// Advances one DRAM clock; returns the requests completed in that cycle.
  std::span<const Completion> tick();

  bool idle() const;
  std::uint64_t pending() const;

  DramStats stats() const;
  DramStats channel_stats(std::uint32_t channel) const;

  void set_completion_observer(std::function<void(const Completion&)> observer) { observer_ = std::move(observer); }

 private:
  struct Bank {
    std::int64_t open_row = -1;
    std::uint64_t next_act = 0;
    std::uint64_t next_pre = 0;
    std::uint64_t next_col = 0;
  };
  struct Pending {
    Completion c;
    std::uint32_t bank = 0;  // flat index within the channel
    std::uint32_t bank_group = 0;
    std::int64_t row = 0;
  };
  struct Channel {
    std::vector<Pending> queue;
    std::vector<Bank> banks;
    std::deque<Completion> in_flight;
    std::vector<std::uint64_t> last_col_group;
    std::uint64_t last_col = 0;
    bool any_col = false;
    std::uint64_t bus_free = 0;
    DramStats stats;
    std::vector<char> open_row_wanted;
  };

  void schedule(Channel& ch);
  void issue_column(Channel& ch, std::size_t idx);

  DramConfig config_;
  std::uint32_t burst_ = 4;
  std::uint64_t now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t last_done_ = 0;
  std::vector<Channel> channels_;
  std::vector<Completion> completed_;
  std::function<void(const Completion&)> observer_;
};

// Request trace: one CSV row per request in enqueue order.
// header: seq,enqueue_cycle,channel,kind,address,classification,done_cycle,region,payload
void write_trace_header(std::ostream& os);
void write_trace_row(std::ostream& os, const Completion& c);

struct TraceRecord {
  std::uint64_t seq = 0;
  std::uint64_t enqueue_cycle = 0;
  std::uint32_t channel = 0;
  AccessKind kind = AccessKind::Read;
  std::uint64_t address = 0;
  RowOutcome outcome = RowOutcome::Unknown;
  std::uint64_t done_cycle = 0;
  RegionKind region = RegionKind::Values;
  std::uint32_t payload = 0;
};
std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

struct ReplayResult {
  DramStats stats;
  std::uint64_t mismatched_outcomes = 0;
};
/// Replays a trace through a fresh model, enqueueing each request at its
/// recorded cycle. The channel count grows to cover the trace.
ReplayResult replay(const std::vector<TraceRecord>& trace, const DramConfig& config);

}  // namespace gsim
