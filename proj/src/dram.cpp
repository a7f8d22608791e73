#include "gsim/dram.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>

namespace gsim {

std::string_view to_string(AccessKind k) { return k == AccessKind::Read ? "R" : "W"; }

std::string_view to_string(RowOutcome o) {
  switch (o) {
    case RowOutcome::Unknown: return "unknown";
    case RowOutcome::Hit: return "hit";
    case RowOutcome::Miss: return "miss";
    case RowOutcome::Conflict: return "conflict";
  }
  return "?";
}

DramCoord decode(std::uint64_t address, const DramConfig& config) {
  if (address >= config.channel_bytes()) {
    throw Error("address 0x" + [&] {
      std::ostringstream ss;
      ss << std::hex << address;
      return ss.str();
    }() + " beyond channel capacity");
  }
  DramCoord c;
  c.column = static_cast<std::uint32_t>((address % config.row_buffer_bytes) / kLineBytes);
  std::uint64_t rest = address / config.row_buffer_bytes;
  c.bank_group = static_cast<std::uint32_t>(rest % config.bank_groups);
  rest /= config.bank_groups;
  const std::uint32_t banks_per_group = config.banks_per_rank / config.bank_groups;
  c.bank = static_cast<std::uint32_t>(rest % banks_per_group);
  rest /= banks_per_group;
  c.rank = static_cast<std::uint32_t>(rest % config.ranks);
  c.row = rest / config.ranks;
  return c;
}

DramStats& DramStats::operator+=(const DramStats& o) {
  row_hits += o.row_hits;
  row_misses += o.row_misses;
  row_conflicts += o.row_conflicts;
  reads += o.reads;
  writes += o.writes;
  busy_cycles += o.busy_cycles;
  bytes_transferred += o.bytes_transferred;
  latency_cycles += o.latency_cycles;
  elapsed_cycles = std::max(elapsed_cycles, o.elapsed_cycles);
  peak_bytes_per_cycle += o.peak_bytes_per_cycle;
  double capacity = peak_bytes_per_cycle * double(elapsed_cycles);
  utilization = capacity > 0.0 ? double(bytes_transferred) / capacity : 0.0;
  return *this;
}

Dram::Dram(DramConfig config) : config_(std::move(config)) {
  config_.validate();
  burst_ = config_.burst_cycles();
  channels_.resize(config_.channels);
  const std::uint32_t banks = config_.ranks * config_.banks_per_rank;
  for (auto& ch : channels_) {
    ch.banks.resize(banks);
    ch.last_col_group.assign(config_.ranks * config_.bank_groups, 0);
    ch.open_row_wanted.assign(banks, 0);
    ch.queue.reserve(config_.queue_depth);
  }
}

bool Dram::can_accept(std::uint32_t channel) const {
  return channel < channels_.size() && channels_[channel].queue.size() < config_.queue_depth;
}

void Dram::enqueue(const MemRequest& request) {
  if (request.channel >= channels_.size()) throw Error("request channel out of range");
  if (request.address % kLineBytes != 0) throw Error("request address not line aligned");
  Channel& ch = channels_[request.channel];
  if (ch.queue.size() >= config_.queue_depth) throw Error("channel queue full");
  DramCoord coord = decode(request.address, config_);
  Pending p;
  p.c.request = request;
  p.c.seq = next_seq_++;
  p.c.enqueue_cycle = now_;
  p.bank_group = coord.rank * config_.bank_groups + coord.bank_group;
  p.bank = (coord.rank * config_.bank_groups + coord.bank_group) * (config_.banks_per_rank / config_.bank_groups) +
           coord.bank;
  p.row = static_cast<std::int64_t>(coord.row);
  ch.queue.push_back(std::move(p));
}

void Dram::issue_column(Channel& ch, std::size_t idx) {
  Pending p = std::move(ch.queue[idx]);
  ch.queue.erase(ch.queue.begin() + static_cast<std::ptrdiff_t>(idx));
  Bank& bank = ch.banks[p.bank];
  const bool read = p.c.request.kind == AccessKind::Read;
  const std::uint64_t data_start = now_ + (read ? config_.tCL : config_.tCWL);
  p.c.done_cycle = data_start + burst_;
  ch.bus_free = p.c.done_cycle;
  ch.last_col = now_;
  ch.any_col = true;
  ch.last_col_group[p.bank_group] = now_ + 1;  // stored +1 so 0 means "never"
  if (read) {
    bank.next_pre = std::max(bank.next_pre, now_ + config_.tRTP);
  } else {
    bank.next_pre = std::max(bank.next_pre, p.c.done_cycle + config_.tWR);
  }
  if (p.c.outcome == RowOutcome::Unknown) p.c.outcome = RowOutcome::Hit;

  DramStats& s = ch.stats;
  switch (p.c.outcome) {
    case RowOutcome::Hit: ++s.row_hits; break;
    case RowOutcome::Miss: ++s.row_misses; break;
    case RowOutcome::Conflict: ++s.row_conflicts; break;
    case RowOutcome::Unknown: break;
  }
  (read ? s.reads : s.writes)++;
  s.busy_cycles += burst_;
  s.bytes_transferred += config_.bytes_per_request();
  s.latency_cycles += p.c.done_cycle - p.c.enqueue_cycle;
  ch.in_flight.push_back(p.c);
}

void Dram::schedule(Channel& ch) {
  if (ch.queue.empty()) return;
  // First ready: the oldest row hit whose column command can go out now.
  auto column_ready = [&](const Pending& p) {
    const Bank& b = ch.banks[p.bank];
    if (now_ < b.next_col) return false;
    if (ch.any_col && now_ < ch.last_col + config_.tCCD_S) return false;
    std::uint64_t group_last = ch.last_col_group[p.bank_group];
    if (group_last != 0 && now_ < group_last - 1 + config_.tCCD_L) return false;
    const bool read = p.c.request.kind == AccessKind::Read;
    return now_ + (read ? config_.tCL : config_.tCWL) >= ch.bus_free;
  };
  for (std::size_t i = 0; i < ch.queue.size(); ++i) {
    const Pending& p = ch.queue[i];
    if (ch.banks[p.bank].open_row == p.row) {
      ch.open_row_wanted[p.bank] = 1;
    }
  }
  bool issued = false;
  for (std::size_t i = 0; i < ch.queue.size(); ++i) {
    const Pending& p = ch.queue[i];
    if (ch.banks[p.bank].open_row == p.row && column_ready(p)) {
      issue_column(ch, i);
      issued = true;
      break;
    }
  }
  // Otherwise the oldest request that needs a row command gets one, unless
  // its bank still has queued hits to the open row.
  if (!issued) {
    for (auto& p : ch.queue) {
      Bank& b = ch.banks[p.bank];
      if (b.open_row == p.row) continue;
      if (b.open_row < 0) {
        if (now_ >= b.next_act) {
          b.open_row = p.row;
          b.next_col = now_ + config_.tRCD;
          b.next_pre = std::max(b.next_pre, now_ + config_.tRAS);
          b.next_act = now_ + config_.tRAS + config_.tRP;
          if (p.c.outcome == RowOutcome::Unknown) p.c.outcome = RowOutcome::Miss;
          break;
        }
      } else if (!ch.open_row_wanted[p.bank] && now_ >= b.next_pre) {
        b.open_row = -1;
        b.next_act = std::max(b.next_act, now_ + config_.tRP);
        if (p.c.outcome == RowOutcome::Unknown) p.c.outcome = RowOutcome::Conflict;
        break;
      }
    }
  }
  for (const auto& p : ch.queue) ch.open_row_wanted[p.bank] = 0;
  if (issued) {
    // the issued request is gone from the queue; clear its bank flag too
    std::fill(ch.open_row_wanted.begin(), ch.open_row_wanted.end(), 0);
  }
}

std::span<const Completion> Dram::tick() {
  completed_.clear();
  for (auto& ch : channels_) {
    if (ch.queue.empty() && ch.in_flight.empty()) continue;
    schedule(ch);
    while (!ch.in_flight.empty() && ch.in_flight.front().done_cycle <= now_) {
      completed_.push_back(ch.in_flight.front());
      ch.in_flight.pop_front();
    }
  }
  if (!completed_.empty()) {
    last_done_ = now_;
    if (observer_) {
      for (const auto& c : completed_) observer_(c);
    }
  }
  ++now_;
  return completed_;
}

bool Dram::idle() const {
  for (const auto& ch : channels_) {
    if (!ch.queue.empty() || !ch.in_flight.empty()) return false;
  }
  return true;
}

std::uint64_t Dram::pending() const {
  std::uint64_t total = 0;
  for (const auto& ch : channels_) total += ch.queue.size() + ch.in_flight.size();
  return total;
}

DramStats Dram::channel_stats(std::uint32_t channel) const {
  DramStats s = channels_.at(channel).stats;
  s.elapsed_cycles = s.requests() ? last_done_ + 1 : 0;
  s.peak_bytes_per_cycle = double(config_.bytes_per_request()) / burst_;
  double capacity = s.peak_bytes_per_cycle * double(s.elapsed_cycles);
  s.utilization = capacity > 0.0 ? double(s.bytes_transferred) / capacity : 0.0;
  return s;
}

DramStats Dram::stats() const {
  DramStats total;
  for (std::uint32_t c = 0; c < channels_.size(); ++c) total += channel_stats(c);
  return total;
}

// ---------------------------------------------------------------------------

void write_trace_header(std::ostream& os) {
  os << "seq,enqueue_cycle,channel,kind,address,classification,done_cycle,region,payload\n";
}

void write_trace_row(std::ostream& os, const Completion& c) {
  os << c.seq << ',' << c.enqueue_cycle << ',' << c.request.channel << ',' << to_string(c.request.kind) << ','
     << c.request.address << ',' << to_string(c.outcome) << ',' << c.done_cycle << ',' << to_string(c.request.region)
     << ',' << c.request.payload << '\n';
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read trace " + path.string());
  std::vector<TraceRecord> out;
  std::string line;
  std::uint64_t lineno = 0;
  auto bad = [&] { throw Error(path.string() + ":" + std::to_string(lineno) + ": malformed trace row"); };
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.rfind("seq,", 0) == 0) continue;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 9) bad();
    TraceRecord r;
    try {
      r.seq = std::stoull(f[0]);
      r.enqueue_cycle = std::stoull(f[1]);
      r.channel = static_cast<std::uint32_t>(std::stoul(f[2]));
      r.address = std::stoull(f[4]);
      r.done_cycle = std::stoull(f[6]);
      r.payload = static_cast<std::uint32_t>(std::stoul(f[8]));
    } catch (const std::exception&) {
      bad();
    }
    if (f[3] == "R") r.kind = AccessKind::Read;
    else if (f[3] == "W") r.kind = AccessKind::Write;
    else bad();
    if (f[5] == "hit") r.outcome = RowOutcome::Hit;
    else if (f[5] == "miss") r.outcome = RowOutcome::Miss;
    else if (f[5] == "conflict") r.outcome = RowOutcome::Conflict;
    else bad();
    if (f[7] == "values") r.region = RegionKind::Values;
    else if (f[7] == "pointers") r.region = RegionKind::Pointers;
    else if (f[7] == "edges") r.region = RegionKind::Edges;
    else if (f[7] == "updates") r.region = RegionKind::Updates;
    else bad();
    out.push_back(r);
  }
  return out;
}

ReplayResult replay(const std::vector<TraceRecord>& trace, const DramConfig& config) {
  std::vector<const TraceRecord*> order;
  order.reserve(trace.size());
  for (const auto& r : trace) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->seq < b->seq; });

  DramConfig sized = config;
  for (const auto& r : trace) sized.channels = std::max(sized.channels, r.channel + 1);
  Dram dram(sized);
  ReplayResult result;
  std::vector<RowOutcome> expected(order.size());
  std::size_t next = 0;
  std::uint64_t done = 0;
  while (done < order.size()) {
    while (next < order.size() && order[next]->enqueue_cycle <= dram.cycle()) {
      const TraceRecord& r = *order[next];
      if (!dram.can_accept(r.channel)) throw Error("trace does not fit the DRAM queue at cycle " + std::to_string(dram.cycle()));
      MemRequest req;
      req.id = next;
      req.kind = r.kind;
      req.channel = r.channel;
      req.address = r.address;
      req.region = r.region;
      req.payload = r.payload;
      expected[next] = r.outcome;
      dram.enqueue(req);
      ++next;
    }
    for (const auto& c : dram.tick()) {
      if (c.outcome != expected[c.request.id]) ++result.mismatched_outcomes;
      ++done;
    }
  }
  result.stats = dram.stats();
  return result;
}

}  // namespace gsim
