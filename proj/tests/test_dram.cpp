#include <doctest.h>

#include <sstream>

#include "gsim/dram.hpp"
#include "test_util.hpp"

using namespace gsim;

namespace {

MemRequest read_at(std::uint64_t address, std::uint32_t channel = 0) {
  MemRequest r;
  r.address = address;
  r.channel = channel;
  return r;
}

std::vector<Completion> drain(Dram& d) {
  std::vector<Completion> out;
  while (!d.idle()) {
    for (const auto& c : d.tick()) out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("presets") {
  DramConfig d4 = dram_preset("ddr4");
  CHECK(d4.peak_bandwidth() == doctest::Approx(19.2e9));
  CHECK(d4.row_buffer_bytes == 8192);
  CHECK(d4.bytes_per_request() == 64);
  DramConfig hbm = dram_preset("hbm");
  CHECK(hbm.row_buffer_bytes == 2048);
  CHECK(hbm.bytes_per_request() == 64);
  CHECK(dram_preset("ddr3").standard == DramStandard::DDR3);
  CHECK(dram_preset("ddr3-1600").data_rate == 1600);
  CHECK_THROWS_AS(dram_preset("ddr9"), UsageError);
}

TEST_CASE("config files override presets") {
  DramConfig c = parse_dram_config("preset = hbm\n# note\ntCL = 9\nqueue_depth = 8\n");
  CHECK(c.standard == DramStandard::HBM);
  CHECK(c.tCL == 9);
  CHECK(c.queue_depth == 8);
  CHECK_THROWS_AS(parse_dram_config("tCL = 9\npreset = hbm\n"), UsageError);
  CHECK_THROWS_AS(parse_dram_config("bogus = 1\n"), UsageError);
  CHECK_THROWS_AS(parse_dram_config("tCL = x\n"), UsageError);
  CHECK(resolve_dram(GSIM_CONFIG_DIR "/dram/ddr4.cfg").name == "ddr4");
}

TEST_CASE("address decoding puts columns lowest") {
  DramConfig c = dram_preset("ddr4");
  CHECK(decode(0, c) == DramCoord{0, 0, 0, 0, 0});
  CHECK(decode(64, c).column == 1);
  DramCoord next_row_slot = decode(8192, c);
  CHECK(next_row_slot.bank_group == 1);
  CHECK(next_row_slot.row == 0);
  DramCoord wrap = decode(8192ull * 16, c);
  CHECK(wrap.row == 1);
  CHECK(wrap.bank == 0);
  CHECK_THROWS_AS(decode(c.channel_bytes(), c), Error);
}

TEST_CASE("first access latency") {
  DramConfig c = dram_preset("ddr4");
  Dram d(c);
  d.enqueue(read_at(0));
  auto done = drain(d);
  REQUIRE(done.size() == 1);
  CHECK(done[0].outcome == RowOutcome::Miss);
  CHECK(done[0].done_cycle == c.tRCD + c.tCL + c.burst_cycles());
}

TEST_CASE("hit, miss and conflict") {
  DramConfig c = dram_preset("ddr4");
  Dram d(c);
  const std::uint64_t same_bank_next_row = 8192ull * 16;
  d.enqueue(read_at(0));
  d.enqueue(read_at(64));
  d.enqueue(read_at(same_bank_next_row));
  auto done = drain(d);
  REQUIRE(done.size() == 3);
  CHECK(done[0].outcome == RowOutcome::Miss);
  CHECK(done[1].outcome == RowOutcome::Hit);
  CHECK(done[2].outcome == RowOutcome::Conflict);
  DramStats s = d.stats();
  CHECK(s.row_hits + s.row_misses + s.row_conflicts == 3);
  CHECK(s.reads == 3);
  CHECK(s.bytes_transferred == 192);
}

TEST_CASE("row hits are served before older misses") {
  Dram d(dram_preset("ddr4"));
  d.enqueue(read_at(0));
  while (d.stats().requests() == 0) d.tick();
  d.enqueue(read_at(8192ull * 16));  // conflict, older
  d.enqueue(read_at(128));           // hit, younger
  auto done = drain(d);
  REQUIRE(done.size() == 3);
  CHECK(done[1].request.address == 128);
}

TEST_CASE("queue backpressure") {
  DramConfig c = dram_preset("ddr4");
  c.queue_depth = 2;
  Dram d(c);
  d.enqueue(read_at(0));
  d.enqueue(read_at(64));
  CHECK_FALSE(d.can_accept(0));
  CHECK_THROWS_AS(d.enqueue(read_at(128)), Error);
  CHECK_THROWS_AS(d.enqueue(read_at(0, 1)), Error);
  CHECK_FALSE(d.can_accept(1));
}

TEST_CASE("misaligned requests are rejected") {
  Dram d(dram_preset("ddr4"));
  CHECK_THROWS_AS(d.enqueue(read_at(4)), Error);
}

TEST_CASE("channels run in parallel") {
  DramConfig c = dram_preset("ddr4");
  c.channels = 2;
  Dram one(dram_preset("ddr4"));
  Dram two(c);
  for (std::uint64_t i = 0; i < 16; ++i) {
    one.enqueue(read_at(i * 64));
    two.enqueue(read_at((i / 2) * 64, static_cast<std::uint32_t>(i % 2)));
  }
  drain(one);
  drain(two);
  CHECK(two.stats().elapsed_cycles < one.stats().elapsed_cycles);
  CHECK(two.channel_stats(0).requests() == 8);
}

TEST_CASE("trace round trip and replay") {
  DramConfig c = dram_preset("ddr4");
  Dram d(c);
  std::ostringstream trace;
  write_trace_header(trace);
  d.set_completion_observer([&](const Completion& done) { write_trace_row(trace, done); });
  std::uint64_t addr[] = {0, 64, 8192ull * 16, 4096, 8192};
  for (auto a : addr) d.enqueue(read_at(a));
  MemRequest w = read_at(128);
  w.kind = AccessKind::Write;
  d.enqueue(w);
  drain(d);
  TempDir dir;
  auto path = dir.file("t.csv", trace.str());
  auto records = read_trace(path);
  REQUIRE(records.size() == 6);
  ReplayResult r = replay(records, c);
  CHECK(r.mismatched_outcomes == 0);
  CHECK(r.stats.requests() == 6);
  CHECK(r.stats.writes == 1);
  CHECK(r.stats.elapsed_cycles == d.stats().elapsed_cycles);
  CHECK_THROWS_AS(read_trace(dir.file("bad.csv", "1,2,3\n")), Error);
}
