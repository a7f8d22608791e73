#include <doctest.h>

#include "gsim/flow.hpp"

using namespace gsim;

namespace {

std::vector<MemRequest> collect(RequestStream& s) {
  std::vector<MemRequest> out;
  for (int guard = 0; guard < 100000 && !s.exhausted(); ++guard) {
    if (const MemRequest* r = s.front()) {
      out.push_back(*r);
      s.pop();
    }
  }
  return out;
}

ProducerSpec spec(std::uint64_t base, std::uint64_t count, std::uint32_t rec, std::uint32_t source = 0) {
  ProducerSpec s;
  s.base = base;
  s.count = count;
  s.record_bytes = rec;
  s.source = source;
  return s;
}

}  // namespace

TEST_CASE("sequential producer") {
  SequentialProducer p(spec(256, 3, 4));
  auto out = collect(p);
  REQUIRE(out.size() == 3);
  CHECK(out[2].address == 264);
  CHECK(out[2].first == 2);
  CHECK(out[2].payload == 4);
}

TEST_CASE("producer limit holds records back") {
  SequentialProducer p(spec(0, 4, 4));
  p.set_limit(2);
  CHECK(p.front() != nullptr);
  p.pop();
  p.pop();
  CHECK(p.front() == nullptr);
  CHECK_FALSE(p.exhausted());
  p.set_limit(4);
  CHECK(p.front() != nullptr);
}

TEST_CASE("cache line merge of 4-byte records") {
  SequentialProducer p(spec(0, 40, 4));
  CacheLineMerge m(p);
  auto out = collect(m);
  REQUIRE(out.size() == 3);
  CHECK(out[0].address == 0);
  CHECK(out[0].first == 0);
  CHECK(out[0].count == 16);
  CHECK(out[0].payload == 64);
  CHECK(out[2].address == 128);
  CHECK(out[2].count == 8);
  CHECK(out[2].payload == 32);
}

TEST_CASE("records spanning two lines are tagged on the second") {
  // 12-byte records: record 5 covers bytes 60..71
  SequentialProducer p(spec(0, 6, 12));
  CacheLineMerge m(p);
  auto out = collect(m);
  REQUIRE(out.size() == 2);
  CHECK(out[0].count == 5);
  CHECK(out[0].first == 0);
  CHECK(out[1].address == 64);
  CHECK(out[1].first == 5);
  CHECK(out[1].count == 1);
  std::uint64_t payload = 0;
  for (auto& r : out) payload += r.payload;
  CHECK(payload == 72);
}

TEST_CASE("non-adjacent requests to one line do not merge") {
  QueueStream q;
  for (std::uint64_t a : {0u, 64u, 4u}) {
    MemRequest r;
    r.address = a;
    r.bytes = 4;
    r.payload = 4;
    q.push(r);
  }
  q.close();
  CacheLineMerge m(q);
  auto out = collect(m);
  REQUIRE(out.size() == 3);
  CHECK(out[2].address == 0);
}

TEST_CASE("round robin skips idle inputs") {
  SequentialProducer a(spec(0, 2, 64, 1));
  QueueStream idle;
  SequentialProducer b(spec(4096, 2, 64, 2));
  RoundRobinMerge rr({&a, &idle, &b});
  CHECK_FALSE(rr.exhausted());
  std::vector<std::uint32_t> sources;
  for (int i = 0; i < 4; ++i) {
    REQUIRE(rr.front() != nullptr);
    sources.push_back(rr.front()->source);
    rr.pop();
  }
  CHECK(sources == std::vector<std::uint32_t>{1, 2, 1, 2});
  CHECK(rr.front() == nullptr);
  CHECK_FALSE(rr.exhausted());
  idle.close();
  CHECK(rr.exhausted());
}

TEST_CASE("priority merge prefers earlier inputs") {
  SequentialProducer low(spec(0, 2, 64, 1));
  QueueStream high;
  PriorityMerge pm({&high, &low});
  CHECK(pm.front()->source == 1);
  pm.pop();
  MemRequest r;
  r.source = 9;
  high.push(r);
  CHECK(pm.front()->source == 9);
  pm.pop();
  CHECK(pm.front()->source == 1);
}

TEST_CASE("filter drops unchanged writes") {
  QueueStream q;
  for (std::uint32_t f : {0u, kValueChanged, 0u, kValueChanged}) {
    MemRequest r;
    r.flags = f;
    q.push(r);
  }
  q.close();
  Filter keep(q, value_changed);
  auto out = collect(keep);
  CHECK(out.size() == 2);
  CHECK(keep.dropped() == 2);
  CHECK(keep.exhausted());
}

TEST_CASE("completion frontier") {
  CompletionFrontier f;
  f.complete(4, 4);
  CHECK(f.prefix() == 0);
  f.complete(0, 2);
  CHECK(f.prefix() == 2);
  f.complete(2, 2);
  CHECK(f.prefix() == 8);
  f.reset(3);
  CHECK(f.prefix() == 3);
}

TEST_CASE("crossbar appends into shared queues") {
  std::vector<std::uint64_t> cursors(2, 0);
  std::vector<Crossbar::Output> outs{{0, 0, 100}, {1, 1024, 2}};
  Crossbar a(outs, [](VertexId v) { return v % 2; }, cursors, 7);
  Crossbar b(outs, [](VertexId v) { return v % 2; }, cursors, 8);
  CHECK(a.push(4) == 0);
  CHECK(a.push(1) == 1);
  CHECK(b.push(3) == 1);
  CHECK_THROWS_AS(b.push(5), Error);
  CHECK(cursors == std::vector<std::uint64_t>{1, 2});
  a.close();
  b.close();
  auto out_b = collect(b.stream(1));
  REQUIRE(out_b.size() == 1);
  CHECK(out_b[0].address == 1024);
  CHECK(out_b[0].first == 1);
  CHECK(out_b[0].kind == AccessKind::Write);
  CHECK(out_b[0].channel == 1);
  CHECK(a.pushed() == 2);
}

TEST_CASE("callback registry") {
  CallbackRegistry reg;
  int hits = 0;
  reg.register_callback(3, [&](const MemRequest&) { ++hits; });
  MemRequest r;
  r.source = 3;
  reg.dispatch(r);
  CHECK(hits == 1);
  r.source = 2;
  CHECK_THROWS_AS(reg.dispatch(r), Error);
}

TEST_CASE("clock mapping") {
  SimClock c;
  c.accel_mhz = 200;
  c.dram_mhz = 1200;
  CHECK(c.dram_cycle_of(1) == 6);
  c.accel_mhz = 250;
  CHECK(c.dram_cycle_of(5) == 24);
}

namespace {

class StreamModel final : public Model {
 public:
  explicit StreamModel(std::uint64_t lines) : producer_(spec(0, lines, 64)) { ep_.attach(&producer_); }
  std::uint32_t endpoints() const override { return 1; }
  RequestStream& endpoint(std::uint32_t) override { return ep_; }
  void on_complete(const MemRequest&) override {
    ep_.completed();
    ++completed_;
  }
  bool on_cycle(std::uint64_t) override { return false; }
  bool done() const override { return const_cast<Endpoint&>(ep_).drained(); }
  std::uint64_t completed_ = 0;

 private:
  SequentialProducer producer_;
  Endpoint ep_;
};

}  // namespace

TEST_CASE("event loop issues at most one request per accelerator cycle") {
  StreamModel m(100);
  Dram d(dram_preset("ddr4"));
  RunOptions opt;
  opt.accel_mhz = 200;
  LoopResult r = run(m, d, opt);
  CHECK(m.completed_ == 100);
  CHECK(r.requests == 100);
  CHECK(r.accel_cycles >= 100);
  CHECK(r.elapsed_ns >= 100 * 5.0);
  CHECK(r.payload_bytes.at({RegionKind::Values, AccessKind::Read}) == 6400);
}
