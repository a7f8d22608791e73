#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "gsim/sweep.hpp"
#include "test_util.hpp"

using namespace gsim;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int gsim_exit(const std::string& args, const TempDir& dir) {
  std::string cmd = std::string(GSIM_BINARY) + " " + args + " > " + (dir.path() / "out.txt").string() + " 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("sweep config parsing") {
  SweepConfig c = parse_sweep_config(
      "accelerators = HitGraph, ThunderGP\nproblems = BFS # comment\ngraphs = rmat:6:4:1\nchannels = 1, 2\n");
  CHECK(c.accelerators.size() == 2);
  CHECK(c.channels == std::vector<std::uint32_t>{1, 2});
  CHECK(c.drams == std::vector<std::string>{"ddr4"});
  CHECK_THROWS_AS(parse_sweep_config("accelerators = HitGraph\naccelerators = HitGraph\n"), UsageError);
  CHECK_THROWS_AS(parse_sweep_config("colour = blue\n"), UsageError);
  CHECK_THROWS_AS(parse_sweep_config("problems = BFS\ngraphs = x\n"), UsageError);
  CHECK_THROWS_AS(parse_sweep_config("accelerators = HitGraph\nproblems = BFS\ngraphs = g\nchannels = two\n"),
                  UsageError);
}

TEST_CASE("expansion drops unsupported combinations") {
  SweepConfig c = parse_sweep_config(
      "accelerators = AccuGraph, HitGraph\nproblems = BFS, SSSP\ngraphs = rmat:6:4:1\nchannels = 1, 2\n");
  std::size_t invalid = 0;
  auto jobs = expand(c, &invalid);
  // AccuGraph: BFS@1 only; HitGraph: all four
  CHECK(jobs.size() == 5);
  CHECK(invalid == 3);
}

TEST_CASE("sweep resumes and is order-stable") {
  SweepConfig c = parse_sweep_config(
      "accelerators = HitGraph, ThunderGP\nproblems = BFS, WCC\ngraphs = rmat:6:4:1\nchannels = 1, 2\n");
  TempDir dir;
  auto out = dir.path() / "s.csv";
  SweepSummary first = run_sweep(c, out, 4);
  CHECK(first.ran == 8);
  const std::string once = slurp(out);
  SweepSummary second = run_sweep(c, out, 4);
  CHECK(second.ran == 0);
  CHECK(second.existing == 8);
  CHECK(slurp(out) == once);

  auto serial = dir.path() / "serial.csv";
  run_sweep(c, serial, 1);
  CHECK(slurp(serial) == once);
  CHECK(read_csv(out).size() == 8);
}

TEST_CASE("cli exit codes") {
  TempDir dir;
  CHECK(gsim_exit("simulate --accel HitGraph --problem BFS --graph rmat:6:4:1", dir) == 0);
  CHECK(gsim_exit("simulate --accel AccuGraph --problem SSSP --graph rmat:6:4:1", dir) == 2);
  CHECK(gsim_exit("simulate --accel Nope --problem BFS --graph rmat:6:4:1", dir) == 2);
  CHECK(gsim_exit("simulate --problem BFS", dir) == 2);
  CHECK(gsim_exit("frobnicate", dir) == 2);
  CHECK(gsim_exit("stats " + (dir.path() / "missing.txt").string(), dir) == 1);
  CHECK(gsim_exit("--help", dir) == 0);
}

TEST_CASE("cli simulate, trace and replay") {
  TempDir dir;
  const auto trace = (dir.path() / "t.csv").string();
  const auto csv = (dir.path() / "r.csv").string();
  REQUIRE(gsim_exit("simulate --accel ThunderGP --problem BFS --graph rmat:6:4:1 --channels 2 --trace " + trace +
                        " --out " + csv,
                    dir) == 0);
  CHECK(read_csv(csv).size() == 1);
  CHECK(gsim_exit("replay " + trace, dir) == 0);
  CHECK(slurp(dir.path() / "out.txt").find("mismatched_outcomes 0") != std::string::npos);
}

TEST_CASE("cli convert and stats") {
  TempDir dir;
  auto txt = dir.file("g.txt", "5 6\n6 7\n7 5\n");
  const auto bin = (dir.path() / "g.gsg").string();
  REQUIRE(gsim_exit("convert " + txt.string() + " " + bin, dir) == 0);
  REQUIRE(gsim_exit("stats " + bin, dir) == 0);
  CHECK(slurp(dir.path() / "out.txt").find("\nn 3\n") != std::string::npos);
}
