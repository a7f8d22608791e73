#include "gsim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace gsim {

VertexId resolve_root(const Graph& g, std::optional<std::uint64_t> requested) {
  if (!requested) return choose_root(g);
  if (auto v = vertex_by_label(g, *requested)) return *v;
  throw UsageError("root " + std::to_string(*requested) + " is not a vertex of " + g.name);
}

SingleRun run_single(const Graph& g, const std::string& graph_label, const AccelConfig& cfg, const DramConfig& dram,
                     std::optional<std::uint64_t> root, std::ostream* trace) {
  const VertexId r = needs_root(cfg.problem.problem) ? resolve_root(g, root) : 0;
  SingleRun out;
  out.result = simulate(g, cfg, dram, r, trace);
  out.row = compute_metrics(out.result, RunLabels{graph_label, dram.name}, cfg);
  return out;
}

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T to_num(const std::string& s, const std::function<void(const std::string&)>& bad) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) bad("expected an integer, got " + s);
  return v;
}

}  // namespace

SweepConfig parse_sweep_config(std::string_view text, std::string_view origin) {
  SweepConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  std::function<void(const std::string&)> bad = [&](const std::string& why) {
    throw UsageError(std::string(origin) + ":" + std::to_string(lineno) + ": " + why);
  };
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string::npos) bad("expected key = value");
    std::string key = trim(std::string_view(t).substr(0, eq));
    std::vector<std::string> items = split_list(t.substr(eq + 1));
    if (items.empty()) bad("empty list for " + key);
    if (!seen.insert(key).second) bad("duplicate key " + key);
    try {
      if (key == "accelerators") {
        for (const auto& i : items) c.accelerators.push_back(parse_accelerator(i));
      } else if (key == "problems") {
        for (const auto& i : items) c.problems.push_back(parse_problem(i));
      } else if (key == "graphs") {
        c.graphs = items;
      } else if (key == "dram") {
        c.drams = items;
      } else if (key == "channels") {
        c.channels.clear();
        for (const auto& i : items) c.channels.push_back(to_num<std::uint32_t>(i, bad));
      } else if (key == "optimizations") {
        c.optimizations = items;
      } else if (key == "root") {
        if (items.size() != 1) bad("root takes one value");
        c.root = to_num<std::uint64_t>(items[0], bad);
      } else if (key == "interval_size") {
        if (items.size() != 1) bad("interval_size takes one value");
        c.interval_size = to_num<std::uint32_t>(items[0], bad);
      } else if (key == "bram_budget_bytes") {
        if (items.size() != 1) bad("bram_budget_bytes takes one value");
        c.bram_budget_bytes = to_num<std::uint64_t>(items[0], bad);
      } else {
        bad("unknown key " + key);
      }
    } catch (const UsageError& e) {
      if (std::string(e.what()).rfind(std::string(origin), 0) == 0) throw;
      bad(e.what());
    }
  }
  if (c.accelerators.empty()) throw UsageError(std::string(origin) + ": no accelerators");
  if (c.problems.empty()) throw UsageError(std::string(origin) + ": no problems");
  if (c.graphs.empty()) throw UsageError(std::string(origin) + ": no graphs");
  return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read sweep config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep_config(ss.str(), path.string());
}

std::vector<SweepJob> expand(const SweepConfig& config, std::size_t* invalid) {
  std::vector<SweepJob> jobs;
  std::size_t dropped = 0;
  for (Accelerator a : config.accelerators) {
    for (Problem p : config.problems) {
      for (std::size_t gi = 0; gi < config.graphs.size(); ++gi) {
        for (const auto& d : config.drams) {
          for (std::uint32_t ch : config.channels) {
            for (const auto& opt : config.optimizations) {
              AccelConfig cfg = make_accel_config(a, p, ch, parse_optimizations(opt, a));
              cfg.interval_size = config.interval_size;
              cfg.bram_budget_bytes = config.bram_budget_bytes;
              try {
                cfg.validate();
              } catch (const UsageError&) {
                ++dropped;
                continue;
              }
              jobs.push_back({gi, d, cfg});
            }
          }
        }
      }
    }
  }
  if (invalid) *invalid = dropped;
  return jobs;
}

unsigned workers_from_env() {
  if (const char* env = std::getenv("GSIM_WORKERS")) {
    unsigned v = 0;
    std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || v == 0) {
      throw UsageError("GSIM_WORKERS must be a positive integer");
    }
    return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

SweepSummary run_sweep(const SweepConfig& config, const std::filesystem::path& out, unsigned workers,
                       std::ostream* log) {
  SweepSummary summary;
  std::vector<SweepJob> all = expand(config, &summary.invalid);
  summary.jobs = all.size();

  std::vector<Graph> graphs;
  for (const auto& spec : config.graphs) graphs.push_back(resolve_graph(GraphSource{spec}));
  std::vector<DramConfig> drams;
  for (const auto& d : config.drams) drams.push_back(resolve_dram(d));
  auto dram_of = [&](const std::string& name) -> const DramConfig& {
    auto it = std::find(config.drams.begin(), config.drams.end(), name);
    return drams[static_cast<std::size_t>(it - config.drams.begin())];
  };

  std::set<std::string> done;
  const bool exists = std::filesystem::exists(out) && std::filesystem::file_size(out) > 0;
  if (exists) {
    for (const auto& r : read_csv(out)) done.insert(r.key());
  }
  std::vector<SweepJob> jobs;
  for (const auto& j : all) {
    MetricRow probe;
    probe.accelerator = std::string(to_string(j.cfg.which));
    probe.problem = std::string(to_string(j.cfg.problem.problem));
    probe.graph = config.graphs[j.graph];
    probe.dram = dram_of(j.dram).name;
    probe.channels = j.cfg.channels;
    probe.optimizations = to_string(j.cfg.optimizations);
    if (done.count(probe.key())) {
      ++summary.existing;
    } else {
      jobs.push_back(j);
    }
  }

  std::ofstream os(out, std::ios::app);
  if (!os) throw Error("cannot write " + out.string());
  if (!exists) write_csv_header(os);
  os.flush();

  // Rows are committed in job order as soon as their predecessors finish.
  std::vector<std::optional<MetricRow>> results(jobs.size());
  std::vector<std::string> errors(jobs.size());
  std::mutex mu;
  std::size_t committed = 0;
  std::atomic<std::size_t> next{0};
  std::string first_error;

  auto commit = [&]() {
    while (committed < jobs.size() && (results[committed] || !errors[committed].empty())) {
      if (results[committed]) {
        write_csv_row(os, *results[committed]);
        os.flush();
        ++summary.ran;
        if (log) *log << "done " << results[committed]->key() << '\n';
        results[committed].reset();
      }
      ++committed;
    }
  };

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const SweepJob& j = jobs[i];
      try {
        SingleRun r = run_single(graphs[j.graph], config.graphs[j.graph], j.cfg, dram_of(j.dram), config.root);
        std::lock_guard lock(mu);
        results[i] = std::move(r.row);
        commit();
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        errors[i] = e.what();
        if (first_error.empty()) first_error = e.what();
        if (log) *log << "failed job " << i << ": " << e.what() << '\n';
        commit();
      }
    }
  };

  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1))));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (!first_error.empty()) throw Error("sweep finished with failures; first: " + first_error);
  return summary;
}

}  // namespace gsim
