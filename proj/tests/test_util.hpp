#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include "gsim/graph.hpp"

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("gsim-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path file(const std::string& name, const std::string& content) const {
    auto p = path_ / name;
    std::ofstream(p) << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline gsim::Graph make_graph(std::uint32_t n, std::vector<std::pair<gsim::VertexId, gsim::VertexId>> edges,
                              std::string name = "test") {
  gsim::Graph g;
  g.n = n;
  for (auto [s, d] : edges) g.edges.push_back({s, d, 0});
  g.original_edge_count = g.edges.size();
  g.name = std::move(name);
  return g;
}

inline gsim::Graph path_graph(std::uint32_t n) {
  std::vector<std::pair<gsim::VertexId, gsim::VertexId>> e;
  for (std::uint32_t v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
  return make_graph(n, e, "path" + std::to_string(n));
}
