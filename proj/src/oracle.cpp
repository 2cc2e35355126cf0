#include "entcap/oracle.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace entcap {

namespace {

std::size_t edge_key(std::size_t n, std::size_t u, std::size_t v) {
  return std::min(u, v) * n + std::max(u, v);
}

}  // namespace

std::size_t oracle_size(const DirectedSnapshot& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::set<std::size_t>> neighbors(n);
  for (const auto& a : g.arcs()) {
    neighbors[a.from].insert(a.to);
    neighbors[a.to].insert(a.from);
  }
  std::size_t relays = 0;
  for (std::size_t v = 0; v < n; ++v) {
    if (v != g.source() && v != g.sink() && g.gain(v) == 1.0 && neighbors[v].size() == 2) ++relays;
  }
  return g.num_adjacencies() - relays;
}

std::vector<std::vector<std::size_t>> enumerate_simple_paths(const DirectedSnapshot& g) {
  const std::size_t n = g.num_nodes();
  std::vector<std::vector<std::size_t>> out_arcs(n);
  for (const auto& a : g.arcs()) out_arcs[a.from].push_back(a.to);

  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::size_t> path{g.source()};
  std::vector<char> visited(n, 0);
  visited[g.source()] = 1;
  auto dfs = [&](auto&& self, std::size_t v) -> void {
    if (v == g.sink()) {
      paths.push_back(path);
      return;
    }
    for (auto w : out_arcs[v]) {
      if (visited[w]) continue;
      visited[w] = 1;
      path.push_back(w);
      self(self, w);
      path.pop_back();
      visited[w] = 0;
    }
  };
  dfs(dfs, g.source());
  return paths;
}

void enumerate_path_sets(const DirectedSnapshot& g, const std::function<void(const PathSet&)>& visit,
                         const OracleOptions& options) {
  const auto size = oracle_size(g);
  if (size > options.max_links)
    throw GuardError("oracle refuses snapshot with " + std::to_string(size) + " realized links (cap " +
                     std::to_string(options.max_links) + ")");

  const std::size_t n = g.num_nodes();
  const auto paths = enumerate_simple_paths(g);
  std::vector<std::vector<std::size_t>> edges(paths.size());
  std::vector<double> gains(paths.size(), 1.0);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto& p = paths[i];
    for (std::size_t k = 0; k + 1 < p.size(); ++k) edges[i].push_back(edge_key(n, p[k], p[k + 1]));
    for (std::size_t k = 1; k + 1 < p.size(); ++k) gains[i] *= g.gain(p[k]);
  }

  std::vector<char> used(n * n, 0);
  auto fits = [&](std::size_t i) {
    return std::none_of(edges[i].begin(), edges[i].end(), [&](std::size_t e) { return used[e]; });
  };
  auto mark = [&](std::size_t i, char value) {
    for (auto e : edges[i]) used[e] = value;
  };

  std::vector<std::size_t> chosen;
  auto emit = [&] {
    if (options.maximal_only) {
      for (std::size_t i = 0; i < paths.size(); ++i)
        if (fits(i)) return;
    }
    PathSet set;
    for (auto i : chosen) {
      set.paths.push_back(paths[i]);
      set.value += gains[i];
    }
    visit(set);
  };

  // Branch on the first path (in list order) that still fits: include it or
  // exclude it.
  auto recurse = [&](auto&& self, std::size_t from) -> void {
    std::size_t next = from;
    while (next < paths.size() && !fits(next)) ++next;
    if (next == paths.size()) {
      emit();
      return;
    }
    mark(next, 1);
    chosen.push_back(next);
    self(self, next + 1);
    chosen.pop_back();
    mark(next, 0);
    self(self, next + 1);
  };
  recurse(recurse, 0);
}

PathSet best_path_set(const DirectedSnapshot& g, const OracleOptions& options) {
  PathSet best;
  enumerate_path_sets(
      g,
      [&](const PathSet& set) {
        if (set.value > best.value) best = set;
      },
      options);
  return best;
}

double brute_force_capacity(const DirectedSnapshot& g, const OracleOptions& options) {
  return best_path_set(g, options).value;
}

}  // namespace entcap
