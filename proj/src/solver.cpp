#include "entcap/solver.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <functional>
#include <map>
#include <tuple>

namespace entcap {

namespace {

constexpr double kTieTolerance = 1e-12;

// Depth-first branch-and-bound over multisets of edge-disjoint simple s-t
// paths. Paths are link-index sequences; each new path must be
// lexicographically >= the previous one, so every multiset is visited once
// and the preorder visit sequence is lexicographic.
class PathSearch {
 public:
  explicit PathSearch(const LinkGraph& g) : g_(g) {}

  void run() {
    const std::size_t n = static_cast<std::size_t>(g_.num_nodes());
    const std::size_t m = g_.links().size();
    res_.resize(m);
    for (std::size_t l = 0; l < m; ++l) res_[l] = g_.links()[l].multiplicity;
    on_path_.assign(n, 0);
    on_path_[g_.source()] = 1;
    flow_.assign(m, 0);
    gin_.assign(n, 0.0);
    gout_.assign(n, 0.0);
    parent_.assign(n, -1);
    path_.clear();
    path_nodes_.clear();
    chosen_.clear();
    value_ = 0.0;
    best_value_ = 0.0;
    best_paths_.clear();
    explored_ = 0;
    extend();
  }

  double best_value() const { return best_value_; }
  const std::vector<std::vector<int>>& best_paths() const { return best_paths_; }
  std::uint64_t explored() const { return explored_; }

 private:
  void extend() {
    ++explored_;
    const std::size_t count = chosen_.size();
    if (value_ > best_value_ + kTieTolerance ||
        (value_ >= best_value_ - kTieTolerance && count < best_paths_.size())) {
      best_value_ = value_;
      best_paths_ = chosen_;
    }
    const std::size_t depth = count;
    if (reach_.size() <= depth) reach_.resize(depth + 1);
    const double extra = bound_extra(reach_[depth]);
    if (extra <= 0.0) return;
    if (value_ + extra < best_value_ - kTieTolerance) return;
    if (value_ + extra <= best_value_ + kTieTolerance && count + 1 >= best_paths_.size()) return;
    dfs(g_.source(), 1.0, 0, chosen_.empty(), depth);
  }

  void dfs(int node, double gain, std::size_t pos, bool greater, std::size_t depth) {
    // By index: chosen_ may reallocate while deeper paths are pushed.
    const std::size_t last = chosen_.size() - 1;
    for (const auto& move : g_.moves(node)) {
      if (res_[move.link] == 0) continue;
      bool next_greater = greater;
      if (!greater) {
        const int bound = chosen_[last][pos];
        if (move.link < bound) continue;
        next_greater = move.link > bound;
      }
      const int to = move.to;
      if (to == g_.sink()) {
        --res_[move.link];
        path_.push_back(move.link);
        chosen_.push_back(path_);
        // Later paths may revisit this path's nodes; only links are exclusive.
        std::vector<int> saved_path, saved_nodes;
        saved_path.swap(path_);
        saved_nodes.swap(path_nodes_);
        for (int v : saved_nodes) on_path_[v] = 0;
        const double saved = value_;
        value_ += gain;
        extend();
        value_ = saved;
        for (int v : saved_nodes) on_path_[v] = 1;
        path_nodes_.swap(saved_nodes);
        path_.swap(saved_path);
        chosen_.pop_back();
        path_.pop_back();
        ++res_[move.link];
        continue;
      }
      if (on_path_[to] || !reach_[depth][to]) continue;
      on_path_[to] = 1;
      path_nodes_.push_back(to);
      --res_[move.link];
      path_.push_back(move.link);
      dfs(to, gain * g_.gain(to), pos + 1, next_greater, depth);
      path_.pop_back();
      ++res_[move.link];
      path_nodes_.pop_back();
      on_path_[to] = 0;
    }
  }

  bool allowed(const LinkGraph::Link& link, int from) const {
    return from == link.a ? link.forward : link.backward;
  }

  // Upper bound on the total gain of paths that can still be added; also
  // fills `reach` with the nodes that can reach the sink in the residual.
  double bound_extra(std::vector<char>& reach) {
    const int n = g_.num_nodes();
    const int s = g_.source();
    const int t = g_.sink();
    const auto& links = g_.links();

    reach.assign(static_cast<std::size_t>(n), 0);
    queue_.clear();
    reach[t] = 1;
    queue_.push_back(t);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
      const int v = queue_[head];
      for (int l : g_.incident(v)) {
        if (res_[l] == 0) continue;
        const auto& link = links[l];
        const int u = link.a == v ? link.b : link.a;
        if (reach[u] || !allowed(link, u) || v == s) continue;
        reach[u] = 1;
        queue_.push_back(u);
      }
    }
    if (!reach[s]) return 0.0;

    const int flow = max_flow();
    if (flow == 0) return 0.0;

    // Best gain of reaching each node from s (including the node's own
    // gain) and of reaching t from each node.
    best_gain(gin_, s, true);
    best_gain(gout_, t, false);

    auto top_sum = [&](int terminal, const std::vector<double>& gains) {
      units_.clear();
      for (int l : g_.incident(terminal)) {
        const auto& link = links[l];
        const int other = link.a == terminal ? link.b : link.a;
        const bool usable = terminal == t ? allowed(link, other) : allowed(link, terminal);
        if (!usable) continue;
        const double value = (other == s || other == t) ? 1.0 : gains[other];
        for (int k = 0; k < res_[l]; ++k) units_.push_back(value);
      }
      const auto take = std::min<std::size_t>(units_.size(), static_cast<std::size_t>(flow));
      std::partial_sort(units_.begin(), units_.begin() + static_cast<std::ptrdiff_t>(take), units_.end(),
                        std::greater<>());
      double sum = 0.0;
      for (std::size_t i = 0; i < take; ++i) sum += units_[i];
      return sum;
    };
    return std::min(top_sum(t, gin_), top_sum(s, gout_));
  }

  // Max product gain from `root` (forward) or to `root` (backward). Gains
  // are in (0, 1], so the greedy label-setting order is exact.
  void best_gain(std::vector<double>& best, int root, bool forward) {
    const int n = g_.num_nodes();
    const int s = g_.source();
    const int t = g_.sink();
    const auto& links = g_.links();
    std::fill(best.begin(), best.end(), 0.0);
    done_.assign(static_cast<std::size_t>(n), 0);
    best[root] = 1.0;
    for (;;) {
      int v = -1;
      for (int u = 0; u < n; ++u)
        if (!done_[u] && best[u] > 0.0 && (v < 0 || best[u] > best[v])) v = u;
      if (v < 0) break;
      done_[v] = 1;
      if (v != root && (v == s || v == t)) continue;
      for (int l : g_.incident(v)) {
        if (res_[l] == 0) continue;
        const auto& link = links[l];
        const int w = link.a == v ? link.b : link.a;
        if (done_[w]) continue;
        if (forward ? !allowed(link, v) : !allowed(link, w)) continue;
        const double q = (w == s || w == t) ? 1.0 : g_.gain(w);
        const double candidate = best[v] * q;
        if (candidate > best[w]) best[w] = candidate;
      }
    }
  }

  // Unit augmenting paths over the residual multiplicities.
  int max_flow() {
    const int n = g_.num_nodes();
    const int s = g_.source();
    const int t = g_.sink();
    const auto& links = g_.links();
    std::fill(flow_.begin(), flow_.end(), 0);
    int total = 0;
    for (;;) {
      std::fill(parent_.begin(), parent_.end(), -1);
      queue_.clear();
      queue_.push_back(s);
      parent_[s] = -2;
      bool found = false;
      for (std::size_t head = 0; head < queue_.size() && !found; ++head) {
        const int v = queue_[head];
        for (int l : g_.incident(v)) {
          const auto& link = links[l];
          const bool from_a = link.a == v;
          const int w = from_a ? link.b : link.a;
          if (parent_[w] != -1) continue;
          const int cap = from_a ? (link.forward ? res_[l] : 0) - flow_[l]
                                 : (link.backward ? res_[l] : 0) + flow_[l];
          if (cap <= 0) continue;
          parent_[w] = l;
          if (w == t) {
            found = true;
            break;
          }
          queue_.push_back(w);
        }
      }
      if (!found) break;
      for (int w = t; w != s;) {
        const auto& link = links[parent_[w]];
        if (link.b == w) {
          ++flow_[parent_[w]];
          w = link.a;
        } else {
          --flow_[parent_[w]];
          w = link.b;
        }
      }
      ++total;
      (void)n;
    }
    return total;
  }

  const LinkGraph& g_;
  std::vector<int> res_;
  std::vector<char> on_path_;
  std::vector<int> path_;
  std::vector<int> path_nodes_;  // interior nodes of path_
  std::vector<std::vector<int>> chosen_;
  double value_ = 0.0;
  double best_value_ = 0.0;
  std::vector<std::vector<int>> best_paths_;
  std::uint64_t explored_ = 0;

  std::vector<std::vector<char>> reach_;
  std::vector<int> flow_;
  std::vector<int> parent_;
  std::vector<int> queue_;
  std::vector<double> gin_;
  std::vector<double> gout_;
  std::vector<char> done_;
  std::vector<double> units_;
};

}  // namespace

void LinkGraph::build_adjacency() {
  const auto n = gain_.size();
  moves_.assign(n, {});
  incident_.assign(n, {});
  for (int l = 0; l < static_cast<int>(links_.size()); ++l) {
    const auto& link = links_[l];
    incident_[link.a].push_back(l);
    incident_[link.b].push_back(l);
    if (link.forward) moves_[link.a].push_back({l, link.b});
    if (link.backward) moves_[link.b].push_back({l, link.a});
  }
}

LinkGraph LinkGraph::from_directed(const DirectedSnapshot& g) {
  const std::size_t n = g.num_nodes();
  const auto s = g.source();
  const auto t = g.sink();

  struct Work {
    std::size_t a, b;  // a < b
    bool forward, backward;
    std::vector<std::vector<std::size_t>> lanes;
    bool alive = true;
  };
  std::vector<Work> work;
  for (const auto& arc : g.arcs()) {
    const auto a = std::min(arc.from, arc.to);
    const auto b = std::max(arc.from, arc.to);
    if (arc.from == b && g.has_arc(a, b)) continue;  // pair already added from (a, b)
    work.push_back({a, b, g.has_arc(a, b), g.has_arc(b, a), {{}}});
  }

  auto allows = [](const Work& w, std::size_t from) { return from == w.a ? w.forward : w.backward; };
  // Interior nodes of a lane traversed starting at `from`.
  auto oriented = [](const Work& w, std::size_t from) {
    auto lane = w.lanes.front();
    if (from != w.a) std::reverse(lane.begin(), lane.end());
    return lane;
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (v == s || v == t || g.gain(v) != 1.0) continue;
      std::vector<std::size_t> inc;
      for (std::size_t w = 0; w < work.size(); ++w)
        if (work[w].alive && (work[w].a == v || work[w].b == v)) inc.push_back(w);
      if (inc.size() != 2) continue;
      const Work& l1 = work[inc[0]];
      const Work& l2 = work[inc[1]];
      if (l1.lanes.size() != 1 || l2.lanes.size() != 1) continue;
      const std::size_t x = l1.a == v ? l1.b : l1.a;
      const std::size_t y = l2.a == v ? l2.b : l2.a;
      if (x == y) continue;
      const bool x_to_y = allows(l1, x) && allows(l2, v);
      const bool y_to_x = allows(l2, y) && allows(l1, v);
      std::vector<std::size_t> lane = oriented(l1, x);
      lane.push_back(v);
      const auto tail = oriented(l2, v);
      lane.insert(lane.end(), tail.begin(), tail.end());
      work[inc[0]].alive = false;
      work[inc[1]].alive = false;
      changed = true;
      if (!x_to_y && !y_to_x) continue;
      Work merged{std::min(x, y), std::max(x, y), x < y ? x_to_y : y_to_x, x < y ? y_to_x : x_to_y, {}};
      if (x > y) std::reverse(lane.begin(), lane.end());
      auto same = std::find_if(work.begin(), work.end(), [&](const Work& w) {
        return w.alive && w.a == merged.a && w.b == merged.b && w.forward == merged.forward &&
               w.backward == merged.backward;
      });
      if (same != work.end()) {
        same->lanes.push_back(std::move(lane));
      } else {
        merged.lanes.push_back(std::move(lane));
        work.push_back(std::move(merged));
      }
    }
  }

  std::vector<Work> alive;
  for (auto& w : work)
    if (w.alive) alive.push_back(std::move(w));
  std::sort(alive.begin(), alive.end(), [](const Work& l, const Work& r) {
    return std::tie(l.a, l.b, l.forward, l.backward) < std::tie(r.a, r.b, r.forward, r.backward);
  });

  LinkGraph out;
  out.gain_ = g.gains();
  out.source_ = static_cast<int>(s);
  out.sink_ = static_cast<int>(t);
  for (auto& w : alive) {
    Link link;
    link.a = static_cast<int>(w.a);
    link.b = static_cast<int>(w.b);
    link.forward = w.forward;
    link.backward = w.backward;
    link.multiplicity = static_cast<int>(w.lanes.size());
    link.lanes = std::move(w.lanes);
    out.links_.push_back(std::move(link));
  }
  out.build_adjacency();
  return out;
}

LinkGraph LinkGraph::from_topology(const Topology& t) {
  LinkGraph out;
  for (const auto& node : t.nodes) out.gain_.push_back(node.role == NodeRole::internal ? node.q : 1.0);
  out.source_ = static_cast<int>(*t.find_node(t.source));
  out.sink_ = static_cast<int>(*t.find_node(t.sink));
  for (const auto& l : t.links) {
    int a = static_cast<int>(*t.find_node(l.u));
    int b = static_cast<int>(*t.find_node(l.v));
    if (a > b) std::swap(a, b);
    Link link;
    link.a = a;
    link.b = b;
    const bool a_end = a == out.source_ || a == out.sink_;
    const bool b_end = b == out.source_ || b == out.sink_;
    if (!a_end && !b_end) {
      link.forward = link.backward = true;
    } else if (a == out.source_ || b == out.sink_) {
      link.forward = true;
    } else {
      link.backward = true;
    }
    out.links_.push_back(std::move(link));
  }
  out.build_adjacency();
  return out;
}

void LinkGraph::set_counts(const std::vector<int>& counts) {
  for (std::size_t l = 0; l < links_.size(); ++l) links_[l].multiplicity = counts[l];
}

SnapshotSolution solve_snapshot(const DirectedSnapshot& g) {
  const auto started = std::chrono::steady_clock::now();
  const LinkGraph kernel = LinkGraph::from_directed(g);
  PathSearch search(kernel);
  search.run();

  std::vector<std::size_t> lane_used(kernel.links().size(), 0);
  std::vector<std::vector<std::string>> node_paths;
  for (const auto& links : search.best_paths()) {
    std::size_t at = g.source();
    std::vector<std::string> nodes{g.id(at)};
    for (int l : links) {
      const auto& link = kernel.links()[l];
      auto lane = link.lanes[lane_used[l]++];
      const bool from_a = static_cast<int>(at) == link.a;
      if (!from_a) std::reverse(lane.begin(), lane.end());
      for (auto v : lane) nodes.push_back(g.id(v));
      at = static_cast<std::size_t>(from_a ? link.b : link.a);
      nodes.push_back(g.id(at));
    }
    node_paths.push_back(std::move(nodes));
  }
  std::stable_sort(node_paths.begin(), node_paths.end(), [&](const auto& l, const auto& r) {
    return g.node_index(l[1]) < g.node_index(r[1]);
  });

  SnapshotSolution solution;
  solution.assignment = assignment_from_paths(g, node_paths);
  for (auto& nodes : node_paths) {
    DeliveredPath p;
    p.delivered = solution.assignment.F(nodes[nodes.size() - 2], nodes.back());
    p.nodes = std::move(nodes);
    solution.objective += p.delivered;
    solution.paths.push_back(std::move(p));
  }
  solution.stats.nodes_explored = search.explored();
  solution.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return solution;
}

int max_disjoint_paths(const DirectedSnapshot& g) {
  // Edmonds-Karp on unit arc capacities.
  const std::size_t n = g.num_nodes();
  std::map<std::pair<std::size_t, std::size_t>, int> residual;
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& arc : g.arcs()) {
    residual[{arc.from, arc.to}] += 1;
    residual.try_emplace({arc.to, arc.from}, 0);
    adj[arc.from].push_back(arc.to);
    adj[arc.to].push_back(arc.from);
  }
  int flow = 0;
  for (;;) {
    std::vector<long> parent(n, -1);
    std::deque<std::size_t> queue{g.source()};
    parent[g.source()] = static_cast<long>(g.source());
    while (!queue.empty() && parent[g.sink()] < 0) {
      const auto v = queue.front();
      queue.pop_front();
      for (auto w : adj[v]) {
        if (parent[w] >= 0 || residual[{v, w}] <= 0) continue;
        parent[w] = static_cast<long>(v);
        queue.push_back(w);
      }
    }
    if (parent[g.sink()] < 0) return flow;
    for (auto w = g.sink(); w != g.source();) {
      const auto v = static_cast<std::size_t>(parent[w]);
      --residual[{v, w}];
      ++residual[{w, v}];
      w = v;
    }
    ++flow;
  }
}

struct SnapshotSolver::Impl {
  explicit Impl(const Topology& t) : graph(LinkGraph::from_topology(t)), search(graph) {}
  LinkGraph graph;
  PathSearch search;
  std::uint64_t explored = 0;
};

SnapshotSolver::SnapshotSolver(const Topology& t) : impl_(std::make_unique<Impl>(t)) {}
SnapshotSolver::~SnapshotSolver() = default;
SnapshotSolver::SnapshotSolver(SnapshotSolver&&) noexcept = default;
SnapshotSolver& SnapshotSolver::operator=(SnapshotSolver&&) noexcept = default;

double SnapshotSolver::capacity(const std::vector<int>& counts) {
  impl_->graph.set_counts(counts);
  impl_->search.run();
  impl_->explored += impl_->search.explored();
  return impl_->search.best_value();
}

std::uint64_t SnapshotSolver::nodes_explored() const { return impl_->explored; }

}  // namespace entcap
