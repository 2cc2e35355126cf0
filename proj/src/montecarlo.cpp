#include "entcap/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <thread>
#include <tuple>

#include "entcap/capacity.hpp"
#include "entcap/errors.hpp"
#include "entcap/rng.hpp"

namespace entcap {

namespace {

constexpr std::uint64_t kChunk = 4096;

// One live pair seen from one of its endpoints.
struct End {
  std::size_t link;
  int copy;
  std::size_t neighbor;
  double to_source;
  double to_sink;
};

class Trial {
 public:
  explicit Trial(const Topology& t) : t_(t) {
    const std::size_t n = t.nodes.size();
    index_of_source_ = index_of(t.source);
    index_of_sink_ = index_of(t.sink);
    auto ds = hop_distances(t, index_of_source_);
    auto dt = hop_distances(t, index_of_sink_);
    // Unreachable nodes are placed beyond any reachable distance.
    const double far = static_cast<double>(n) + 1.0;
    ds_.resize(n);
    dt_.resize(n);
    for (std::size_t v = 0; v < n; ++v) {
      ds_[v] = ds[v] < 0 ? far : ds[v];
      dt_[v] = dt[v] < 0 ? far : dt[v];
    }
    ends_at_.resize(n);
    for (std::size_t l = 0; l < t.links.size(); ++l) {
      endpoints_.emplace_back(index_of(t.links[l].u), index_of(t.links[l].v));
    }
    partner_.resize(t.links.size());
    swapped_ok_.resize(t.links.size());
  }

  int run(CounterRng& rng) {
    const std::size_t m = t_.links.size();
    std::vector<int> counts(m);
    for (std::size_t l = 0; l < m; ++l) {
      int k = 0;
      for (int j = 0; j < t_.links[l].c; ++j) k += rng.bernoulli(t_.links[l].p) ? 1 : 0;
      counts[l] = k;
    }

    for (auto& e : ends_at_) e.clear();
    for (std::size_t l = 0; l < m; ++l) {
      const auto [a, b] = endpoints_[l];
      const bool split = counts[l] >= 2;
      for (int k = 0; k < counts[l]; ++k) {
        ends_at_[a].push_back(make_end(l, k, a, b, split));
        ends_at_[b].push_back(make_end(l, k, b, a, split));
      }
      // partner_[l][2k + side]: the end this one is swapped with at the node
      // on that side (side 0 = u, side 1 = v), or -1 when unpaired.
      partner_[l].assign(2 * counts[l], -1);
      swapped_ok_[l].assign(2 * counts[l], 0);
    }

    // Greedy local pairing at every internal node.
    for (std::size_t v = 0; v < t_.nodes.size(); ++v) {
      if (v == index_of_source_ || v == index_of_sink_) continue;
      pair_at(v, rng);
    }

    // Trace chains out of the source.
    int delivered = 0;
    for (const End& start : ends_at_[index_of_source_]) {
      std::size_t link = start.link;
      int copy = start.copy;
      std::size_t at = start.neighbor;
      bool ok = true;
      while (true) {
        if (at == index_of_sink_) {
          if (ok) ++delivered;
          break;
        }
        if (at == index_of_source_) break;  // loop back to the source
        const int side = endpoints_[link].first == at ? 0 : 1;
        const int slot = 2 * copy + side;
        const long code = partner_[link][slot];
        if (code < 0) break;
        ok = ok && swapped_ok_[link][slot];
        link = static_cast<std::size_t>(code >> 16);
        copy = static_cast<int>(code & 0xffff);
        const auto [a, b] = endpoints_[link];
        at = a == at ? b : a;
      }
    }
    return delivered;
  }

 private:
  std::size_t index_of(const std::string& id) const {
    for (std::size_t i = 0; i < t_.nodes.size(); ++i) {
      if (t_.nodes[i].id == id) return i;
    }
    throw ValidationError("nodes", "unknown node '" + id + "'");
  }

  End make_end(std::size_t link, int copy, std::size_t self, std::size_t other, bool split) const {
    // A link carrying two or more pairs is routed through splitter nodes
    // placed halfway between its endpoints.
    const double s = split ? (ds_[self] + ds_[other]) / 2.0 : ds_[other];
    const double d = split ? (dt_[self] + dt_[other]) / 2.0 : dt_[other];
    return End{link, copy, other, s, d};
  }

  void pair_at(std::size_t v, CounterRng& rng) {
    auto& ends = ends_at_[v];
    std::sort(ends.begin(), ends.end(), [&](const End& a, const End& b) {
      return std::tie(t_.nodes[a.neighbor].id, a.link, a.copy) <
             std::tie(t_.nodes[b.neighbor].id, b.link, b.copy);
    });
    std::vector<bool> used(ends.size(), false);
    const double q = t_.nodes[v].q;
    while (true) {
      // Cost, then a penalty for using a source-side end towards the sink
      // (or the reverse), then lexicographic position.
      std::tuple<double, int, std::size_t, std::size_t> best{
          std::numeric_limits<double>::infinity(), 0, 0, 0};
      bool found = false;
      for (std::size_t i = 0; i < ends.size(); ++i) {
        if (used[i]) continue;
        for (std::size_t j = 0; j < ends.size(); ++j) {
          if (j == i || used[j]) continue;
          const int penalty = (ends[i].neighbor == index_of_sink_ ? 1 : 0) +
                              (ends[j].neighbor == index_of_source_ ? 1 : 0);
          std::tuple<double, int, std::size_t, std::size_t> cand{
              ends[i].to_source + ends[j].to_sink, penalty, i, j};
          if (!found || cand < best) {
            best = cand;
            found = true;
          }
        }
      }
      if (!found) break;
      const std::size_t i = std::get<2>(best);
      const std::size_t j = std::get<3>(best);
      used[i] = used[j] = true;
      const bool ok = rng.bernoulli(q);
      link_ends(v, ends[i], ends[j], ok);
    }
  }

  void link_ends(std::size_t v, const End& a, const End& b, bool ok) {
    auto slot = [&](const End& e) {
      return 2 * e.copy + (endpoints_[e.link].first == v ? 0 : 1);
    };
    auto code = [](const End& e) { return static_cast<long>(e.link) << 16 | e.copy; };
    partner_[a.link][slot(a)] = code(b);
    partner_[b.link][slot(b)] = code(a);
    swapped_ok_[a.link][slot(a)] = ok;
    swapped_ok_[b.link][slot(b)] = ok;
  }

  const Topology& t_;
  std::size_t index_of_source_ = 0;
  std::size_t index_of_sink_ = 0;
  std::vector<double> ds_, dt_;
  std::vector<std::pair<std::size_t, std::size_t>> endpoints_;
  std::vector<std::vector<End>> ends_at_;
  std::vector<std::vector<long>> partner_;
  std::vector<std::vector<char>> swapped_ok_;
};

}  // namespace

std::vector<int> hop_distances(const Topology& t, std::size_t from) {
  const std::size_t n = t.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  auto idx = [&](const std::string& id) {
    for (std::size_t i = 0; i < n; ++i) {
      if (t.nodes[i].id == id) return i;
    }
    throw ValidationError("links", "unknown node '" + id + "'");
  };
  for (const auto& l : t.links) {
    const auto a = idx(l.u), b = idx(l.v);
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<int> dist(n, -1);
  std::deque<std::size_t> queue{from};
  dist[from] = 0;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto w : adj[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

SimResult simulate_local_knowledge(const Topology& t, const SimConfig& cfg) {
  if (cfg.samples == 0) throw ValidationError("samples", "sample count must be at least 1");
  const std::uint64_t num_chunks = (cfg.samples + kChunk - 1) / kChunk;
  std::vector<std::vector<int>> outcomes(num_chunks);
  const unsigned threads = static_cast<unsigned>(
      std::min<std::uint64_t>(resolve_threads(cfg.threads), num_chunks));

  auto work = [&](unsigned w) {
    Trial trial(t);
    for (std::uint64_t c = w; c < num_chunks; c += threads) {
      const std::uint64_t begin = c * kChunk;
      const std::uint64_t end = std::min(cfg.samples, begin + kChunk);
      auto& out = outcomes[c];
      out.reserve(end - begin);
      for (std::uint64_t i = begin; i < end; ++i) {
        CounterRng rng(cfg.seed, i);
        out.push_back(trial.run(rng));
      }
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  // Integer outcomes: sums are exact, so the aggregate does not depend on
  // the thread count.
  long double sum = 0, sum_sq = 0;
  std::uint64_t trial = 0;
  for (const auto& chunk : outcomes) {
    for (int d : chunk) {
      sum += d;
      sum_sq += static_cast<long double>(d) * d;
      if (cfg.per_trial) cfg.per_trial(trial, d);
      ++trial;
    }
  }
  const long double n = static_cast<long double>(cfg.samples);
  SimResult r;
  r.samples = cfg.samples;
  r.mean = static_cast<double>(sum / n);
  if (cfg.samples > 1) {
    const long double var = std::max<long double>(0, (sum_sq - sum * sum / n) / (n - 1));
    r.standard_error = static_cast<double>(std::sqrt(var / n));
  }
  return r;
}

}  // namespace entcap
