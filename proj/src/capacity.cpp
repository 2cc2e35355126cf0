#include "entcap/capacity.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <queue>
#include <thread>
#include <unordered_map>

#include "entcap/errors.hpp"
#include "entcap/rng.hpp"
#include "entcap/snapshot.hpp"
#include "entcap/solver.hpp"

namespace entcap {

namespace {

// Work is split into fixed-size chunks so the reduction order, and hence the
// floating-point result, does not depend on the thread count.
constexpr std::uint64_t kChunk = 4096;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Record {
  std::uint64_t index;
  std::vector<int> counts;
  double probability;
  double capacity;
};

// Runs fn(chunk, worker, solver, records) for every chunk in [0, num_chunks) on a
// pool of workers, each owning its own solver. Records are flushed to the
// sink in chunk order, one wave at a time.
template <typename Fn>
void run_chunks(const Topology& t, std::uint64_t num_chunks, unsigned threads,
                const StateRecordSink& sink, Fn&& fn) {
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(num_chunks, 1)));
  const std::uint64_t wave = sink ? std::uint64_t{threads} * 4 : num_chunks;
  std::vector<SnapshotSolver> solvers;
  solvers.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) solvers.emplace_back(t);

  for (std::uint64_t first = 0; first < num_chunks; first += wave) {
    const std::uint64_t last = std::min(num_chunks, first + wave);
    std::vector<std::vector<Record>> records(sink ? last - first : 0);
    std::atomic<std::uint64_t> next{first};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&](unsigned w) {
      try {
        for (std::uint64_t c = next++; c < last; c = next++) {
          fn(c, w, solvers[w], sink ? &records[c - first] : nullptr);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = last;
      }
    };
    if (threads == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    for (const auto& chunk : records) {
      for (const auto& r : chunk) sink(r.index, r.counts, r.probability, r.capacity);
    }
  }
}

struct Welford {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const Welford& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.n) / total;
    m2 += o.m2 + d * d * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }
};

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x)) {
    compensation += (sum - t) + x;
  } else {
    compensation += (x - t) + sum;
  }
  sum = t;
}

std::string_view mode_name(CapacityMode mode) {
  switch (mode) {
    case CapacityMode::exact: return "exact";
    case CapacityMode::truncated: return "truncated";
    case CapacityMode::sampled: return "sampled";
  }
  return "exact";
}

CapacityMode parse_mode(std::string_view name) {
  if (name == "exact") return CapacityMode::exact;
  if (name == "truncated") return CapacityMode::truncated;
  if (name == "sampled") return CapacityMode::sampled;
  throw ValidationError("mode", "unknown mode '" + std::string(name) + "'");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

double full_state_capacity(const Topology& t) {
  return solve_snapshot(directed_snapshot(t, full_state(t))).objective;
}

CapacityReport exact_capacity(const Topology& t, const CapacityOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  StateSpace space(t);
  if (space.size_overflowed() || space.size() > options.state_budget) {
    throw GuardError("state space has " +
                     (space.size_overflowed() ? std::string("more than 2^64")
                                              : std::to_string(space.size())) +
                     " states, above the exact-mode budget of " +
                     std::to_string(options.state_budget) + "; use truncated or sampled mode");
  }
  const std::uint64_t n = space.size();
  const std::uint64_t num_chunks = (n + kChunk - 1) / kChunk;
  std::vector<CompensatedSum> value(num_chunks), mass(num_chunks);

  run_chunks(t, num_chunks, resolve_threads(options.threads), options.per_state,
             [&](std::uint64_t c, unsigned /*worker*/, SnapshotSolver& solver, std::vector<Record>* out) {
               const std::uint64_t begin = c * kChunk;
               const std::uint64_t end = std::min(n, begin + kChunk);
               for (auto cur = space.cursor(begin, end); !cur.done(); cur.advance()) {
                 const double p = cur.probability();
                 const double cap = solver.capacity(cur.counts());
                 value[c].add(p * cap);
                 mass[c].add(p);
                 if (out) out->push_back({cur.index(), cur.counts(), p, cap});
               }
             });

  CompensatedSum total, covered;
  for (std::uint64_t c = 0; c < num_chunks; ++c) {
    total.add(value[c]);
    covered.add(mass[c]);
  }
  CapacityReport report;
  report.mode = CapacityMode::exact;
  report.value = total.value();
  report.lower = report.value;
  report.upper = report.value;
  report.covered_probability = covered.value();
  report.full_state_capacity = full_state_capacity(t);
  report.states_evaluated = n;
  report.state_space_size = n;
  report.wall_seconds = seconds_since(start);
  return report;
}

CapacityReport truncated_capacity(const Topology& t, std::uint64_t k,
                                  const CapacityOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (k == 0) throw ValidationError("k", "k must be positive");
  StateSpace space(t);
  const std::size_t m = space.num_links();

  // order[l][r] is the count with the r-th largest pmf on link l.
  std::vector<std::vector<int>> order(m);
  for (std::size_t l = 0; l < m; ++l) {
    order[l].resize(space.capacity(l) + 1);
    std::iota(order[l].begin(), order[l].end(), 0);
    std::stable_sort(order[l].begin(), order[l].end(),
                     [&](int a, int b) { return space.pmf(l, a) > space.pmf(l, b); });
  }

  // Best-first enumeration over rank vectors. The parent of a vector is
  // obtained by decrementing its last nonzero rank, which makes the search
  // tree unique and keeps probabilities non-increasing along every branch.
  struct Entry {
    double probability;
    std::uint64_t index;
    std::vector<int> ranks;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.probability != b.probability) return a.probability < b.probability;
    return a.index > b.index;
  };
  auto make = [&](std::vector<int> ranks) {
    std::vector<int> counts(m);
    for (std::size_t l = 0; l < m; ++l) counts[l] = order[l][ranks[l]];
    SnapshotState s{counts};
    return Entry{space.probability(counts), space.encode(s), std::move(ranks)};
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> frontier(worse);
  frontier.push(make(std::vector<int>(m, 0)));

  std::vector<std::vector<int>> states;
  std::vector<std::uint64_t> indices;
  std::vector<double> probs;
  while (!frontier.empty() && states.size() < k) {
    Entry e = frontier.top();
    frontier.pop();
    std::size_t last = 0;
    for (std::size_t l = 0; l < m; ++l) {
      if (e.ranks[l] > 0) last = l;
    }
    for (std::size_t l = last; l < m; ++l) {
      if (e.ranks[l] + 1 < static_cast<int>(order[l].size())) {
        auto next = e.ranks;
        ++next[l];
        frontier.push(make(std::move(next)));
      }
    }
    std::vector<int> counts(m);
    for (std::size_t l = 0; l < m; ++l) counts[l] = order[l][e.ranks[l]];
    states.push_back(std::move(counts));
    indices.push_back(e.index);
    probs.push_back(e.probability);
  }

  const std::uint64_t n = states.size();
  const std::uint64_t num_chunks = (n + kChunk - 1) / kChunk;
  std::vector<CompensatedSum> value(num_chunks), mass(num_chunks);
  run_chunks(t, num_chunks, resolve_threads(options.threads), options.per_state,
             [&](std::uint64_t c, unsigned /*worker*/, SnapshotSolver& solver, std::vector<Record>* out) {
               const std::uint64_t begin = c * kChunk;
               const std::uint64_t end = std::min(n, begin + kChunk);
               for (std::uint64_t i = begin; i < end; ++i) {
                 const double cap = solver.capacity(states[i]);
                 value[c].add(probs[i] * cap);
                 mass[c].add(probs[i]);
                 if (out) out->push_back({indices[i], states[i], probs[i], cap});
               }
             });

  CompensatedSum total, covered;
  for (std::uint64_t c = 0; c < num_chunks; ++c) {
    total.add(value[c]);
    covered.add(mass[c]);
  }
  CapacityReport report;
  report.mode = CapacityMode::truncated;
  report.full_state_capacity = full_state_capacity(t);
  report.value = total.value();
  report.lower = report.value;
  const double rest = std::max(0.0, 1.0 - covered.value());
  report.upper = report.value + rest * report.full_state_capacity;
  report.covered_probability = covered.value();
  report.states_evaluated = n;
  report.state_space_size = space.size();
  report.wall_seconds = seconds_since(start);
  return report;
}

CapacityReport sampled_capacity(const Topology& t, std::uint64_t samples, std::uint64_t seed,
                                const CapacityOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  if (samples == 0) throw ValidationError("samples", "sample count must be positive");
  StateSpace space(t);
  const std::size_t m = space.num_links();
  std::vector<double> link_p(m);
  std::vector<int> link_c(m);
  for (std::size_t l = 0; l < m; ++l) {
    link_p[l] = t.links[l].p;
    link_c[l] = t.links[l].c;
  }
  const bool memo = !space.size_overflowed() && space.size() <= (1ULL << 24);

  const std::uint64_t num_chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Welford> stats(num_chunks);
  const unsigned threads = resolve_threads(options.threads);
  std::vector<std::unordered_map<std::uint64_t, double>> caches(threads);

  run_chunks(t, num_chunks, threads, options.per_state,
             [&](std::uint64_t c, unsigned w, SnapshotSolver& solver, std::vector<Record>* out) {
               auto* cache = memo ? &caches[w] : nullptr;
               std::vector<int> counts(m);
               const std::uint64_t begin = c * kChunk;
               const std::uint64_t end = std::min(samples, begin + kChunk);
               for (std::uint64_t i = begin; i < end; ++i) {
                 CounterRng rng(seed, i);
                 for (std::size_t l = 0; l < m; ++l) {
                   int k = 0;
                   for (int j = 0; j < link_c[l]; ++j) k += rng.bernoulli(link_p[l]) ? 1 : 0;
                   counts[l] = k;
                 }
                 double cap;
                 if (cache) {
                   const std::uint64_t key = space.encode(SnapshotState{counts});
                   auto it = cache->find(key);
                   if (it == cache->end()) it = cache->emplace(key, solver.capacity(counts)).first;
                   cap = it->second;
                 } else {
                   cap = solver.capacity(counts);
                 }
                 stats[c].add(cap);
                 if (out) out->push_back({i, counts, space.probability(counts), cap});
               }
             });

  Welford total;
  for (const auto& s : stats) total.merge(s);
  CapacityReport report;
  report.mode = CapacityMode::sampled;
  report.value = total.mean;
  report.standard_error =
      total.n > 1 ? std::sqrt(total.m2 / static_cast<double>(total.n - 1) / static_cast<double>(total.n))
                  : 0.0;
  report.seed = seed;
  report.full_state_capacity = full_state_capacity(t);
  report.states_evaluated = samples;
  report.state_space_size = space.size();
  report.wall_seconds = seconds_since(start);
  return report;
}

}  // namespace entcap
