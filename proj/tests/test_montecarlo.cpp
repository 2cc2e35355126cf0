#include <gtest/gtest.h>

#include <cmath>

#include "entcap/capacity.hpp"
#include "entcap/datasets.hpp"
#include "entcap/errors.hpp"
#include "entcap/montecarlo.hpp"
#include "support.hpp"

using namespace entcap;
using test::build;

namespace {

SimResult run(const Topology& t, std::uint64_t samples, std::uint64_t seed = 1, unsigned threads = 1) {
  SimConfig cfg;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.threads = threads;
  return simulate_local_knowledge(t, cfg);
}

}  // namespace

TEST(LocalKnowledge, ForcedSwap) {
  const auto r = run(build({{"a", 0.6}}, {{"s", "a"}, {"a", "t"}}), 100000);
  EXPECT_LE(std::abs(r.mean - 0.6), 3 * r.standard_error);
}

TEST(LocalKnowledge, DirectLinkOnly) {
  const auto r = run(build({}, {{"s", "t", 0.5}}), 100000);
  EXPECT_LE(std::abs(r.mean - 0.5), 3 * r.standard_error);
}

TEST(LocalKnowledge, DeterministicNetworkHasNoVariance) {
  const Topology t = build({{"a", 1}, {"b", 1}, {"c", 1}},
                           {{"s", "a"}, {"s", "b"}, {"a", "c"}, {"b", "c"}, {"c", "t", 1, 2}, {"a", "t"}});
  const auto r = run(t, 500);
  EXPECT_EQ(r.standard_error, 0.0);
  EXPECT_EQ(r.mean, std::round(r.mean));
  EXPECT_GE(r.mean, 1.0);
}

TEST(LocalKnowledge, NeverBeatsOptimum) {
  for (const char* name : {"five_node", "fig2", "fig6", "fig7"}) {
    const Topology t = load_dataset(name);
    const auto r = run(t, 50000, 3);
    EXPECT_LE(r.mean, exact_capacity(t).value + 4 * r.standard_error) << name;
  }
}

TEST(LocalKnowledge, GreedyPicksShortRoutes) {
  // From a, the sink is one hop away directly and three hops via b.
  const Topology t = build({{"a", 1}, {"b", 1}, {"c", 1}},
                           {{"s", "a"}, {"a", "t"}, {"a", "b"}, {"b", "c"}, {"c", "t"}});
  EXPECT_EQ(run(t, 10).mean, 1.0);
}

TEST(LocalKnowledge, ReproducibleAcrossThreads) {
  const Topology t = load_dataset("five_node");
  const auto a = run(t, 30000, 7, 1);
  const auto b = run(t, 30000, 7, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standard_error, b.standard_error);
}

TEST(LocalKnowledge, PerTrialHook) {
  SimConfig cfg;
  cfg.samples = 10000;
  std::uint64_t next = 0;
  long total = 0;
  cfg.per_trial = [&](std::uint64_t i, int d) {
    EXPECT_EQ(i, next++);
    total += d;
  };
  const auto r = simulate_local_knowledge(load_dataset("five_node"), cfg);
  EXPECT_EQ(next, 10000u);
  EXPECT_NEAR(r.mean, total / 10000.0, 1e-12);
}

TEST(LocalKnowledge, RejectsZeroSamples) {
  EXPECT_THROW(run(load_dataset("five_node"), 0), ValidationError);
}

TEST(HopDistances, FromSource) {
  const Topology t = load_dataset("fig2");
  const auto d = hop_distances(t, *t.find_node("s"));
  EXPECT_EQ(d[*t.find_node("t")], 3);
  EXPECT_EQ(d[*t.find_node("3")], 1);
}
