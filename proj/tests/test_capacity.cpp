#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "entcap/capacity.hpp"
#include "entcap/datasets.hpp"
#include "entcap/errors.hpp"
#include "entcap/solver.hpp"
#include "support.hpp"

using namespace entcap;
using test::build;

namespace {

CapacityOptions threads(unsigned n) {
  CapacityOptions o;
  o.threads = n;
  return o;
}

}  // namespace

TEST(Exact, SingleLink) {
  const auto r = exact_capacity(build({}, {{"s", "t", 0.3}}));
  EXPECT_NEAR(r.value, 0.3, 1e-15);
  EXPECT_EQ(*r.lower, r.value);
  EXPECT_EQ(*r.upper, r.value);
  EXPECT_NEAR(*r.covered_probability, 1.0, 1e-12);
  EXPECT_EQ(r.states_evaluated, 2u);
}

TEST(Exact, MultiplexedSingleLinkIsMeanCount) {
  const auto r = exact_capacity(build({}, {{"s", "t", 0.3, 4}}));
  EXPECT_NEAR(r.value, 1.2, 1e-12);
  EXPECT_NEAR(r.full_state_capacity, 4.0, 1e-12);
}

TEST(Exact, FiveNode) {
  const auto r = exact_capacity(load_dataset("five_node"));
  EXPECT_NEAR(r.value, 1.2121, 5e-4);
  EXPECT_NEAR(r.full_state_capacity, 3.415, 1e-9);
  EXPECT_NEAR(*r.covered_probability, 1.0, 1e-9);
}

TEST(Exact, BitStableAcrossThreadCounts) {
  const Topology t = load_dataset("abilene");
  const auto one = exact_capacity(t, threads(1));
  const auto three = exact_capacity(t, threads(3));
  EXPECT_EQ(one.value, three.value);
  EXPECT_EQ(*one.covered_probability, *three.covered_probability);
}

TEST(Exact, BudgetGuard) {
  CapacityOptions o;
  o.state_budget = 1000;
  try {
    exact_capacity(load_dataset("five_node"), o);
    FAIL() << "expected GuardError";
  } catch (const GuardError& e) {
    EXPECT_NE(std::string(e.what()).find("truncated or sampled"), std::string::npos);
  }
}

TEST(Exact, PerStateRecordsInOrder) {
  const Topology t = load_dataset("five_node");
  CapacityOptions o = threads(2);
  std::uint64_t expected = 0;
  double total = 0;
  o.per_state = [&](std::uint64_t i, const std::vector<int>&, double p, double c) {
    EXPECT_EQ(i, expected++);
    total += p * c;
  };
  const auto r = exact_capacity(t, o);
  EXPECT_EQ(expected, 5760u);
  EXPECT_NEAR(total, r.value, 1e-12);
}

TEST(Exact, UnitGainsEqualExpectedMaxFlow) {
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto inst = test::random_instance(21, i, true);
    double expected = 0;
    enumerate_states(inst.topology, [&](std::uint64_t, const SnapshotState& s, double p) {
      expected += p * max_disjoint_paths(directed_snapshot(inst.topology, s));
    });
    EXPECT_NEAR(exact_capacity(inst.topology).value, expected, 1e-9) << i;
  }
}

TEST(Exact, ReversalInvariant) {
  for (const char* name : {"five_node", "abilene"}) {
    const Topology t = load_dataset(name);
    EXPECT_NEAR(exact_capacity(t).value, exact_capacity(t.with_endpoints_swapped()).value, 1e-9)
        << name;
  }
}

TEST(FullState, Values) {
  EXPECT_NEAR(full_state_capacity(load_dataset("five_node")), 3.415, 1e-9);
  EXPECT_EQ(full_state_capacity(build({{"a", 0.5}, {"b", 0.5}}, {{"s", "a"}, {"b", "t"}})), 0.0);
}

TEST(Truncated, SingleLinkMostLikelyState) {
  const auto r = truncated_capacity(build({}, {{"s", "t", 0.3}}), 1);
  EXPECT_EQ(*r.lower, 0.0);
  EXPECT_NEAR(*r.upper, 0.3, 1e-12);
  EXPECT_NEAR(*r.covered_probability, 0.7, 1e-12);
  EXPECT_THROW(truncated_capacity(build({}, {{"s", "t", 0.3}}), 0), ValidationError);
}

TEST(Truncated, BracketsExact) {
  const Topology t = load_dataset("five_node");
  const double exact = exact_capacity(t).value;
  for (std::uint64_t k : {1, 2, 8, 32, 128, 1000, 5760, 9000}) {
    const auto r = truncated_capacity(t, k);
    EXPECT_LE(*r.lower, exact + 1e-12) << k;
    EXPECT_GE(*r.upper, exact - 1e-12) << k;
    EXPECT_NEAR(*r.upper - *r.lower, (1 - *r.covered_probability) * r.full_state_capacity, 1e-9);
  }
  const auto all = truncated_capacity(t, 5760);
  EXPECT_NEAR(*all.lower, exact, 1e-12);
  EXPECT_NEAR(*all.upper, exact, 1e-9);
  EXPECT_EQ(all.states_evaluated, 5760u);
}

TEST(Truncated, StatesInDecreasingProbability) {
  const Topology t = load_dataset("five_node");
  CapacityOptions o;
  double last = 2.0;
  std::uint64_t seen = 0;
  o.per_state = [&](std::uint64_t, const std::vector<int>&, double p, double) {
    EXPECT_LE(p, last);
    last = p;
    ++seen;
  };
  truncated_capacity(t, 500, o);
  EXPECT_EQ(seen, 500u);
}

TEST(Truncated, MatchesSortedEnumeration) {
  const Topology t = load_dataset("abilene");
  std::vector<double> probs;
  enumerate_states(t, [&](std::uint64_t, const SnapshotState&, double p) { probs.push_back(p); });
  std::sort(probs.rbegin(), probs.rend());
  double top = 0;
  for (int i = 0; i < 64; ++i) top += probs[i];
  EXPECT_NEAR(*truncated_capacity(t, 64).covered_probability, top, 1e-12);
}

TEST(Sampled, DeterministicTopology) {
  const Topology t = build({{"a", 0.6}}, {{"s", "a"}, {"a", "t"}, {"s", "t"}});
  const auto r = sampled_capacity(t, 1000, 5);
  EXPECT_EQ(r.value, r.full_state_capacity);
  EXPECT_EQ(*r.standard_error, 0.0);
  EXPECT_EQ(*r.seed, 5u);
}

TEST(Sampled, ReproducibleAndThreadIndependent) {
  const Topology t = load_dataset("five_node");
  const auto a = sampled_capacity(t, 20000, 42, threads(1));
  const auto b = sampled_capacity(t, 20000, 42, threads(4));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(*a.standard_error, *b.standard_error);
  const auto c = sampled_capacity(t, 20000, 43, threads(1));
  EXPECT_NE(a.value, c.value);
}

TEST(Sampled, ConvergesToExact) {
  const Topology t = load_dataset("five_node");
  const double exact = exact_capacity(t).value;
  const auto r = sampled_capacity(t, 100000, 9);
  EXPECT_LE(std::abs(r.value - exact), 4 * *r.standard_error);
  EXPECT_THROW(sampled_capacity(t, 0, 1), ValidationError);
}

TEST(CompensatedSum, RecoversSmallTerms) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-17);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-14, 1e-20);
}

TEST(Mode, Names) {
  EXPECT_EQ(parse_mode("truncated"), CapacityMode::truncated);
  EXPECT_EQ(mode_name(CapacityMode::sampled), "sampled");
  EXPECT_THROW(parse_mode("fast"), ValidationError);
}
