#include <gtest/gtest.h>

#include <set>

#include "entcap/datasets.hpp"
#include "entcap/errors.hpp"
#include "entcap/oracle.hpp"
#include "support.hpp"

using namespace entcap;
using test::build;

TEST(Oracle, TriangleUsesBothRoutes) {
  const Topology t = build({{"a", 0.5}}, {{"s", "a"}, {"a", "t"}, {"s", "t"}});
  const auto g = directed_snapshot(t, full_state(t));
  EXPECT_EQ(enumerate_simple_paths(g).size(), 2u);
  int sets = 0;
  enumerate_path_sets(g, [&](const PathSet&) { ++sets; });
  EXPECT_EQ(sets, 1);
  EXPECT_DOUBLE_EQ(brute_force_capacity(g), 1.5);
}

TEST(Oracle, AllSetsVisitedOnce) {
  const Topology t = build({{"a", 0.5}, {"b", 0.5}},
                           {{"s", "a"}, {"s", "b"}, {"a", "b"}, {"a", "t"}, {"b", "t"}});
  const auto g = directed_snapshot(t, full_state(t));
  const auto paths = enumerate_simple_paths(g);
  EXPECT_EQ(paths.size(), 4u);
  OracleOptions all;
  all.maximal_only = false;
  std::set<std::vector<std::vector<std::size_t>>> seen;
  int visits = 0;
  enumerate_path_sets(
      g,
      [&](const PathSet& set) {
        ++visits;
        auto key = set.paths;
        std::sort(key.begin(), key.end());
        EXPECT_TRUE(seen.insert(key).second);
      },
      all);
  // {}, four singletons and {s-a-t, s-b-t}; every other pair shares a link.
  EXPECT_EQ(visits, 6);
  int maximal = 0;
  enumerate_path_sets(g, [&](const PathSet&) { ++maximal; });
  EXPECT_EQ(maximal, 3);
}

TEST(Oracle, SizeGuard) {
  const Topology t = load_dataset("nsfnet");
  const auto g = directed_snapshot(t, full_state(t));
  EXPECT_GT(oracle_size(g), 20u);
  EXPECT_THROW(brute_force_capacity(g), GuardError);
}

TEST(Oracle, SplitterRelaysDoNotCountTowardsSize) {
  const Topology t = load_dataset("five_node");
  const auto g = directed_snapshot(t, parse_state(t, "s-1=2,s-2=1,s-3=2,s-t,1-2=1,1-t=3,3-t=2"));
  EXPECT_EQ(oracle_size(g), 12u);
}

TEST(Oracle, EmptySnapshot) {
  const Topology t = load_dataset("fig6");
  EXPECT_EQ(brute_force_capacity(directed_snapshot(t, empty_state(t))), 0.0);
}
