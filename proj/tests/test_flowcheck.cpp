#include <gtest/gtest.h>

#include "entcap/datasets.hpp"
#include "entcap/errors.hpp"
#include "entcap/flowcheck.hpp"
#include "support.hpp"

using namespace entcap;

namespace {

struct Fixture {
  DirectedSnapshot g;
  FlowAssignment a;
};

Fixture fixture(const std::string& table, const std::string& network) {
  const Topology t = load_dataset(network);
  return {directed_snapshot(t, full_state(t)), load_assignment(bundled_document(table))};
}

ConstraintSet only(Constraint c) { return {c}; }

}  // namespace

TEST(Table1, FeasibleWithoutExclusivity) {
  const auto [g, a] = fixture("table1", "fig6");
  const auto r = check_assignment(g, a, parse_constraints("c7,c8,c9"));
  EXPECT_TRUE(r.feasible());
  EXPECT_NEAR(r.objective, 1.01, 1e-12);
}

TEST(Table1, ViolatesExclusivityOnOpposingArcs) {
  const auto [g, a] = fixture("table1", "fig6");
  const auto r = check_assignment(g, a);
  EXPECT_FALSE(r.feasible());
  EXPECT_TRUE(r.violates(Constraint::exclusivity));
  EXPECT_TRUE(r.violates_at(Constraint::exclusivity, "(2,3)"));
  EXPECT_TRUE(r.violates_at(Constraint::exclusivity, "(3,2)"));
  for (const auto& v : r.violations) EXPECT_EQ(v.constraint, Constraint::exclusivity);
}

TEST(Table2, ViolatesOnlyMatchedGain) {
  const auto [g, a] = fixture("table2", "fig7");
  for (auto c : all_constraints()) {
    EXPECT_EQ(check_assignment(g, a, only(c)).feasible(), c != Constraint::matched_gain)
        << constraint_tag(c);
  }
  const auto r = check_assignment(g, a);
  EXPECT_TRUE(r.violates_at(Constraint::matched_gain, "(1,3,t)"));
}

TEST(Table3, ViolatesOnlyConservation) {
  const auto [g, a] = fixture("table3", "fig8");
  for (auto c : all_constraints()) {
    EXPECT_EQ(check_assignment(g, a, only(c)).feasible(), c != Constraint::conservation)
        << constraint_tag(c);
  }
  const auto r = check_assignment(g, a);
  EXPECT_TRUE(r.violates_at(Constraint::conservation, "1"));
  EXPECT_NEAR(r.objective, 2.0, 1e-12);
}

TEST(ZeroAssignment, Feasible) {
  const Topology t = load_dataset("fig6");
  const auto g = directed_snapshot(t, full_state(t));
  const auto r = check_assignment(g, FlowAssignment{});
  EXPECT_TRUE(r.feasible());
  EXPECT_EQ(r.objective, 0.0);
  EXPECT_TRUE(extract_paths(g, FlowAssignment{}).empty());
}

TEST(Bounds, FlowAboveOneRejected) {
  const Topology t = test::build({}, {{"s", "t"}});
  const auto g = directed_snapshot(t, full_state(t));
  FlowAssignment a;
  a.flow[{"s", "t"}] = 1.5;
  EXPECT_TRUE(check_assignment(g, a, only(Constraint::bounds)).violates(Constraint::bounds));
}

TEST(Domain, UnknownArcOrTriple) {
  const Topology t = load_dataset("fig8");
  const auto g = directed_snapshot(t, full_state(t));
  FlowAssignment a;
  a.flow[{"t", "2"}] = 1.0;
  EXPECT_THROW(check_assignment(g, a), ValidationError);
  FlowAssignment b;
  b.match[{"s", "1", "s"}] = 1;
  EXPECT_THROW(check_assignment(g, b), ValidationError);
}

TEST(Constraints, ParseTags) {
  EXPECT_EQ(parse_constraints("all"), all_constraints());
  EXPECT_EQ(parse_constraints("C6, c9"), (ConstraintSet{Constraint::exclusivity, Constraint::conservation}));
  EXPECT_THROW(parse_constraints("c10"), ValidationError);
  EXPECT_EQ(constraint_tag(Constraint::matched_gain), "C7");
}

TEST(Paths, AssignmentFromPathsIsFeasible) {
  const Topology t = load_dataset("fig7");
  const auto g = directed_snapshot(t, full_state(t));
  const auto a = assignment_from_paths(g, {{"s", "1", "3", "t"}, {"s", "2", "3", "4", "t"}});
  const auto r = check_assignment(g, a);
  EXPECT_TRUE(r.feasible());
  EXPECT_NEAR(r.objective, 0.5 + 0.5 * 0.01, 1e-12);
  const auto paths = extract_paths(g, a);
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(paths[0].nodes, (std::vector<std::string>{"s", "1", "3", "t"}));
  EXPECT_NEAR(paths[1].delivered, 0.005, 1e-12);
}

TEST(Paths, ExtractRejectsInfeasible) {
  const auto [g, a] = fixture("table1", "fig6");
  EXPECT_THROW(extract_paths(g, a), ValidationError);
}

TEST(AssignmentFile, RoundTrip) {
  const auto a = load_assignment(bundled_document("table2"));
  EXPECT_EQ(load_assignment(serialize_assignment(a)), a);
  EXPECT_THROW(load_assignment(R"({"flows": [{"from": "s"}]})"), ValidationError);
  EXPECT_THROW(load_assignment(R"({"matchings": [{"i": "s", "j": "1", "k": "2", "value": 2}]})"),
               ValidationError);
}
