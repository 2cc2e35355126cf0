#include <gtest/gtest.h>

#include <cmath>

#include "entcap/datasets.hpp"
#include "entcap/errors.hpp"
#include "entcap/model.hpp"
#include "support.hpp"

using namespace entcap;

namespace {

const char* kMinimal = R"({
  "nodes": [{"id": "s"}, {"id": "a", "q": 0.6}, {"id": "t"}],
  "links": [{"u": "s", "v": "a", "p": 0.5}, {"u": "a", "v": "t", "length_km": 10, "c": 2}],
  "endpoints": {"source": "s", "sink": "t"}
})";

bool has_path(const ValidationError& e, const std::string& path) {
  for (const auto& d : e.diagnostics())
    if (d.path == path) return true;
  return false;
}

std::vector<Diagnostic> diagnostics_of(const std::string& doc) {
  try {
    load_topology(doc);
  } catch (const ValidationError& e) {
    return e.diagnostics();
  }
  return {};
}

}  // namespace

TEST(DeriveLinkProbability, ZeroLengthIsNonFiberFactor) {
  EXPECT_DOUBLE_EQ(derive_link_probability(0.0), 0.9);
}

TEST(DeriveLinkProbability, FiftyKilometres) {
  // 0.9 * 10^(-0.1 * 0.2 * 50) = 0.09
  EXPECT_NEAR(derive_link_probability(50.0), 0.09, 1e-12);
}

TEST(DeriveLinkProbability, NegativeLengthRejected) {
  EXPECT_THROW(derive_link_probability(-1.0), ValidationError);
  EXPECT_THROW(derive_link_probability(std::nan("")), ValidationError);
}

TEST(DeriveLinkProbability, TabulatedRowsMatch) {
  // Spot checks against the published tables; every bundled row is checked
  // by the loader itself.
  EXPECT_NEAR(derive_link_probability(1.138), 0.8540, 5e-5);
  EXPECT_NEAR(derive_link_probability(28.0), 0.2479, 5e-5);
  EXPECT_NEAR(derive_link_probability(78.7), 0.0240, 5e-5);
}

TEST(LoadTopology, MinimalDocument) {
  const Topology t = load_topology(kMinimal);
  ASSERT_EQ(t.nodes.size(), 3u);
  ASSERT_EQ(t.links.size(), 2u);
  EXPECT_EQ(t.node("s").role, NodeRole::source);
  EXPECT_EQ(t.node("t").role, NodeRole::sink);
  EXPECT_EQ(t.node("a").role, NodeRole::internal);
  EXPECT_DOUBLE_EQ(t.node("a").q, 0.6);
  const auto at = *t.find_link("t", "a");
  EXPECT_NEAR(t.links[at].p, derive_link_probability(10.0), 1e-15);
  EXPECT_EQ(t.links[at].c, 2);
}

TEST(LoadTopology, CanonicalOrderIndependentOfInput) {
  const Topology a = load_topology(kMinimal);
  const Topology b = load_topology(R"({
    "endpoints": {"sink": "t", "source": "s"},
    "links": [{"u": "t", "v": "a", "length_km": 10, "c": 2}, {"u": "a", "v": "s", "p": 0.5}],
    "nodes": [{"id": "t"}, {"id": "a", "q": 0.6}, {"id": "s"}]
  })");
  EXPECT_EQ(topology_digest(a), topology_digest(b));
}

TEST(LoadTopology, RoundTrip) {
  for (const auto& d : list_datasets()) {
    const Topology t = load_dataset(d.name);
    const Topology back = load_topology(serialize_topology(t));
    EXPECT_EQ(back, t) << d.name;
    EXPECT_EQ(serialize_topology(back), serialize_topology(t)) << d.name;
  }
}

TEST(LoadTopology, ReportsEveryProblemWithPath) {
  const auto diags = diagnostics_of(R"({
    "nodes": [{"id": "s"}, {"id": "a", "q": 1.5}, {"id": "a"}, {"id": "t", "q": 0.5}],
    "links": [{"u": "s", "v": "a", "p": 1.2}, {"u": "a", "v": "x", "p": 0.5, "c": 0}],
    "endpoints": {"source": "s", "sink": "t"}
  })");
  auto has = [&](const std::string& path) {
    for (const auto& d : diags)
      if (d.path == path) return true;
    return false;
  };
  EXPECT_TRUE(has("nodes[1].q"));
  EXPECT_TRUE(has("nodes[2].id"));
  EXPECT_TRUE(has("nodes[3].q"));
  EXPECT_TRUE(has("links[0].p"));
  EXPECT_TRUE(has("links[1].v"));
  EXPECT_TRUE(has("links[1].c"));
}

TEST(LoadTopology, MissingEndpoint) {
  try {
    load_topology(R"({"nodes": [{"id": "s"}], "links": [], "endpoints": {"source": "s", "sink": "t"}})");
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(has_path(e, "endpoints.sink"));
  }
}

TEST(LoadTopology, UnknownKeysRejected) {
  const auto diags = diagnostics_of(R"({
    "nodes": [{"id": "s", "gain": 1}, {"id": "t"}],
    "links": [{"u": "s", "v": "t", "p": 0.5, "weight": 2}],
    "endpoints": {"source": "s", "sink": "t"}, "extra": 1
  })");
  EXPECT_GE(diags.size(), 3u);
}

TEST(LoadTopology, LinkNeedsLengthOrProbability) {
  EXPECT_THROW(load_topology(R"({"nodes": [{"id": "s"}, {"id": "t"}], "links": [{"u": "s", "v": "t"}],
                                 "endpoints": {"source": "s", "sink": "t"}})"),
               ValidationError);
}

TEST(LoadTopology, TabulatedProbabilityMustAgreeWithLength) {
  const char* ok = R"({"nodes": [{"id": "s"}, {"id": "t"}],
    "links": [{"u": "s", "v": "t", "length_km": 1.138, "p": 0.8540}],
    "endpoints": {"source": "s", "sink": "t"}})";
  const Topology t = load_topology(ok);
  EXPECT_DOUBLE_EQ(t.links[0].p, 0.8540);
  EXPECT_FALSE(t.links[0].derived_p);
  const char* bad = R"({"nodes": [{"id": "s"}, {"id": "t"}],
    "links": [{"u": "s", "v": "t", "length_km": 1.138, "p": 0.80}],
    "endpoints": {"source": "s", "sink": "t"}})";
  EXPECT_THROW(load_topology(bad), ValidationError);
}

TEST(LoadTopology, SelfLoopAndDuplicateLink) {
  const auto diags = diagnostics_of(R"({
    "nodes": [{"id": "s"}, {"id": "a", "q": 0.5}, {"id": "t"}],
    "links": [{"u": "a", "v": "a", "p": 0.5}, {"u": "s", "v": "a", "p": 0.5},
              {"u": "a", "v": "s", "p": 0.5}],
    "endpoints": {"source": "s", "sink": "t"}
  })");
  EXPECT_EQ(diags.size(), 2u);
}

TEST(LoadTopology, MalformedJson) {
  EXPECT_THROW(load_topology("{nodes: ["), ValidationError);
  EXPECT_THROW(load_topology("[]"), ValidationError);
}

TEST(Topology, SwapEndpoints) {
  const Topology t = load_topology(kMinimal);
  const Topology r = t.with_endpoints_swapped();
  EXPECT_EQ(r.source, "t");
  EXPECT_EQ(r.sink, "s");
  EXPECT_EQ(r.node("t").role, NodeRole::source);
  EXPECT_EQ(r.with_endpoints_swapped(), t);
}

TEST(Topology, DigestIsStableHex) {
  const std::string d = topology_digest(load_topology(kMinimal));
  EXPECT_EQ(d.size(), 16u);
  EXPECT_EQ(d.find_first_not_of("0123456789abcdef"), std::string::npos);
  Topology changed = load_topology(kMinimal);
  changed.nodes[0].label = "x";
  EXPECT_NE(topology_digest(changed), d);
}

TEST(Datasets, BundledNetworksLoad) {
  const auto list = list_datasets();
  ASSERT_EQ(list.size(), 5u);
  EXPECT_EQ(list[0].name, "five_node");
  EXPECT_EQ(list[4].name, "surfnet");
  EXPECT_EQ(load_dataset("abilene").links.size(), 14u);
  EXPECT_EQ(load_dataset("nsfnet").links.size(), 21u);
  EXPECT_EQ(load_dataset("surfnet").links.size(), 20u);
  for (const auto& l : load_dataset("abilene_mux2").links) EXPECT_EQ(l.c, 2);
}

TEST(Datasets, UnknownName) {
  EXPECT_THROW(bundled_document("bogus"), ValidationError);
  EXPECT_THROW(resolve_topology("no/such/file.json"), ValidationError);
}

TEST(Builder, ProducesValidTopology) {
  const Topology t = test::build({{"a", 0.5}}, {{"s", "a"}, {"a", "t"}});
  EXPECT_TRUE(validate_topology(t).empty());
}
