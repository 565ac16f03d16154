#include "mcnet/scenario.h"

#include <gtest/gtest.h>

#include <cmath>

namespace mcnet {
namespace {

const char* kStar = R"({
  "nodes": [{"name": "src"}, {"name": "relay"}, {"name": "d1"}, {"name": "d2"}],
  "edges": [
    {"from": "src", "to": "relay", "capacity": 1, "cost": 1},
    {"from": "relay", "to": "d1", "capacity": 1, "cost": 1},
    {"from": "relay", "to": "d2", "capacity": 1, "cost": 1}
  ],
  "commodities": [{"sources": ["src"], "destinations": ["d1", "d2"]}],
  "arrivals": {"rates": {"src": 0.5}}
})";

TEST(Scenario, ParsesStar) {
  const Scenario s = ParseScenario(kStar);
  EXPECT_EQ(s.network.num_nodes(), 4);
  EXPECT_EQ(s.network.num_edges(), 3);
  EXPECT_EQ(s.num_destinations(), 2);
  EXPECT_DOUBLE_EQ(s.arrivals.rate[0], 0.5);
  EXPECT_EQ(s.arrivals.max[0], 5);  // ceil(10 * 0.5)
  EXPECT_EQ(s.service.num_stages(), 1);
  EXPECT_FALSE(s.wireless.has_value());
}

TEST(Scenario, FractionStringsAndServices) {
  const Scenario s = ParseScenario(R"({
    "nodes": [{"name": "a", "processing_capacity": 5, "processing_cost": 1}, {"name": "b"}],
    "edges": [{"from": "a", "to": "b", "capacity": 10, "cost": 0.5}],
    "services": [{"name": "f", "scaling": [1, "1/3"], "workload": ["1/300", "1/400"]}],
    "commodities": [{"service": "f", "sources": ["a"], "destinations": ["b"]}],
    "arrivals": {"rates": {"a": "3/2"}, "max": {"a": 4}}
  })");
  EXPECT_DOUBLE_EQ(s.service.scaling[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.service.workload[0], 1.0 / 300.0);
  EXPECT_DOUBLE_EQ(s.arrivals.rate[0], 1.5);
  EXPECT_EQ(s.arrivals.max[0], 4);
  EXPECT_EQ(s.service.num_stages(), 3);
}

TEST(Scenario, RejectsBadInput) {
  EXPECT_THROW(ParseScenario("{"), InvalidInput);
  EXPECT_THROW(ParseScenario("[]"), InvalidInput);
  // Unknown node in an edge.
  EXPECT_THROW(ParseScenario(R"({"nodes": [{"name": "a"}], "edges": [{"from": "a", "to": "zz"}],
    "commodities": [{"sources": ["a"], "destinations": ["a"]}]})"),
               InvalidInput);
  // Arrivals at a non-source.
  EXPECT_THROW(ParseScenario(R"({"nodes": [{"name": "a"}, {"name": "b"}],
    "edges": [{"from": "a", "to": "b", "capacity": 1}],
    "commodities": [{"sources": ["a"], "destinations": ["b"]}],
    "arrivals": {"rates": {"b": 1}}})"),
               InvalidInput);
  // Wireless edge without a wireless section.
  EXPECT_THROW(ParseScenario(R"({"nodes": [{"name": "a"}, {"name": "b"}],
    "edges": [{"from": "a", "to": "b", "wireless": true}],
    "commodities": [{"sources": ["a"], "destinations": ["b"]}]})"),
               InvalidInput);
  // Fractional capacity.
  EXPECT_THROW(ParseScenario(R"({"nodes": [{"name": "a"}, {"name": "b"}],
    "edges": [{"from": "a", "to": "b", "capacity": 1.5}],
    "commodities": [{"sources": ["a"], "destinations": ["b"]}]})"),
               InvalidInput);
  // Two commodities.
  EXPECT_THROW(ParseScenario(R"({"nodes": [{"name": "a"}, {"name": "b"}],
    "edges": [{"from": "a", "to": "b", "capacity": 1}],
    "commodities": [{"sources": ["a"], "destinations": ["b"]}, {"sources": ["a"], "destinations": ["b"]}]})"),
               InvalidInput);
}

TEST(Scenario, WirelessAutoLinks) {
  const Scenario s = ParseScenario(R"({
    "nodes": [
      {"name": "es", "kind": "es", "position": [0, 0], "power_budget_w": 1},
      {"name": "u1", "kind": "ue", "position": [30, 0], "power_budget_w": 0.2},
      {"name": "u2", "kind": "ue", "position": [0, 40], "power_budget_w": 0.2}
    ],
    "commodities": [{"sources": ["u1"], "destinations": ["u2"]}],
    "wireless": {"auto_links": true, "nominal_capacity": 50, "power_mode": "uniform"},
    "arrivals": {"rates": {"u1": 2}}
  })");
  ASSERT_TRUE(s.wireless.has_value());
  EXPECT_EQ(s.network.num_edges(), 4);
  for (const Edge& e : s.network.edges()) {
    EXPECT_TRUE(e.wireless);
    EXPECT_EQ(e.capacity, 50);
  }
  EXPECT_EQ(s.wireless->power_mode, PowerMode::kUniform);
  // -174 dBm/Hz over 100 MHz.
  EXPECT_NEAR(10 * std::log10(s.wireless->noise_w()) + 30, -94.0, 1e-9);
}

TEST(Scenario, ScalingLoadAndDestinations) {
  const Scenario s = ParseScenario(kStar);
  const Scenario t = s.WithTotalLoad(0.9);
  EXPECT_DOUBLE_EQ(t.arrivals.total(), 0.9);
  EXPECT_EQ(t.arrivals.max[0], 9);
  const Scenario one = s.WithDestinationCount(1);
  EXPECT_EQ(one.num_destinations(), 1);
  EXPECT_THROW(s.WithDestinationCount(3), InvalidInput);
  EXPECT_THROW(s.WithTotalLoad(-1), InvalidInput);
}

TEST(Scenario, SampleFilesLoad) {
  for (const char* f : {"star.json", "six_node.json", "mec_edge.json"}) {
    EXPECT_NO_THROW(LoadScenario(std::string(MCNET_SCENARIO_DIR) + "/" + f)) << f;
  }
  EXPECT_THROW(LoadScenario("/nonexistent/file.json"), InvalidInput);
}

}  // namespace
}  // namespace mcnet
