#include "mcnet/stability.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <queue>

#include "mcnet/duplication_tree.h"
#include "mcnet/scenario.h"
#include "test_util.h"

namespace mcnet {
namespace {

using testing::RandomGraph;
using testing::Star;

std::vector<double> Load(const Scenario& s, double total) {
  std::vector<double> v = s.arrivals.rate;
  const double sum = s.arrivals.total();
  for (double& x : v) x *= total / sum;
  return v;
}

TEST(StarRegion, FeasibilityAroundTheBoundaries) {
  const Scenario s = Star();
  const LayeredNetwork l(s.network, s.service);
  EXPECT_TRUE(MulticastFeasible(l, Load(s, 0.9)).feasible);
  EXPECT_FALSE(MulticastFeasible(l, Load(s, 1.1)).feasible);
  EXPECT_TRUE(UnicastFeasible(l, Load(s, 0.4)).feasible);
  EXPECT_FALSE(UnicastFeasible(l, Load(s, 0.6)).feasible);
  EXPECT_TRUE(MulticastFeasible(l, Load(s, 1.0)).exact);
}

TEST(StarRegion, BoundariesAndMinimumCost) {
  const Scenario s = Star();
  const LayeredNetwork l(s.network, s.service);
  const std::vector<double> dir{1, 0, 0, 0};
  EXPECT_DOUBLE_EQ(MulticastBoundary(l, dir), 1.0);
  EXPECT_DOUBLE_EQ(UnicastBoundary(l, dir), 0.5);
  const MinCostResult mc = MinCost(l, Load(s, 0.5));
  EXPECT_DOUBLE_EQ(mc.cost, 1.5);
  EXPECT_EQ(mc.cost_exact, "3/2");
  EXPECT_DOUBLE_EQ(UnicastMinCost(l, Load(s, 0.5)), 2.0);
  EXPECT_DOUBLE_EQ(MinCost(l, Load(s, 0.0)).cost, 0.0);
}

TEST(StarRegion, InfeasibleLoadCarriesCertificate) {
  const Scenario s = Star();
  const LayeredNetwork l(s.network, s.service);
  try {
    MinCost(l, Load(s, 1.1));
    FAIL() << "expected InfeasibleLoad";
  } catch (const InfeasibleLoad& e) {
    ASSERT_EQ(e.certificate.size(), e.labels.size());
    EXPECT_TRUE(std::any_of(e.certificate.begin(), e.certificate.end(), [](double v) { return v != 0; }));
  }
  EXPECT_THROW(MulticastBoundary(l, std::vector<double>(4, 0.0)), InvalidInput);
}

TEST(Witness, ConservesEveryStatus) {
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    const Scenario s = RandomGraph(seed, 5, 2);
    const LayeredNetwork l(s.network, s.service);
    const double b = MulticastBoundary(l, s.arrivals.rate);
    const auto load = Load(s, 0.8 * b);
    const FeasibilityResult fr = MulticastFeasible(l, load);
    ASSERT_TRUE(fr.feasible);
    for (double r : ConservationResidual(l, load, fr.vars, fr.flow)) EXPECT_LE(r, 1e-7);
    const MinCostResult mc = MinCost(l, load);
    for (double r : ConservationResidual(l, load, mc.vars, mc.flow)) EXPECT_NEAR(r, 0.0, 1e-7);
  }
}

TEST(SingleDestination, MulticastEqualsUnicast) {
  for (uint64_t seed = 10; seed < 14; ++seed) {
    const Scenario s = RandomGraph(seed, 6, 1);
    const LayeredNetwork l(s.network, s.service);
    const double m = MulticastBoundary(l, s.arrivals.rate);
    EXPECT_NEAR(m, UnicastBoundary(l, s.arrivals.rate), 1e-12);
    const auto load = Load(s, 0.7 * m);
    EXPECT_NEAR(MinCost(l, load).cost, UnicastMinCost(l, load), 1e-9);
  }
}

// Edmonds-Karp max flow, the oracle for the single-destination boundary
// without processing.
double MaxFlow(const Network& net, int s, int t) {
  const int n = net.num_nodes();
  std::vector<std::vector<double>> cap(n, std::vector<double>(n, 0.0));
  for (const Edge& e : net.edges()) cap[e.from][e.to] += static_cast<double>(e.capacity);
  double total = 0.0;
  while (true) {
    std::vector<int> parent(n, -1);
    parent[s] = s;
    std::queue<int> frontier;
    frontier.push(s);
    while (!frontier.empty() && parent[t] < 0) {
      const int u = frontier.front();
      frontier.pop();
      for (int v = 0; v < n; ++v) {
        if (parent[v] < 0 && cap[u][v] > 1e-12) {
          parent[v] = u;
          frontier.push(v);
        }
      }
    }
    if (parent[t] < 0) return total;
    double push = 1e300;
    for (int v = t; v != s; v = parent[v]) push = std::min(push, cap[parent[v]][v]);
    for (int v = t; v != s; v = parent[v]) {
      cap[parent[v]][v] -= push;
      cap[v][parent[v]] += push;
    }
    total += push;
  }
}

TEST(SingleDestination, BoundaryMatchesMaxFlow) {
  for (uint64_t seed = 20; seed < 26; ++seed) {
    const Scenario s = RandomGraph(seed, 6, 1, false);
    const LayeredNetwork l(s.network, s.service);
    EXPECT_NEAR(MulticastBoundary(l, s.arrivals.rate),
                MaxFlow(s.network, 0, s.network.destinations()[0]), 1e-12);
  }
}

// Unicast <= multicast <= each single-destination boundary, and restricting
// the choices to duplication trees can only shrink the region.
TEST(Region, SandwichOnRandomGraphs) {
  for (uint64_t seed = 30; seed < 34; ++seed) {
    const Scenario s = RandomGraph(seed, 5, 2);
    const LayeredNetwork l(s.network, s.service);
    const double m = MulticastBoundary(l, s.arrivals.rate);
    const double u = UnicastBoundary(l, s.arrivals.rate);
    EXPECT_LE(u, m + 1e-12);
    EXPECT_LE(m, 2 * u + 1e-12);
    for (int k = 0; k < 2; ++k) {
      const LayeredNetwork lk(s.network.WithDestinations({s.network.destinations()[k]}), s.service);
      EXPECT_LE(m, MulticastBoundary(lk, s.arrivals.rate) + 1e-12);
    }
    const auto trees = BuildDuplicationTrees(s.network, 1, ClusterMetric::kHopDistance, seed);
    const auto restricted = TreeChoiceSet(trees);
    EXPECT_LE(MulticastBoundary(l, s.arrivals.rate, restricted), m + 1e-12);
  }
}

// h* along a ray is convex and nondecreasing.
TEST(MinimumCost, ConvexAndMonotoneAlongRay) {
  for (uint64_t seed = 40; seed < 43; ++seed) {
    const Scenario s = RandomGraph(seed, 5, 2);
    const LayeredNetwork l(s.network, s.service);
    const double b = MulticastBoundary(l, s.arrivals.rate);
    std::vector<double> h;
    for (int i = 0; i <= 4; ++i) h.push_back(MinCost(l, Load(s, b * i / 4.0)).cost);
    EXPECT_DOUBLE_EQ(h[0], 0.0);
    for (int i = 1; i <= 4; ++i) EXPECT_GE(h[i], h[i - 1] - 1e-9);
    for (int i = 1; i < 4; ++i) EXPECT_LE(2 * h[i], h[i - 1] + h[i + 1] + 1e-9);
  }
}

TEST(StatusFlows, CounterexampleIsDetected) {
  const StatusFlowVerdict v = CounterexampleCheck();
  EXPECT_TRUE(v.aggregate_holds);
  EXPECT_FALSE(v.per_status_feasible);
}

TEST(StatusFlows, RealizableAndEmptyInstances) {
  const std::pair<DupStatus, double> in[] = {{DupStatus::Parse("111"), 1.0}, {DupStatus::Parse("100"), 1.0}};
  const std::pair<DupStatus, double> split[] = {
      {DupStatus::Parse("110"), 1.0}, {DupStatus::Parse("001"), 1.0}, {DupStatus::Parse("100"), 1.0}};
  StatusFlowVerdict v = CheckNodeStatusFlows(3, in, split);
  EXPECT_TRUE(v.aggregate_holds);
  EXPECT_TRUE(v.per_status_feasible);
  v = CheckNodeStatusFlows(3, in, in);
  EXPECT_TRUE(v.aggregate_holds && v.per_status_feasible);
  v = CheckNodeStatusFlows(3, {}, {});
  EXPECT_TRUE(v.aggregate_holds && v.per_status_feasible);
  const std::pair<DupStatus, double> short_out[] = {{DupStatus::Parse("111"), 1.0}};
  v = CheckNodeStatusFlows(3, in, short_out);
  EXPECT_FALSE(v.aggregate_holds);
  EXPECT_FALSE(v.per_status_feasible);
}

TEST(RandomizedPolicy, BetaIsAProbabilityPerResource) {
  const Scenario s = Star();
  const LayeredNetwork l(s.network, s.service);
  const MinCostResult mc = MinCost(l, Load(s, 0.9));
  const auto beta = BetaFromFlows(l, mc.vars, mc.flow);
  std::vector<double> per_link(s.network.num_edges(), 0.0);
  for (const BetaEntry& b : beta) {
    EXPECT_FALSE(b.processing);
    EXPECT_GT(b.beta, 0.0);
    per_link[b.resource] += b.beta;
  }
  for (double v : per_link) EXPECT_NEAR(v, 0.9, 1e-12);
}

}  // namespace
}  // namespace mcnet
