#include "mcnet/network.h"

#include <gtest/gtest.h>

#include <cmath>
#include <queue>
#include <random>

namespace mcnet {
namespace {

Network RandomNetwork(std::mt19937& gen, int n, int extra_edges) {
  NetworkBuilder b;
  for (int i = 0; i < n; ++i) b.AddNode("v" + std::to_string(i));
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::uniform_real_distribution<double> cost(0.1, 5.0);
  for (int i = 0; i + 1 < n; ++i) b.AddEdge(i, i + 1, 2, cost(gen));
  for (int k = 0; k < extra_edges; ++k) {
    const int u = pick(gen), v = pick(gen);
    if (u == v) continue;
    try {
      b.AddEdge(u, v, 1, cost(gen));
    } catch (const InvalidInput&) {
    }
  }
  b.SetSources({0});
  b.SetDestinations({n - 1});
  try {
    return b.Build();
  } catch (const InvalidInput&) {
  }
  NetworkBuilder plain;
  for (int i = 0; i < n; ++i) plain.AddNode("v" + std::to_string(i));
  for (int i = 0; i + 1 < n; ++i) plain.AddEdge(i, i + 1, 2, 1.0);
  plain.SetSources({0});
  plain.SetDestinations({n - 1});
  return plain.Build();
}

TEST(Network, BuilderValidation) {
  NetworkBuilder b;
  b.AddNode("a");
  b.AddNode("b");
  b.AddEdge(0, 1, 1, 1.0);
  b.SetSources({0});
  b.SetDestinations({0});
  EXPECT_THROW(b.Build(), InvalidInput);  // source is also a destination
  NetworkBuilder dup;
  dup.AddNode("a");
  dup.AddNode("b");
  dup.AddEdge(0, 1, 1, 1.0);
  dup.AddEdge(0, 1, 1, 1.0);
  dup.SetSources({0});
  dup.SetDestinations({1});
  EXPECT_THROW(dup.Build(), InvalidInput);
  NetworkBuilder neg;
  neg.AddNode("a");
  neg.AddNode("b");
  neg.AddEdge(0, 1, -1, 1.0);
  neg.SetSources({0});
  neg.SetDestinations({1});
  EXPECT_THROW(neg.Build(), InvalidInput);
}

TEST(Layered, IndexingAndEdges) {
  NetworkBuilder b;
  b.AddNode("s");
  b.AddNode("t");
  b.AddEdge(0, 1, 3, 1.0);
  b.mutable_node(0).processing_capacity = 2.0;
  b.mutable_node(0).processing_cost = 1.0;
  b.SetSources({0});
  b.SetDestinations({1});
  const Network net = b.Build();
  Service svc{"f", {2.0, 0.5}, {0.5, 1.0}};
  const LayeredNetwork l(net, svc);
  EXPECT_EQ(l.num_stages(), 3);
  EXPECT_EQ(l.num_nodes(), 6);
  EXPECT_EQ(l.num_transmission_edges(), 3);
  EXPECT_EQ(l.num_processing_edges(), 4);  // zero-capacity nodes keep their edges
  EXPECT_EQ(l.NodeIndex(1, 2), 5);
  EXPECT_EQ(l.BaseNode(5), 1);
  EXPECT_EQ(l.StageOf(5), 2);
  EXPECT_EQ(l.DestinationNode(0), 5);
  EXPECT_EQ(l.DestinationIndex(5), 0);
  EXPECT_EQ(l.DestinationIndex(1), -1);  // not on the last layer
  EXPECT_DOUBLE_EQ(l.CumulativeScaling(0), 1.0);
  EXPECT_DOUBLE_EQ(l.CumulativeScaling(1), 2.0);
  EXPECT_DOUBLE_EQ(l.CumulativeScaling(2), 1.0);
  for (int le : l.ProcessingEdgesOf(0)) {
    const LayeredEdge& e = l.edge(le);
    EXPECT_EQ(e.kind, LayeredEdgeKind::kProcessing);
    EXPECT_EQ(l.StageOf(e.to), e.stage + 1);
    EXPECT_DOUBLE_EQ(e.zeta, svc.scaling[e.stage]);
    EXPECT_DOUBLE_EQ(e.rho, svc.workload[e.stage]);
  }
  for (int le : l.TransmissionEdgesOf(0)) {
    EXPECT_EQ(l.StageOf(l.edge(le).from), l.StageOf(l.edge(le).to));
  }
}

TEST(Service, Validation) {
  EXPECT_THROW((Service{"x", {1.0}, {}}).Validate(), InvalidInput);
  EXPECT_THROW((Service{"x", {0.0}, {1.0}}).Validate(), InvalidInput);
  EXPECT_NO_THROW((Service{"x", {}, {}}).Validate());
}

TEST(HopDistances, MatchesBfsOracle) {
  std::mt19937 gen(3);
  for (int trial = 0; trial < 30; ++trial) {
    const Network net = RandomNetwork(gen, 7, 10);
    const int dest = net.destinations()[0];
    const HopTable h = HopDistances(net, net.destinations());
    // Oracle: BFS on the reversed graph from the destination.
    std::vector<int64_t> dist(net.num_nodes(), kUnreachableHops);
    std::queue<int> frontier;
    dist[dest] = 0;
    frontier.push(dest);
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (const Edge& e : net.edges()) {
        if (e.to == v && dist[e.from] == kUnreachableHops) {
          dist[e.from] = dist[v] + 1;
          frontier.push(e.from);
        }
      }
    }
    for (int i = 0; i < net.num_nodes(); ++i) EXPECT_EQ(h[i][0], dist[i]);
  }
}

TEST(ShortestPaths, MatchesFloydWarshallOracle) {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    const Network net = RandomNetwork(gen, 6, 12);
    const int n = net.num_nodes();
    std::vector<double> w;
    for (const Edge& e : net.edges()) w.push_back(e.cost);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, inf));
    for (int i = 0; i < n; ++i) d[i][i] = 0;
    for (const Edge& e : net.edges()) d[e.from][e.to] = std::min(d[e.from][e.to], e.cost);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    for (int s = 0; s < n; ++s) {
      const auto got = ShortestPathLengths(net, s, w);
      for (int t = 0; t < n; ++t) {
        if (std::isinf(d[s][t])) {
          EXPECT_TRUE(std::isinf(got[t]));
        } else {
          EXPECT_NEAR(got[t], d[s][t], 1e-12);
        }
      }
    }
  }
}

TEST(HopDistances, LayeredCountsProcessingAsAHop) {
  NetworkBuilder b;
  b.AddNode("s");
  b.AddNode("t");
  b.AddEdge(0, 1, 1, 1.0);
  b.mutable_node(0).processing_capacity = 1.0;
  b.SetSources({0});
  b.SetDestinations({1});
  const LayeredNetwork l(b.Build(), Service{"f", {1.0}, {1.0}});
  const HopTable h = HopDistances(l);
  EXPECT_EQ(h[l.NodeIndex(0, 0)][0], 2);
  EXPECT_EQ(h[l.NodeIndex(0, 1)][0], 1);
  EXPECT_EQ(h[l.NodeIndex(1, 0)][0], kUnreachableHops);  // t cannot process
}

TEST(Layered, CountingIdentitiesOnRandomGraphs) {
  std::mt19937 gen(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 6;
    NetworkBuilder b;
    for (int i = 0; i < n; ++i) b.AddNode("v" + std::to_string(i));
    int edges = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && gen() % 3 == 0) {
          b.AddEdge(i, j, 1, 1.0);
          ++edges;
        }
      }
    }
    b.SetSources({0});
    b.SetDestinations({n - 1});
    const int functions = static_cast<int>(gen() % 4);
    Service svc{"f", std::vector<double>(functions, 1.0), std::vector<double>(functions, 1.0)};
    const LayeredNetwork l(b.Build(), svc);
    const int m = functions + 1;
    EXPECT_EQ(l.num_nodes(), m * n);
    EXPECT_EQ(l.num_processing_edges(), (m - 1) * n);
    EXPECT_EQ(l.num_transmission_edges(), m * edges);
    for (const LayeredEdge& e : l.edges()) {
      if (e.kind == LayeredEdgeKind::kTransmission) {
        EXPECT_EQ(l.StageOf(e.from), l.StageOf(e.to));
        EXPECT_DOUBLE_EQ(e.zeta, 1.0);
        EXPECT_DOUBLE_EQ(e.rho, 1.0);
      } else {
        EXPECT_EQ(l.StageOf(e.to), l.StageOf(e.from) + 1);
        EXPECT_EQ(l.BaseNode(e.to), l.BaseNode(e.from));
      }
    }
  }
}

TEST(Layered, CumulativeScaling) {
  NetworkBuilder b;
  b.AddNode("a");
  b.AddNode("b");
  b.AddEdge(0, 1, 1, 1.0);
  b.SetSources({0});
  b.SetDestinations({1});
  const LayeredNetwork l(b.Build(), Service{"s", {1.0, 2.0}, {1.0 / 300, 1.0 / 400}});
  EXPECT_DOUBLE_EQ(l.CumulativeScaling(0), 1.0);
  EXPECT_DOUBLE_EQ(l.CumulativeScaling(1), 1.0);
  EXPECT_DOUBLE_EQ(l.CumulativeScaling(2), 2.0);
  const LayeredNetwork flat(b.Build(), Service{"forward", {}, {}});
  EXPECT_EQ(flat.num_processing_edges(), 0);
  EXPECT_EQ(flat.num_nodes(), 2);
}

TEST(HopDistances, TriangleInequality) {
  std::mt19937 gen(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 6;
    NetworkBuilder b;
    for (int i = 0; i < n; ++i) b.AddNode("v" + std::to_string(i));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && gen() % 4 == 0) b.AddEdge(i, j, 1, 1.0);
      }
    }
    b.SetSources({0});
    b.SetDestinations({n - 1});
    const Network net = b.Build();
    std::vector<int> all(n);
    for (int i = 0; i < n; ++i) all[i] = i;
    const HopTable h = HopDistances(net, all);
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(h[i][i], 0);
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          if (h[i][j] < kUnreachableHops && h[j][k] < kUnreachableHops) EXPECT_LE(h[i][k], h[i][j] + h[j][k]);
        }
      }
    }
  }
}

}  // namespace
}  // namespace mcnet
