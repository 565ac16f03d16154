// Scenario builders shared by the suites.

#ifndef MCNET_TESTS_TEST_UTIL_H_
#define MCNET_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "mcnet/network.h"
#include "mcnet/scenario.h"

namespace mcnet::testing {

inline std::string ScenarioPath(const std::string& file) {
  return std::string(MCNET_SCENARIO_DIR) + "/" + file;
}

inline void SetRate(Scenario& s, int node, double rate) {
  const int n = s.network.num_nodes();
  s.arrivals.rate.assign(n, 0.0);
  s.arrivals.max.assign(n, 0);
  s.explicit_max.assign(n, false);
  s.arrivals.rate[node] = rate;
  s.arrivals.max[node] = DefaultArrivalCap(rate);
}

// src -> relay -> {d1, d2}, unit capacities and costs.
inline Scenario Star(double rate = 0.5) {
  NetworkBuilder b;
  b.AddNode("src");
  b.AddNode("relay");
  b.AddNode("d1");
  b.AddNode("d2");
  b.AddEdge(0, 1, 1, 1.0);
  b.AddEdge(1, 2, 1, 1.0);
  b.AddEdge(1, 3, 1, 1.0);
  b.SetSources({0});
  b.SetDestinations({2, 3});
  Scenario s;
  s.name = "star";
  s.network = b.Build();
  s.service = Service{"forward", {}, {}};
  SetRate(s, 0, rate);
  return s;
}

// Connected random graph: a bidirectional ring plus extra bidirectional
// chords, integer capacities 1..3, costs in (0, 1], one unit-scaling
// function hosted on every node. Source is node 0; `d` distinct
// destinations are drawn from the rest.
inline Scenario RandomGraph(uint64_t seed, int n, int d, bool with_service = true) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> cap(1, 3);
  std::uniform_int_distribution<int> cost(1, 10);
  std::bernoulli_distribution chord(0.3);
  NetworkBuilder b;
  for (int i = 0; i < n; ++i) {
    Node node;
    node.name = "n" + std::to_string(i);
    if (with_service) {
      node.processing_capacity = cap(gen);
      node.processing_cost = cost(gen) / 10.0;
    }
    b.AddNode(node);
  }
  auto link = [&](int a, int c) {
    b.AddEdge(a, c, cap(gen), cost(gen) / 10.0);
    b.AddEdge(c, a, cap(gen), cost(gen) / 10.0);
  };
  for (int i = 0; i < n; ++i) link(i, (i + 1) % n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (chord(gen)) link(i, j);
    }
  }
  std::vector<int> others(n - 1);
  std::iota(others.begin(), others.end(), 1);
  std::shuffle(others.begin(), others.end(), gen);
  others.resize(d);
  std::sort(others.begin(), others.end());
  b.SetSources({0});
  b.SetDestinations(others);
  Scenario s;
  s.name = "random" + std::to_string(seed);
  s.network = b.Build();
  s.service = with_service ? Service{"f", {1.0}, {1.0}} : Service{"forward", {}, {}};
  SetRate(s, 0, 1.0);
  return s;
}

}  // namespace mcnet::testing

#endif  // MCNET_TESTS_TEST_UTIL_H_
