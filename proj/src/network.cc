#include "mcnet/network.h"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <unordered_set>

namespace mcnet {

int Network::FindEdge(int from, int to) const {
  if (from < 0 || from >= num_nodes()) return -1;
  for (int e : out_edges_[from]) {
    if (edges_[e].to == to) return e;
  }
  return -1;
}

int Network::FindNode(const std::string& name) const {
  for (int i = 0; i < num_nodes(); ++i) {
    if (nodes_[i].name == name) return i;
  }
  return -1;
}

bool Network::has_wireless() const {
  return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.wireless; });
}

void Network::Finalize() {
  const int n = num_nodes();
  out_edges_.assign(n, {});
  in_edges_.assign(n, {});
  for (int e = 0; e < num_edges(); ++e) {
    out_edges_[edges_[e].from].push_back(e);
    in_edges_[edges_[e].to].push_back(e);
  }
  destination_index_.assign(n, -1);
  for (int k = 0; k < num_destinations(); ++k) destination_index_[destinations_[k]] = k;
  is_source_.assign(n, 0);
  for (int s : sources_) is_source_[s] = 1;
}

Network Network::WithDestinations(std::vector<int> destinations) const {
  NetworkBuilder b;
  for (const Node& node : nodes_) b.AddNode(node);
  for (const Edge& e : edges_) b.AddEdge(e);
  b.SetSources(sources_);
  b.SetDestinations(std::move(destinations));
  return b.Build();
}

int NetworkBuilder::AddNode(Node node) {
  net_.nodes_.push_back(std::move(node));
  return net_.num_nodes() - 1;
}

int NetworkBuilder::AddNode(const std::string& name, NodeKind kind) {
  Node node;
  node.name = name;
  node.kind = kind;
  return AddNode(std::move(node));
}

int NetworkBuilder::AddEdge(int from, int to, int64_t capacity, double cost) {
  return AddEdge(Edge{from, to, capacity, cost, false});
}

int NetworkBuilder::AddEdge(Edge edge) {
  net_.edges_.push_back(edge);
  return net_.num_edges() - 1;
}

Network NetworkBuilder::Build() const {
  Network net = net_;
  const int n = net.num_nodes();
  if (n == 0) throw InvalidInput("network has no nodes");
  {
    std::set<std::string> names;
    for (const Node& node : net.nodes_) {
      if (!names.insert(node.name).second) {
        throw InvalidInput("duplicate node name '" + node.name + "'");
      }
      if (node.processing_capacity < 0 || node.processing_cost < 0) {
        throw InvalidInput("negative processing capacity or cost at node '" + node.name + "'");
      }
      if (node.power_budget_w < 0 || node.energy_cost_per_j < 0) {
        throw InvalidInput("negative power budget or energy cost at node '" + node.name + "'");
      }
    }
  }
  std::set<std::pair<int, int>> seen;
  for (const Edge& e : net.edges_) {
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      throw InvalidInput("edge endpoint does not exist");
    }
    if (e.from == e.to) throw InvalidInput("self-loop edges are not allowed");
    if (!seen.insert({e.from, e.to}).second) {
      throw InvalidInput("duplicate edge " + net.nodes_[e.from].name + "->" +
                         net.nodes_[e.to].name);
    }
    if (e.capacity < 0 || e.cost < 0) {
      throw InvalidInput("negative capacity or cost on edge " + net.nodes_[e.from].name +
                         "->" + net.nodes_[e.to].name);
    }
  }
  const int d = static_cast<int>(net.destinations_.size());
  if (d < 1 || d > kMaxDestinations) {
    throw InvalidInput("destination count must be in [1, " + std::to_string(kMaxDestinations) +
                       "]");
  }
  std::unordered_set<int> dests;
  for (int v : net.destinations_) {
    if (v < 0 || v >= n) throw InvalidInput("destination node does not exist");
    if (!dests.insert(v).second) throw InvalidInput("duplicate destination");
  }
  std::unordered_set<int> srcs;
  for (int v : net.sources_) {
    if (v < 0 || v >= n) throw InvalidInput("source node does not exist");
    if (!srcs.insert(v).second) throw InvalidInput("duplicate source");
    if (dests.count(v)) {
      throw InvalidInput("source-destination overlap at node '" + net.nodes_[v].name + "'");
    }
  }
  net.Finalize();
  return net;
}

void Service::Validate() const {
  if (scaling.size() != workload.size()) {
    throw InvalidInput("service '" + name + "': scaling and workload lengths differ");
  }
  for (size_t m = 0; m < scaling.size(); ++m) {
    if (!(scaling[m] > 0) || !(workload[m] > 0) || !std::isfinite(scaling[m]) ||
        !std::isfinite(workload[m])) {
      throw InvalidInput("service '" + name + "': scaling and workload must be positive");
    }
  }
}

LayeredNetwork::LayeredNetwork(const Network& network, const Service& service)
    : network_(network),
      num_stages_(service.num_stages()),
      num_base_nodes_(network.num_nodes()),
      scaling_(service.scaling),
      workload_(service.workload) {
  service.Validate();
  transmission_of_.assign(network.num_edges(), {});
  processing_of_.assign(num_base_nodes_, {});
  for (int m = 0; m < num_stages_; ++m) {
    for (int e = 0; e < network.num_edges(); ++e) {
      const Edge& pe = network.edge(e);
      transmission_of_[e].push_back(static_cast<int>(edges_.size()));
      edges_.push_back({NodeIndex(pe.from, m), NodeIndex(pe.to, m),
                        LayeredEdgeKind::kTransmission, m, e, 1.0, 1.0});
    }
  }
  for (int m = 0; m + 1 < num_stages_; ++m) {
    for (int i = 0; i < num_base_nodes_; ++i) {
      processing_of_[i].push_back(static_cast<int>(edges_.size()));
      edges_.push_back({NodeIndex(i, m), NodeIndex(i, m + 1), LayeredEdgeKind::kProcessing, m,
                        i, scaling_[m], workload_[m]});
    }
  }
  out_edges_.assign(num_nodes(), {});
  in_edges_.assign(num_nodes(), {});
  for (int e = 0; e < num_edges(); ++e) {
    out_edges_[edges_[e].from].push_back(e);
    in_edges_[edges_[e].to].push_back(e);
  }
  cumulative_scaling_.assign(num_stages_, 1.0);
  for (int m = 1; m < num_stages_; ++m) {
    cumulative_scaling_[m] = cumulative_scaling_[m - 1] * scaling_[m - 1];
  }
}

int LayeredNetwork::num_processing_edges() const {
  return static_cast<int>(std::count_if(edges_.begin(), edges_.end(), [](const LayeredEdge& e) {
    return e.kind == LayeredEdgeKind::kProcessing;
  }));
}

int LayeredNetwork::num_transmission_edges() const {
  return num_edges() - num_processing_edges();
}

namespace {

// BFS over reversed edges from `target`.
template <typename InNeighbors>
std::vector<int64_t> HopsTo(int num_nodes, int target, InNeighbors&& in_neighbors) {
  std::vector<int64_t> dist(num_nodes, kUnreachableHops);
  std::deque<int> frontier;
  dist[target] = 0;
  frontier.push_back(target);
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop_front();
    in_neighbors(v, [&](int u) {
      if (dist[u] == kUnreachableHops) {
        dist[u] = dist[v] + 1;
        frontier.push_back(u);
      }
    });
  }
  return dist;
}

}  // namespace

HopTable HopDistances(const Network& network, std::span<const int> destinations) {
  const int n = network.num_nodes();
  HopTable table(n, std::vector<int64_t>(destinations.size(), kUnreachableHops));
  for (size_t k = 0; k < destinations.size(); ++k) {
    auto dist = HopsTo(n, destinations[k], [&](int v, auto&& visit) {
      for (int e : network.in_edges(v)) visit(network.edge(e).from);
    });
    for (int i = 0; i < n; ++i) table[i][k] = dist[i];
  }
  return table;
}

namespace {

// Zero-capacity resources never carry traffic, so paths must avoid them.
bool Usable(const LayeredNetwork& layered, const LayeredEdge& e) {
  const Network& net = layered.network();
  if (e.kind == LayeredEdgeKind::kProcessing) return net.node(e.physical).processing_capacity > 0;
  const Edge& edge = net.edge(e.physical);
  return edge.wireless || edge.capacity > 0;
}

}  // namespace

HopTable HopDistances(const LayeredNetwork& layered) {
  const int n = layered.num_nodes();
  const int d = layered.network().num_destinations();
  HopTable table(n, std::vector<int64_t>(d, kUnreachableHops));
  for (int k = 0; k < d; ++k) {
    auto dist = HopsTo(n, layered.DestinationNode(k), [&](int v, auto&& visit) {
      for (int e : layered.in_edges(v)) {
        if (Usable(layered, layered.edge(e))) visit(layered.edge(e).from);
      }
    });
    for (int i = 0; i < n; ++i) table[i][k] = dist[i];
  }
  return table;
}

std::vector<double> ShortestPathLengths(const Network& network, int source,
                                        std::span<const double> edge_weight) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(network.num_nodes(), kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > dist[v]) continue;
    for (int e : network.out_edges(v)) {
      const double w = edge_weight[e];
      if (!std::isfinite(w)) continue;
      const int u = network.edge(e).to;
      if (d + w < dist[u]) {
        dist[u] = d + w;
        heap.push({dist[u], u});
      }
    }
  }
  return dist;
}

}  // namespace mcnet
