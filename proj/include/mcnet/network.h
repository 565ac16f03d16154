// Physical network, service chain, and the layered expansion used to treat
// packet processing as routing over cross-layer edges.

#ifndef MCNET_NETWORK_H_
#define MCNET_NETWORK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcnet/status.h"

namespace mcnet {

// Hop distance reported for unreachable pairs. Finite so bias arithmetic
// stays in plain integers.
inline constexpr int64_t kUnreachableHops = int64_t{1} << 20;

enum class NodeKind { kPlain, kUserEquipment, kEdgeServer };

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct Node {
  std::string name;
  NodeKind kind = NodeKind::kPlain;
  double processing_capacity = 0.0;  // resource units per slot
  double processing_cost = 0.0;      // cost per resource unit
  std::optional<Point> position;     // meters
  double power_budget_w = 0.0;       // wireless transmit budget
  double energy_cost_per_j = 0.0;
};

struct Edge {
  int from = 0;
  int to = 0;
  int64_t capacity = 0;  // packets per slot; unused for wireless edges
  double cost = 0.0;     // cost per packet
  bool wireless = false;
};

class Network {
 public:
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const Node& node(int i) const { return nodes_[i]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const int> out_edges(int i) const { return out_edges_[i]; }
  std::span<const int> in_edges(int i) const { return in_edges_[i]; }

  // Edge id of (from, to), or -1.
  int FindEdge(int from, int to) const;
  // Node id by name, or -1.
  int FindNode(const std::string& name) const;

  const std::vector<int>& sources() const { return sources_; }
  // Ordered destination list; index k is bit k of a status.
  const std::vector<int>& destinations() const { return destinations_; }
  int num_destinations() const { return static_cast<int>(destinations_.size()); }
  // Position of node i in the destination list, or -1.
  int DestinationIndex(int i) const { return destination_index_[i]; }
  bool IsSource(int i) const { return is_source_[i] != 0; }

  bool has_wireless() const;

  // Copy with the destination list replaced (used by destination-count sweeps).
  Network WithDestinations(std::vector<int> destinations) const;

 private:
  friend class NetworkBuilder;
  void Finalize();

  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
  std::vector<int> sources_;
  std::vector<int> destinations_;
  std::vector<int> destination_index_;
  std::vector<char> is_source_;
};

// Collects nodes and edges, then validates everything in Build().
class NetworkBuilder {
 public:
  int AddNode(Node node);
  int AddNode(const std::string& name, NodeKind kind = NodeKind::kPlain);
  int AddEdge(int from, int to, int64_t capacity, double cost);
  int AddEdge(Edge edge);
  Node& mutable_node(int i) { return net_.nodes_[i]; }
  void SetSources(std::vector<int> sources) { net_.sources_ = std::move(sources); }
  void SetDestinations(std::vector<int> destinations) {
    net_.destinations_ = std::move(destinations);
  }
  int num_nodes() const { return net_.num_nodes(); }
  int FindNode(const std::string& name) const { return net_.FindNode(name); }

  // Throws InvalidInput on duplicate edges, negative capacity or cost,
  // dangling endpoints, a bad destination list, or source/destination overlap.
  Network Build() const;

 private:
  Network net_;
};

// Service function chain with M stages (M - 1 functions).
struct Service {
  std::string name;
  std::vector<double> scaling;   // xi per function, output packets per input packet
  std::vector<double> workload;  // r per function, resource units per input packet

  int num_stages() const { return static_cast<int>(scaling.size()) + 1; }
  // Throws InvalidInput unless scaling and workload are positive and aligned.
  void Validate() const;
};

enum class LayeredEdgeKind { kTransmission, kProcessing };

struct LayeredEdge {
  int from = 0;
  int to = 0;
  LayeredEdgeKind kind = LayeredEdgeKind::kTransmission;
  int stage = 0;     // 0-based stage of the packets entering the edge
  int physical = 0;  // physical edge id (transmission) or node id (processing)
  double zeta = 1.0;  // output packets per input packet
  double rho = 1.0;   // resource units per input packet
};

// M copies of the network; layer m holds stage-m packets. Node i on layer m
// has index m * |V| + i (m is 0-based).
class LayeredNetwork {
 public:
  LayeredNetwork(const Network& network, const Service& service);

  const Network& network() const { return network_; }
  int num_stages() const { return num_stages_; }
  int num_base_nodes() const { return num_base_nodes_; }
  int num_nodes() const { return num_stages_ * num_base_nodes_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int NodeIndex(int base_node, int stage) const { return stage * num_base_nodes_ + base_node; }
  int BaseNode(int index) const { return index % num_base_nodes_; }
  int StageOf(int index) const { return index / num_base_nodes_; }

  const LayeredEdge& edge(int e) const { return edges_[e]; }
  const std::vector<LayeredEdge>& edges() const { return edges_; }
  std::span<const int> out_edges(int v) const { return out_edges_[v]; }
  std::span<const int> in_edges(int v) const { return in_edges_[v]; }
  int num_processing_edges() const;
  int num_transmission_edges() const;

  // Layered edges carrying physical edge e, one per stage.
  std::span<const int> TransmissionEdgesOf(int physical_edge) const {
    return transmission_of_[physical_edge];
  }
  // Processing edges at node i, one per function.
  std::span<const int> ProcessingEdgesOf(int node) const { return processing_of_[node]; }

  // Destination k lives on the last layer.
  int DestinationNode(int k) const {
    return NodeIndex(network_.destinations()[k], num_stages_ - 1);
  }
  // Destination index of layered node v (last layer only), or -1.
  int DestinationIndex(int v) const {
    return StageOf(v) == num_stages_ - 1 ? network_.DestinationIndex(BaseNode(v)) : -1;
  }

  // Cumulative scaling factor of stage m (0-based): product of the scaling of
  // all earlier functions.
  double CumulativeScaling(int stage) const { return cumulative_scaling_[stage]; }
  const std::vector<double>& scaling() const { return scaling_; }
  const std::vector<double>& workload() const { return workload_; }

 private:
  Network network_;
  int num_stages_;
  int num_base_nodes_;
  std::vector<LayeredEdge> edges_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
  std::vector<std::vector<int>> transmission_of_;
  std::vector<std::vector<int>> processing_of_;
  std::vector<double> cumulative_scaling_;
  std::vector<double> scaling_;
  std::vector<double> workload_;
};

// H[i][k]: fewest hops from node i to destination k, kUnreachableHops when
// there is no directed path.
using HopTable = std::vector<std::vector<int64_t>>;

HopTable HopDistances(const Network& network, std::span<const int> destinations);
// Same on the layered graph, measured to each destination's last-layer node
// and skipping links and processors without capacity.
HopTable HopDistances(const LayeredNetwork& layered);

// Single-source shortest path lengths with per-edge weights; edges with a
// non-finite weight are skipped. Unreachable nodes get +infinity.
std::vector<double> ShortestPathLengths(const Network& network, int source,
                                        std::span<const double> edge_weight);

}  // namespace mcnet

#endif  // MCNET_NETWORK_H_
