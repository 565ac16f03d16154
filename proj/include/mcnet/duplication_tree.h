// Duplication trees and destination clustering.
//
// A duplication tree is a binary tree of nested destination-set partitions:
// the root is the full set, each internal node splits into two disjoint
// children and the leaves are single destinations. Restricting the policy to
// the choices found in a few such trees trades optimality for O(K D) work.

#ifndef MCNET_DUPLICATION_TREE_H_
#define MCNET_DUPLICATION_TREE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mcnet/network.h"
#include "mcnet/status.h"

namespace mcnet {

enum class ClusterMetric {
  kGeographic,
  kHopDistance,
  kReciprocalCapacity,
  kUnitCost,
};

ClusterMetric ParseClusterMetric(const std::string& name);
std::string ClusterMetricName(ClusterMetric metric);

class DupTree {
 public:
  struct TreeNode {
    DupStatus status;
    int first_child = -1;
    int second_child = -1;
    bool is_leaf() const { return first_child < 0; }
  };

  explicit DupTree(int num_destinations) : num_destinations_(num_destinations) {}

  // Appends a node and returns its index. The root must be added first.
  int AddNode(DupStatus status);
  void SetChildren(int parent, int first, int second);

  int num_destinations() const { return num_destinations_; }
  int size() const { return static_cast<int>(nodes_.size()); }
  const TreeNode& node(int i) const { return nodes_[i]; }
  const TreeNode& root() const { return nodes_.front(); }
  int num_internal() const;

  // Checks the structural invariants: all-ones root, children partition their
  // parent, leaves are exactly the D singletons.
  bool IsValid(std::string* why = nullptr) const;

  // Parenthesized form, e.g. "111(100,011(010,001))".
  std::string ToString() const;

 private:
  int num_destinations_;
  std::vector<TreeNode> nodes_;
};

// Symmetric D x D dissimilarity between destinations under `metric`.
// Unreachable pairs get kUnreachableHops. Geographic requires positions.
std::vector<std::vector<double>> DestinationDistances(const Network& network,
                                                      ClusterMetric metric);

// Splits `members` (destination indices, ascending) into two nonempty
// clusters. The cluster holding the smallest index comes first.
struct Bipartition {
  std::vector<int> first;
  std::vector<int> second;
  double cost = 0.0;
};

// Exhaustive 2-medoid bisection; cost is the summed distance to each
// cluster's best medoid. Requires at least two members.
Bipartition MedoidBisection(const std::vector<std::vector<double>>& dist,
                            const std::vector<int>& members);

// Lloyd 2-means on positions with seeded k-means++ restarts.
Bipartition TwoMeansBisection(const std::vector<Point>& positions,
                              const std::vector<int>& members, uint64_t seed);

// Builds K distinct duplication trees over the network's destinations. Tree 0
// comes from recursive bisection; trees 1..K-1 replace the top-level split by
// the next-cheapest distinct bipartitions. Throws InvalidInput when K < 1 or K
// exceeds the number of distinct top-level splits (2^(D-1) - 1, or 1 for D = 1).
std::vector<DupTree> BuildDuplicationTrees(const Network& network, int num_trees,
                                           ClusterMetric metric, uint64_t seed);

// (q,q), (q,s), (q,r) for each internal node q with children s, r, and
// (b_k, b_k) for each leaf; 4D - 3 choices, sorted.
std::vector<DupChoice> TreeChoices(const DupTree& tree);

}  // namespace mcnet

#endif  // MCNET_DUPLICATION_TREE_H_
