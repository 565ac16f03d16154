// Control policies. Every policy reads the slot-start queue snapshot (plus
// static tables and this slot's channel gains) and emits a SlotDecision.

#ifndef MCNET_POLICY_H_
#define MCNET_POLICY_H_

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mcnet/duplication_tree.h"
#include "mcnet/network.h"
#include "mcnet/queue_state.h"
#include "mcnet/rng.h"
#include "mcnet/scenario.h"
#include "mcnet/status.h"

namespace mcnet {

enum class PolicyKind { kGdcnc, kGdcncR, kEgdcnc, kEgdcncR, kDcnc, kEdspa };

PolicyKind ParsePolicyKind(const std::string& name);
std::string PolicyKindName(PolicyKind kind);

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kGdcnc;
  double V = 0.0;
  double eta = 0.0;  // bias weight, EGDCNC variants only
  int num_trees = 1;  // GDCNC-R variants
  ClusterMetric metric = ClusterMetric::kHopDistance;
  uint64_t cluster_seed = 0;
  bool normalize = false;  // divide queue values by the stage's cumulative scaling

  // Throws InvalidInput unless V and eta are finite and non-negative.
  void Validate() const;
};

// Per-slot queue values seen by the max-weight policies:
//   - at destination k on the last layer, a status with bit k set reads as the
//     status without it (the copy for k would leave on arrival);
//   - with a bias, Q~ = |q| Q + eta * sum_k q_k H(i, d_k);
//   - with normalization, values are divided by the stage's cumulative scaling.
class QueueView {
 public:
  QueueView(const LayeredNetwork& layered, bool biased, double eta, bool normalize);

  void Refresh(const QueueState& state);
  double operator()(int node, DupStatus q) const { return values_[(node << d_) | q.bits()]; }
  // Raw status after destination aliasing.
  DupStatus Alias(int node, DupStatus q) const;

 private:
  const LayeredNetwork* layered_;
  int d_;
  bool biased_;
  double eta_;
  bool normalize_;
  HopTable hops_;
  std::vector<double> values_;
};

// Q~ = |q| Q + eta * sum_k q_k H[k].
double BiasedBacklog(double backlog, DupStatus q, std::span<const int64_t> hops, double eta);

// Q_i(q) - Q_i(q - s) - Q_j(s) - V e on a transmission edge.
double GdcncWeight(const QueueView& view, const LayeredEdge& edge, DupChoice choice,
                   double v_times_cost);

// [Q_i(m, q) - xi Q_i(m + 1, s) - Q_i(m, q - s)] / r - V e_i on a processing edge.
double ProcessingWeight(const QueueView& view, const LayeredEdge& edge, DupChoice choice,
                        double v_times_cost);

struct WeightedChoice {
  int edge = -1;  // layered edge
  DupChoice choice;
  double weight = -std::numeric_limits<double>::infinity();
};

// Best (choice, stage) over the layered copies of a physical link. Ties go to
// the smallest (q, s, stage). Choices must be sorted.
WeightedChoice BestTransmission(const QueueView& view, const LayeredNetwork& layered,
                                int physical_edge, std::span<const DupChoice> choices,
                                double v_times_cost);
// Best (stage, choice) over a node's processing edges.
WeightedChoice BestProcessing(const QueueView& view, const LayeredNetwork& layered, int node,
                              std::span<const DupChoice> choices, double v_times_cost);

// Tree choices of all trees, plus (q, q) for every status a destination split
// can produce that has no choice of its own. Sorted.
std::vector<DupChoice> TreeChoiceSet(const std::vector<DupTree>& trees);
// (b_k, b_k) for every destination.
std::vector<DupChoice> UnicastChoiceSet(int num_destinations);

// Destinations routed over each layered edge by the shortest-path union:
// each (node, destination) forwards to the smallest-index neighbor one hop
// closer. Throws InvalidInput when a destination is unreachable from a source.
std::vector<uint32_t> EdspaEdgeMasks(const LayeredNetwork& layered);

struct PolicyInput {
  const QueueState* state = nullptr;
  int64_t slot = 0;
  std::span<const double> gains;  // per physical edge, wireless scenarios only
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual void Decide(const PolicyInput& input, SlotDecision& decision) = 0;
  // Arrivals enter as D single-destination packets.
  virtual bool unicast_arrivals() const { return false; }
  virtual std::string name() const = 0;
};

std::unique_ptr<Policy> MakePolicy(const Scenario& scenario, const LayeredNetwork& layered,
                                   const PolicyConfig& config);

// One row of a stationary randomized policy: the resource (physical link, or
// node for processing) serves `choice` on `edge` with probability beta.
struct BetaEntry {
  bool processing = false;
  int resource = 0;  // physical edge id, or node id when processing
  int edge = 0;      // layered edge
  DupChoice choice;
  double beta = 0.0;
};

// Each slot every resource draws one entry (or stays idle with the leftover
// probability) and serves it at full capacity. Throws InvalidInput when some
// resource's probabilities are negative or sum above 1.
std::unique_ptr<Policy> MakeRandomizedPolicy(const LayeredNetwork& layered,
                                             std::vector<BetaEntry> beta, uint64_t seed);

}  // namespace mcnet

#endif  // MCNET_POLICY_H_
