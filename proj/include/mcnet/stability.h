// Flow LPs for the multicast and unicast stability regions, minimum cost,
// the stationary randomized policy and per-status conservation checks.
//
// Loads are per physical node (packets per slot entering at stage 0 with the
// all-ones status). Multicast variables f[e][(q, s)] live on layered edges;
// the constraint at (node, q) is
//   in-copies(q) + reloads(q) + lambda(q) <= selected(q),
// except that a destination keeps no constraint for statuses that include
// it, and a copy of status s landing on destination k counts toward s - b_k.

#ifndef MCNET_STABILITY_H_
#define MCNET_STABILITY_H_

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mcnet/lp.h"
#include "mcnet/network.h"
#include "mcnet/policy.h"
#include "mcnet/status.h"

namespace mcnet {

struct FlowVar {
  int edge = 0;  // layered edge
  DupChoice choice;
};

struct UnicastVar {
  int edge = 0;
  int destination = 0;
};

struct FeasibilityResult {
  bool feasible = false;
  bool exact = false;
  std::vector<FlowVar> vars;  // multicast only
  std::vector<double> flow;   // witness when feasible
  // Farkas multipliers per constraint row when infeasible, with row labels.
  std::vector<double> certificate;
  std::vector<std::string> row_labels;
};

class InfeasibleLoad : public std::runtime_error {
 public:
  InfeasibleLoad(const std::string& what, std::vector<double> certificate,
                 std::vector<std::string> labels)
      : std::runtime_error(what), certificate(std::move(certificate)), labels(std::move(labels)) {}
  std::vector<double> certificate;
  std::vector<std::string> labels;
};

// Builds the multicast LP over `choices` (full choice set when empty).
// With `unit_costs` every variable costs 1, which makes optimal flows tight.
LpModel MulticastLp(const LayeredNetwork& layered, std::span<const double> load,
                    std::vector<FlowVar>* vars, bool unit_costs = false,
                    std::span<const DupChoice> choices = {});
LpModel UnicastLp(const LayeredNetwork& layered, std::span<const double> load,
                  std::vector<UnicastVar>* vars);

FeasibilityResult MulticastFeasible(const LayeredNetwork& layered, std::span<const double> load);
FeasibilityResult UnicastFeasible(const LayeredNetwork& layered, std::span<const double> load);

// Largest alpha with alpha * direction feasible (exact LP). Throws
// InvalidInput for an all-zero direction.
double MulticastBoundary(const LayeredNetwork& layered, std::span<const double> direction,
                         std::span<const DupChoice> choices = {});
double UnicastBoundary(const LayeredNetwork& layered, std::span<const double> direction);

struct MinCostResult {
  double cost = 0.0;
  std::string cost_exact;
  std::vector<FlowVar> vars;
  std::vector<double> flow;
};

// Throws InfeasibleLoad (with the certificate) outside the region.
MinCostResult MinCost(const LayeredNetwork& layered, std::span<const double> load);
double UnicastMinCost(const LayeredNetwork& layered, std::span<const double> load);

// beta = f / C on links and r f / C_i on processors.
std::vector<BetaEntry> BetaFromFlows(const LayeredNetwork& layered, const std::vector<FlowVar>& vars,
                                     std::span<const double> flow);

// in + lambda - out per (layered node, status), indexed node * 2^D + q, with
// destination splits applied. Zero everywhere for a conserving flow.
std::vector<double> ConservationResidual(const LayeredNetwork& layered,
                                         std::span<const double> load,
                                         const std::vector<FlowVar>& vars,
                                         std::span<const double> flow);

// Given status-level flows entering and leaving a single node, reports
// whether per-destination totals balance, and whether some assignment of
// duplication choices at the node realizes them with per-status conservation.
struct StatusFlowVerdict {
  bool aggregate_holds = false;
  bool per_status_feasible = false;
};

StatusFlowVerdict CheckNodeStatusFlows(int num_destinations,
                                       std::span<const std::pair<DupStatus, double>> incoming,
                                       std::span<const std::pair<DupStatus, double>> outgoing);

// Three destinations: 111 and 100 in at unit rate, 110 and 101 out. The
// per-destination totals balance, but no per-status flow realizes it.
StatusFlowVerdict CounterexampleCheck();

}  // namespace mcnet

#endif  // MCNET_STABILITY_H_
