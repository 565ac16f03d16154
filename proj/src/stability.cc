#include "mcnet/stability.h"

#include <cmath>
#include <limits>

namespace mcnet {

namespace {

std::string CellLabel(const LayeredNetwork& layered, int v, DupStatus q) {
  const Network& net = layered.network();
  return net.node(layered.BaseNode(v)).name + "@" + std::to_string(layered.StageOf(v) + 1) + "[" +
         q.ToString(net.num_destinations()) + "]";
}

bool Holdable(const LayeredNetwork& layered, int node, DupStatus q) {
  const int k = layered.DestinationIndex(node);
  return k < 0 || !q.has(k);
}

void CheckLoad(const LayeredNetwork& layered, std::span<const double> load) {
  const Network& net = layered.network();
  if (static_cast<int>(load.size()) != net.num_nodes()) {
    throw InvalidInput("load vector must have one entry per node");
  }
  for (int i = 0; i < net.num_nodes(); ++i) {
    if (!(load[i] >= 0) || !std::isfinite(load[i])) throw InvalidInput("loads must be finite and >= 0");
    if (load[i] > 0 && !net.IsSource(i)) {
      throw InvalidInput("load at non-source node '" + net.node(i).name + "'");
    }
  }
}

// Row bookkeeping shared by the multicast builders.
struct CellRows {
  std::vector<int> row;  // per cell, -1 when the cell has no constraint
  std::vector<std::vector<std::pair<int, double>>> terms;
  std::vector<double> rhs;
  std::vector<std::string> labels;
};

CellRows MakeCellRows(const LayeredNetwork& layered) {
  const int d = layered.network().num_destinations();
  const uint32_t statuses = uint32_t{1} << d;
  CellRows rows;
  rows.row.assign(static_cast<size_t>(layered.num_nodes()) << d, -1);
  for (int v = 0; v < layered.num_nodes(); ++v) {
    for (uint32_t b = 1; b < statuses; ++b) {
      if (!Holdable(layered, v, DupStatus(b))) continue;
      rows.row[(static_cast<size_t>(v) << d) | b] = static_cast<int>(rows.terms.size());
      rows.terms.emplace_back();
      rows.rhs.push_back(0.0);
      rows.labels.push_back("conservation " + CellLabel(layered, v, DupStatus(b)));
    }
  }
  return rows;
}

// Cell receiving a copy of status s landing on layered node u.
std::pair<int, DupStatus> LandingCell(const LayeredNetwork& layered, int u, DupStatus s) {
  const int k = layered.DestinationIndex(u);
  if (k >= 0 && s.has(k)) return {u, s - DupStatus::Single(k)};
  return {u, s};
}

void AddCapacityRows(const LayeredNetwork& layered, LpModel& model,
                     const std::vector<std::vector<std::pair<int, double>>>& link_terms,
                     const std::vector<std::vector<std::pair<int, double>>>& node_terms) {
  const Network& net = layered.network();
  for (int e = 0; e < net.num_edges(); ++e) {
    if (link_terms[e].empty()) continue;
    const Edge& edge = net.edge(e);
    model.AddRow(link_terms[e], RowSense::kLessEqual, static_cast<double>(edge.capacity),
                 "capacity " + net.node(edge.from).name + "->" + net.node(edge.to).name);
  }
  for (int i = 0; i < net.num_nodes(); ++i) {
    if (node_terms[i].empty()) continue;
    model.AddRow(node_terms[i], RowSense::kLessEqual, net.node(i).processing_capacity,
                 "processing " + net.node(i).name);
  }
}

void RejectWireless(const LayeredNetwork& layered) {
  for (const Edge& e : layered.network().edges()) {
    if (e.wireless && e.capacity <= 0) {
      throw InvalidInput("stability analysis needs a nominal capacity on every wireless link");
    }
  }
}

}  // namespace

LpModel MulticastLp(const LayeredNetwork& layered, std::span<const double> load,
                    std::vector<FlowVar>* vars, bool unit_costs,
                    std::span<const DupChoice> choices) {
  CheckLoad(layered, load);
  RejectWireless(layered);
  const Network& net = layered.network();
  const int d = net.num_destinations();
  std::vector<DupChoice> omega;
  if (choices.empty()) {
    omega = EnumerateOmega(d);
    choices = omega;
  }
  CellRows rows = MakeCellRows(layered);
  auto cell_row = [&](int v, DupStatus q) { return rows.row[(static_cast<size_t>(v) << d) | q.bits()]; };
  LpModel model;
  std::vector<std::vector<std::pair<int, double>>> link_terms(net.num_edges()), node_terms(net.num_nodes());
  vars->clear();
  for (int le = 0; le < layered.num_edges(); ++le) {
    const LayeredEdge& e = layered.edge(le);
    const bool processing = e.kind == LayeredEdgeKind::kProcessing;
    const double unit = processing ? net.node(e.physical).processing_cost * e.rho : net.edge(e.physical).cost;
    for (const DupChoice& c : choices) {
      if (!Holdable(layered, e.from, c.q)) continue;
      const int j = model.AddVariable(unit_costs ? 1.0 : unit);
      vars->push_back({le, c});
      rows.terms[cell_row(e.from, c.q)].push_back({j, -1.0});
      if (!c.reloaded().empty()) rows.terms[cell_row(e.from, c.reloaded())].push_back({j, 1.0});
      const auto [u, s] = LandingCell(layered, e.to, c.s);
      if (!s.empty()) rows.terms[cell_row(u, s)].push_back({j, e.zeta});
      if (processing) {
        node_terms[e.physical].push_back({j, e.rho});
      } else {
        link_terms[e.physical].push_back({j, 1.0});
      }
    }
  }
  const DupStatus all = DupStatus::AllOnes(d);
  for (int i = 0; i < net.num_nodes(); ++i) {
    if (load[i] > 0) rows.rhs[cell_row(layered.NodeIndex(i, 0), all)] = -load[i];
  }
  for (size_t r = 0; r < rows.terms.size(); ++r) {
    if (rows.terms[r].empty() && rows.rhs[r] == 0) continue;
    model.AddRow(std::move(rows.terms[r]), RowSense::kLessEqual, rows.rhs[r], rows.labels[r]);
  }
  AddCapacityRows(layered, model, link_terms, node_terms);
  return model;
}

LpModel UnicastLp(const LayeredNetwork& layered, std::span<const double> load,
                  std::vector<UnicastVar>* vars) {
  CheckLoad(layered, load);
  RejectWireless(layered);
  const Network& net = layered.network();
  const int d = net.num_destinations();
  const int n = layered.num_nodes();
  // Row per (node, destination), except at the destination itself.
  std::vector<std::vector<std::pair<int, double>>> terms(static_cast<size_t>(n) * d);
  std::vector<double> rhs(terms.size(), 0.0);
  LpModel model;
  std::vector<std::vector<std::pair<int, double>>> link_terms(net.num_edges()), node_terms(net.num_nodes());
  vars->clear();
  for (int le = 0; le < layered.num_edges(); ++le) {
    const LayeredEdge& e = layered.edge(le);
    const bool processing = e.kind == LayeredEdgeKind::kProcessing;
    const double unit = processing ? net.node(e.physical).processing_cost * e.rho : net.edge(e.physical).cost;
    for (int k = 0; k < d; ++k) {
      if (e.from == layered.DestinationNode(k)) continue;
      const int j = model.AddVariable(unit);
      vars->push_back({le, k});
      terms[static_cast<size_t>(e.from) * d + k].push_back({j, -1.0});
      if (e.to != layered.DestinationNode(k)) terms[static_cast<size_t>(e.to) * d + k].push_back({j, e.zeta});
      if (processing) {
        node_terms[e.physical].push_back({j, e.rho});
      } else {
        link_terms[e.physical].push_back({j, 1.0});
      }
    }
  }
  for (int i = 0; i < net.num_nodes(); ++i) {
    if (load[i] <= 0) continue;
    for (int k = 0; k < d; ++k) rhs[static_cast<size_t>(layered.NodeIndex(i, 0)) * d + k] = -load[i];
  }
  for (int v = 0; v < n; ++v) {
    for (int k = 0; k < d; ++k) {
      const size_t r = static_cast<size_t>(v) * d + k;
      if (v == layered.DestinationNode(k) || (terms[r].empty() && rhs[r] == 0)) continue;
      model.AddRow(std::move(terms[r]), RowSense::kLessEqual, rhs[r],
                   "conservation " + net.node(layered.BaseNode(v)).name + "@" +
                       std::to_string(layered.StageOf(v) + 1) + " to " +
                       net.node(net.destinations()[k]).name);
    }
  }
  AddCapacityRows(layered, model, link_terms, node_terms);
  return model;
}

namespace {

std::vector<std::string> RowLabels(const LpModel& model) {
  std::vector<std::string> out;
  for (int r = 0; r < model.num_rows(); ++r) out.push_back(model.row(r).label);
  return out;
}

// Source rows carry rhs = -direction_i; moving that into an alpha column and
// maximizing alpha (with flow costs dropped) gives the boundary multiplier.
double Boundary(const LpModel& model) {
  LpModel bounded;
  for (int j = 0; j < model.num_variables(); ++j) bounded.AddVariable(0.0);
  const int alpha = bounded.AddVariable(1.0, "alpha");
  for (int r = 0; r < model.num_rows(); ++r) {
    LpRow row = model.row(r);
    if (row.rhs < 0) {
      row.terms.push_back({alpha, -row.rhs});
      row.rhs = 0.0;
    }
    bounded.AddRow(std::move(row.terms), row.sense, row.rhs, row.label);
  }
  bounded.set_maximize(true);
  const LpSolution sol = SolveLp(bounded);
  if (sol.status == LpStatus::kUnbounded) return std::numeric_limits<double>::infinity();
  if (sol.status != LpStatus::kOptimal) throw std::logic_error("boundary LP is feasible at alpha = 0");
  return sol.objective;
}

void CheckDirection(std::span<const double> direction) {
  double sum = 0.0;
  for (double v : direction) sum += v;
  if (!(sum > 0)) throw InvalidInput("load direction must have a positive entry");
}

}  // namespace

FeasibilityResult MulticastFeasible(const LayeredNetwork& layered, std::span<const double> load) {
  FeasibilityResult res;
  const LpModel model = MulticastLp(layered, load, &res.vars, /*unit_costs=*/true);
  const LpSolution sol = SolveLp(model);
  res.exact = sol.exact;
  res.feasible = sol.status == LpStatus::kOptimal;
  if (res.feasible) {
    res.flow = sol.x;
  } else {
    res.certificate = sol.farkas;
    res.row_labels = RowLabels(model);
  }
  return res;
}

FeasibilityResult UnicastFeasible(const LayeredNetwork& layered, std::span<const double> load) {
  FeasibilityResult res;
  std::vector<UnicastVar> vars;
  const LpModel model = UnicastLp(layered, load, &vars);
  const LpSolution sol = SolveLp(model);
  res.exact = sol.exact;
  res.feasible = sol.status == LpStatus::kOptimal;
  if (res.feasible) {
    res.flow = sol.x;
  } else {
    res.certificate = sol.farkas;
    res.row_labels = RowLabels(model);
  }
  return res;
}

double MulticastBoundary(const LayeredNetwork& layered, std::span<const double> direction,
                         std::span<const DupChoice> choices) {
  CheckDirection(direction);
  std::vector<FlowVar> vars;
  return Boundary(MulticastLp(layered, direction, &vars, false, choices));
}

double UnicastBoundary(const LayeredNetwork& layered, std::span<const double> direction) {
  CheckDirection(direction);
  std::vector<UnicastVar> vars;
  return Boundary(UnicastLp(layered, direction, &vars));
}

MinCostResult MinCost(const LayeredNetwork& layered, std::span<const double> load) {
  MinCostResult res;
  const LpModel model = MulticastLp(layered, load, &res.vars);
  const LpSolution sol = SolveLp(model);
  if (sol.status != LpStatus::kOptimal) {
    throw InfeasibleLoad("load is outside the multicast stability region", sol.farkas, RowLabels(model));
  }
  res.cost = sol.objective;
  res.cost_exact = sol.objective_exact;
  res.flow = sol.x;
  return res;
}

double UnicastMinCost(const LayeredNetwork& layered, std::span<const double> load) {
  std::vector<UnicastVar> vars;
  const LpModel model = UnicastLp(layered, load, &vars);
  const LpSolution sol = SolveLp(model);
  if (sol.status != LpStatus::kOptimal) {
    throw InfeasibleLoad("load is outside the unicast stability region", sol.farkas, RowLabels(model));
  }
  return sol.objective;
}

std::vector<BetaEntry> BetaFromFlows(const LayeredNetwork& layered, const std::vector<FlowVar>& vars,
                                     std::span<const double> flow) {
  const Network& net = layered.network();
  std::vector<BetaEntry> out;
  for (size_t j = 0; j < vars.size(); ++j) {
    if (flow[j] <= 0) continue;
    const LayeredEdge& e = layered.edge(vars[j].edge);
    BetaEntry b;
    b.edge = vars[j].edge;
    b.choice = vars[j].choice;
    b.resource = e.physical;
    if (e.kind == LayeredEdgeKind::kProcessing) {
      b.processing = true;
      b.beta = e.rho * flow[j] / net.node(e.physical).processing_capacity;
    } else {
      b.beta = flow[j] / static_cast<double>(net.edge(e.physical).capacity);
    }
    out.push_back(b);
  }
  return out;
}

std::vector<double> ConservationResidual(const LayeredNetwork& layered,
                                         std::span<const double> load,
                                         const std::vector<FlowVar>& vars,
                                         std::span<const double> flow) {
  const int d = layered.network().num_destinations();
  std::vector<double> res(static_cast<size_t>(layered.num_nodes()) << d, 0.0);
  auto at = [&](int v, DupStatus q) -> double& { return res[(static_cast<size_t>(v) << d) | q.bits()]; };
  for (size_t j = 0; j < vars.size(); ++j) {
    const LayeredEdge& e = layered.edge(vars[j].edge);
    const DupChoice& c = vars[j].choice;
    at(e.from, c.q) -= flow[j];
    if (!c.reloaded().empty()) at(e.from, c.reloaded()) += flow[j];
    const auto [u, s] = LandingCell(layered, e.to, c.s);
    if (!s.empty()) at(u, s) += e.zeta * flow[j];
  }
  const DupStatus all = DupStatus::AllOnes(d);
  for (int i = 0; i < layered.network().num_nodes(); ++i) at(layered.NodeIndex(i, 0), all) += load[i];
  return res;
}

StatusFlowVerdict CheckNodeStatusFlows(int num_destinations,
                                       std::span<const std::pair<DupStatus, double>> incoming,
                                       std::span<const std::pair<DupStatus, double>> outgoing) {
  const int d = num_destinations;
  const uint32_t statuses = uint32_t{1} << d;
  std::vector<double> in(statuses, 0.0), out(statuses, 0.0);
  for (auto [q, f] : incoming) in[q.bits()] += f;
  for (auto [q, f] : outgoing) out[q.bits()] += f;
  StatusFlowVerdict verdict;
  verdict.aggregate_holds = true;
  for (int k = 0; k < d; ++k) {
    double a = 0.0, b = 0.0;
    for (uint32_t q = 1; q < statuses; ++q) {
      if (!DupStatus(q).has(k)) continue;
      a += in[q];
      b += out[q];
    }
    if (std::fabs(a - b) > 1e-12 * std::max(1.0, std::fabs(a))) verdict.aggregate_holds = false;
  }
  // One abstract outgoing link; choices at the node must reproduce exactly
  // the given outgoing statuses while conserving every status queue.
  LpModel model;
  const auto omega = EnumerateOmega(d);
  std::vector<std::vector<std::pair<int, double>>> cons(statuses), sent(statuses);
  for (const DupChoice& c : omega) {
    const int j = model.AddVariable(0.0);
    cons[c.q.bits()].push_back({j, -1.0});
    if (!c.reloaded().empty()) cons[c.reloaded().bits()].push_back({j, 1.0});
    sent[c.s.bits()].push_back({j, 1.0});
  }
  for (uint32_t q = 1; q < statuses; ++q) {
    model.AddRow(cons[q], RowSense::kEqual, -in[q]);
    model.AddRow(sent[q], RowSense::kEqual, out[q]);
  }
  verdict.per_status_feasible = SolveLp(model).status == LpStatus::kOptimal;
  return verdict;
}

StatusFlowVerdict CounterexampleCheck() {
  const std::pair<DupStatus, double> in[] = {{DupStatus::Parse("111"), 1.0},
                                             {DupStatus::Parse("100"), 1.0}};
  const std::pair<DupStatus, double> out[] = {{DupStatus::Parse("110"), 1.0},
                                              {DupStatus::Parse("101"), 1.0}};
  return CheckNodeStatusFlows(3, in, out);
}

}  // namespace mcnet
