#include "mcnet/policy.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "mcnet/wireless.h"

namespace mcnet {

PolicyKind ParsePolicyKind(const std::string& name) {
  if (name == "gdcnc") return PolicyKind::kGdcnc;
  if (name == "gdcnc-r") return PolicyKind::kGdcncR;
  if (name == "egdcnc") return PolicyKind::kEgdcnc;
  if (name == "egdcnc-r") return PolicyKind::kEgdcncR;
  if (name == "dcnc") return PolicyKind::kDcnc;
  if (name == "edspa") return PolicyKind::kEdspa;
  throw InvalidInput("unknown policy '" + name +
                     "' (expected gdcnc, gdcnc-r, egdcnc, egdcnc-r, dcnc or edspa)");
}

std::string PolicyKindName(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kGdcnc:
      return "gdcnc";
    case PolicyKind::kGdcncR:
      return "gdcnc-r";
    case PolicyKind::kEgdcnc:
      return "egdcnc";
    case PolicyKind::kEgdcncR:
      return "egdcnc-r";
    case PolicyKind::kDcnc:
      return "dcnc";
    case PolicyKind::kEdspa:
      return "edspa";
  }
  return "?";
}

void PolicyConfig::Validate() const {
  if (!std::isfinite(V) || V < 0) throw InvalidInput("V must be finite and >= 0");
  if (!std::isfinite(eta) || eta < 0) throw InvalidInput("eta must be finite and >= 0");
  if (num_trees < 1) throw InvalidInput("number of duplication trees must be >= 1");
}

double BiasedBacklog(double backlog, DupStatus q, std::span<const int64_t> hops, double eta) {
  double bias = 0.0;
  for (size_t k = 0; k < hops.size(); ++k) {
    if (q.has(static_cast<int>(k))) bias += static_cast<double>(hops[k]);
  }
  return q.count() * backlog + eta * bias;
}

QueueView::QueueView(const LayeredNetwork& layered, bool biased, double eta, bool normalize)
    : layered_(&layered),
      d_(layered.network().num_destinations()),
      biased_(biased),
      eta_(eta),
      normalize_(normalize) {
  if (biased_) hops_ = HopDistances(layered);
  values_.assign(static_cast<size_t>(layered.num_nodes()) << d_, 0.0);
}

DupStatus QueueView::Alias(int node, DupStatus q) const {
  const int k = layered_->DestinationIndex(node);
  return k >= 0 && q.has(k) ? q - DupStatus::Single(k) : q;
}

void QueueView::Refresh(const QueueState& state) {
  const uint32_t statuses = uint32_t{1} << d_;
  for (int v = 0; v < layered_->num_nodes(); ++v) {
    const double scale = normalize_ ? 1.0 / layered_->CumulativeScaling(layered_->StageOf(v)) : 1.0;
    for (uint32_t bits = 0; bits < statuses; ++bits) {
      const DupStatus q = Alias(v, DupStatus(bits));
      double value = 0.0;
      if (!q.empty()) {
        const double backlog = static_cast<double>(state.backlog(v, q));
        value = biased_ ? BiasedBacklog(backlog, q, hops_[v], eta_) : backlog;
      }
      values_[(static_cast<size_t>(v) << d_) | bits] = value * scale;
    }
  }
}

double GdcncWeight(const QueueView& view, const LayeredEdge& edge, DupChoice choice,
                   double v_times_cost) {
  return view(edge.from, choice.q) - view(edge.from, choice.reloaded()) - view(edge.to, choice.s) -
         v_times_cost;
}

double ProcessingWeight(const QueueView& view, const LayeredEdge& edge, DupChoice choice,
                        double v_times_cost) {
  return (view(edge.from, choice.q) - edge.zeta * view(edge.to, choice.s) -
          view(edge.from, choice.reloaded())) /
             edge.rho -
         v_times_cost;
}

namespace {

bool Holdable(const LayeredNetwork& layered, int node, DupStatus q) {
  const int k = layered.DestinationIndex(node);
  return k < 0 || !q.has(k);
}

}  // namespace

WeightedChoice BestTransmission(const QueueView& view, const LayeredNetwork& layered,
                                int physical_edge, std::span<const DupChoice> choices,
                                double v_times_cost) {
  WeightedChoice best;
  const auto copies = layered.TransmissionEdgesOf(physical_edge);
  for (const DupChoice& c : choices) {
    for (int le : copies) {
      const LayeredEdge& e = layered.edge(le);
      if (!Holdable(layered, e.from, c.q)) continue;
      const double w = GdcncWeight(view, e, c, v_times_cost);
      if (w > best.weight) best = {le, c, w};
    }
  }
  return best;
}

WeightedChoice BestProcessing(const QueueView& view, const LayeredNetwork& layered, int node,
                              std::span<const DupChoice> choices, double v_times_cost) {
  WeightedChoice best;
  const auto copies = layered.ProcessingEdgesOf(node);
  for (const DupChoice& c : choices) {
    for (int le : copies) {
      const LayeredEdge& e = layered.edge(le);
      if (!Holdable(layered, e.from, c.q)) continue;
      const double w = ProcessingWeight(view, e, c, v_times_cost);
      if (w > best.weight) best = {le, c, w};
    }
  }
  return best;
}

std::vector<DupChoice> TreeChoiceSet(const std::vector<DupTree>& trees) {
  if (trees.empty()) throw InvalidInput("empty duplication tree set");
  std::set<DupChoice> set;
  for (const DupTree& t : trees) {
    for (const DupChoice& c : TreeChoices(t)) set.insert(c);
  }
  // Statuses that own at least one choice, and the closure under removing a
  // single destination bit (what a destination split leaves behind).
  std::set<DupStatus> owned;
  std::vector<DupStatus> pending;
  for (const DupChoice& c : set) owned.insert(c.q);
  for (const DupChoice& c : set) pending.push_back(c.s);
  while (!pending.empty()) {
    const DupStatus z = pending.back();
    pending.pop_back();
    for (int k = 0; k < kMaxDestinations; ++k) {
      if (!z.has(k)) continue;
      const DupStatus rest = z - DupStatus::Single(k);
      if (rest.empty() || owned.count(rest)) continue;
      owned.insert(rest);
      set.insert({rest, rest});
      pending.push_back(rest);
    }
  }
  return {set.begin(), set.end()};
}

std::vector<DupChoice> UnicastChoiceSet(int num_destinations) {
  std::vector<DupChoice> out;
  for (int k = 0; k < num_destinations; ++k) out.push_back({DupStatus::Single(k), DupStatus::Single(k)});
  return out;
}

std::vector<uint32_t> EdspaEdgeMasks(const LayeredNetwork& layered) {
  const HopTable hops = HopDistances(layered);
  const Network& net = layered.network();
  const int d = net.num_destinations();
  for (int src : net.sources()) {
    for (int k = 0; k < d; ++k) {
      if (hops[layered.NodeIndex(src, 0)][k] >= kUnreachableHops) {
        throw InvalidInput("destination '" + net.node(net.destinations()[k]).name +
                           "' is unreachable from source '" + net.node(src).name + "'");
      }
    }
  }
  std::vector<uint32_t> mask(layered.num_edges(), 0);
  for (int v = 0; v < layered.num_nodes(); ++v) {
    for (int k = 0; k < d; ++k) {
      const int64_t h = hops[v][k];
      if (h == 0 || h >= kUnreachableHops) continue;
      int best_edge = -1;
      for (int e : layered.out_edges(v)) {
        const int u = layered.edge(e).to;
        if (hops[u][k] != h - 1) continue;
        if (best_edge < 0 || u < layered.edge(best_edge).to) best_edge = e;
      }
      if (best_edge >= 0) mask[best_edge] |= uint32_t{1} << k;
    }
  }
  return mask;
}

namespace {

int64_t ProcessingFlow(double capacity, double rho) {
  return static_cast<int64_t>(std::floor(capacity / rho + 1e-9));
}

// Wireless out-links grouped by transmitter.
struct WirelessGroup {
  int node = 0;
  std::vector<int> edges;
};

std::vector<WirelessGroup> GroupWireless(const Network& net) {
  std::vector<WirelessGroup> groups;
  for (int i = 0; i < net.num_nodes(); ++i) {
    WirelessGroup g{i, {}};
    for (int e : net.out_edges(i)) {
      if (net.edge(e).wireless) g.edges.push_back(e);
    }
    if (!g.edges.empty()) groups.push_back(std::move(g));
  }
  return groups;
}

// Power and activation for one transmitter given per-link weights. Returns
// the per-link power (zero when inactive) and activation flags.
void AssignWirelessPower(const WirelessParams& params, const Node& tx, PowerMode mode,
                         double V, std::span<const LinkChannel> links,
                         std::vector<double>& power, std::vector<char>& active) {
  const size_t n = links.size();
  power.assign(n, 0.0);
  active.assign(n, 0);
  const double price = tx.energy_cost_per_j * V;
  const double budget = tx.power_budget_w;
  if (tx.kind == NodeKind::kUserEquipment) {
    std::vector<double> candidate(n, 0.0), psi(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
      candidate[j] = mode == PowerMode::kOptimal ? SingleLinkPower(params, links[j], price, budget)
                                                 : (links[j].weight > 0 ? budget : 0.0);
      psi[j] = LinkUtility(params, links[j], price, candidate[j]);
    }
    const int j = ActivateSingleLink(psi);
    if (j >= 0) {
      power[j] = candidate[j];
      active[j] = 1;
    }
    return;
  }
  if (mode == PowerMode::kOptimal) {
    power = AllocatePower(params, links, price, budget).power;
  } else {
    const auto positive = std::count_if(links.begin(), links.end(), [](const LinkChannel& l) {
      return l.weight > 0 && l.gain > 0;
    });
    for (size_t j = 0; j < n; ++j) {
      if (links[j].weight > 0 && links[j].gain > 0) power[j] = budget / static_cast<double>(positive);
    }
  }
  active.assign(n, 1);
}

class MaxWeightPolicy : public Policy {
 public:
  MaxWeightPolicy(const Scenario& scenario, const LayeredNetwork& layered,
                  const PolicyConfig& config)
      : layered_(&layered),
        config_(config),
        wireless_(scenario.wireless),
        view_(layered, config.kind == PolicyKind::kEgdcnc || config.kind == PolicyKind::kEgdcncR,
              config.eta, config.normalize),
        groups_(GroupWireless(layered.network())) {
    const int d = layered.network().num_destinations();
    switch (config.kind) {
      case PolicyKind::kGdcncR:
      case PolicyKind::kEgdcncR:
        choices_ = TreeChoiceSet(
            BuildDuplicationTrees(layered.network(), config.num_trees, config.metric, config.cluster_seed));
        break;
      case PolicyKind::kDcnc:
        choices_ = UnicastChoiceSet(d);
        break;
      default:
        choices_ = EnumerateOmega(d);
        break;
    }
  }

  void Decide(const PolicyInput& input, SlotDecision& decision) override {
    decision.clear();
    view_.Refresh(*input.state);
    const Network& net = layered_->network();
    for (int e = 0; e < net.num_edges(); ++e) {
      const Edge& edge = net.edge(e);
      if (edge.wireless || edge.capacity <= 0) continue;
      const WeightedChoice best = BestTransmission(view_, *layered_, e, choices_, config_.V * edge.cost);
      if (best.weight > 0) decision.flows.push_back({best.edge, best.choice, edge.capacity});
    }
    if (!groups_.empty()) DecideWireless(input, decision);
    if (layered_->num_stages() > 1) {
      for (int i = 0; i < net.num_nodes(); ++i) {
        const Node& node = net.node(i);
        if (node.processing_capacity <= 0) continue;
        const WeightedChoice best =
            BestProcessing(view_, *layered_, i, choices_, config_.V * node.processing_cost);
        if (best.weight <= 0) continue;
        const int64_t flow = ProcessingFlow(node.processing_capacity, layered_->edge(best.edge).rho);
        if (flow > 0) decision.flows.push_back({best.edge, best.choice, flow});
      }
    }
  }

  bool unicast_arrivals() const override { return config_.kind == PolicyKind::kDcnc; }
  std::string name() const override { return PolicyKindName(config_.kind); }

 private:
  void DecideWireless(const PolicyInput& input, SlotDecision& decision) {
    const Network& net = layered_->network();
    for (const WirelessGroup& g : groups_) {
      best_.clear();
      links_.clear();
      for (int e : g.edges) {
        // Energy replaces the per-packet cost on wireless links.
        best_.push_back(BestTransmission(view_, *layered_, e, choices_, 0.0));
        links_.push_back({std::max(best_.back().weight, 0.0), input.gains[e]});
      }
      AssignWirelessPower(*wireless_, net.node(g.node), wireless_->power_mode, config_.V, links_,
                          power_, active_);
      for (size_t j = 0; j < g.edges.size(); ++j) {
        const int e = g.edges[j];
        WirelessLinkState st{e, links_[j].gain, active_[j] ? power_[j] : 0.0, active_[j] != 0, 0};
        st.capacity = WirelessCapacity(*wireless_, st.power_w, st.gain);
        decision.wireless.push_back(st);
        if (st.active && best_[j].weight > 0 && st.capacity > 0) {
          decision.flows.push_back({best_[j].edge, best_[j].choice, st.capacity});
        }
      }
    }
  }

  const LayeredNetwork* layered_;
  PolicyConfig config_;
  std::optional<WirelessParams> wireless_;
  QueueView view_;
  std::vector<DupChoice> choices_;
  std::vector<WirelessGroup> groups_;
  std::vector<WeightedChoice> best_;
  std::vector<LinkChannel> links_;
  std::vector<double> power_;
  std::vector<char> active_;
};

// Static shortest-path-union routing with duplication at branch points.
class EdspaPolicy : public Policy {
 public:
  EdspaPolicy(const Scenario& scenario, const LayeredNetwork& layered)
      : layered_(&layered),
        wireless_(scenario.wireless),
        mask_(EdspaEdgeMasks(layered)),
        groups_(GroupWireless(layered.network())) {}

  void Decide(const PolicyInput& input, SlotDecision& decision) override {
    decision.clear();
    const Network& net = layered_->network();
    const QueueState& state = *input.state;
    for (int e = 0; e < net.num_edges(); ++e) {
      const Edge& edge = net.edge(e);
      if (edge.wireless || edge.capacity <= 0) continue;
      const Pick p = PickLargest(state, layered_->TransmissionEdgesOf(e));
      if (p.backlog > 0) decision.flows.push_back({p.edge, p.choice, std::min(edge.capacity, p.backlog)});
    }
    for (const WirelessGroup& g : groups_) {
      picks_.clear();
      links_.clear();
      for (int e : g.edges) {
        picks_.push_back(PickLargest(state, layered_->TransmissionEdgesOf(e)));
        links_.push_back({static_cast<double>(picks_.back().backlog), input.gains[e]});
      }
      // Fixed routes, no cost trade-off: full budget, shared evenly.
      AssignWirelessPower(*wireless_, net.node(g.node), PowerMode::kUniform, 0.0, links_, power_,
                          active_);
      for (size_t j = 0; j < g.edges.size(); ++j) {
        WirelessLinkState st{g.edges[j], links_[j].gain, active_[j] ? power_[j] : 0.0, active_[j] != 0, 0};
        st.capacity = WirelessCapacity(*wireless_, st.power_w, st.gain);
        decision.wireless.push_back(st);
        if (st.active && picks_[j].backlog > 0 && st.capacity > 0) {
          decision.flows.push_back({picks_[j].edge, picks_[j].choice, std::min(st.capacity, picks_[j].backlog)});
        }
      }
    }
    for (int i = 0; i < net.num_nodes(); ++i) {
      const Node& node = net.node(i);
      if (node.processing_capacity <= 0 || layered_->num_stages() == 1) continue;
      const Pick p = PickLargest(state, layered_->ProcessingEdgesOf(i));
      if (p.backlog <= 0) continue;
      const int64_t cap = ProcessingFlow(node.processing_capacity, layered_->edge(p.edge).rho);
      if (cap > 0) decision.flows.push_back({p.edge, p.choice, std::min(cap, p.backlog)});
    }
  }

  std::string name() const override { return "edspa"; }

 private:
  struct Pick {
    int edge = -1;
    DupChoice choice;
    int64_t backlog = 0;
  };

  // Largest queue whose status intersects the edge's routed destinations.
  Pick PickLargest(const QueueState& state, std::span<const int> edges) const {
    Pick best;
    const uint32_t statuses = uint32_t{1} << state.num_destinations();
    for (uint32_t bits = 1; bits < statuses; ++bits) {
      const DupStatus q(bits);
      for (int le : edges) {
        const DupStatus s = q & DupStatus(mask_[le]);
        if (s.empty()) continue;
        const int64_t b = state.backlog(layered_->edge(le).from, q);
        if (b > best.backlog) best = {le, {q, s}, b};
      }
    }
    return best;
  }

  const LayeredNetwork* layered_;
  std::optional<WirelessParams> wireless_;
  std::vector<uint32_t> mask_;
  std::vector<WirelessGroup> groups_;
  std::vector<Pick> picks_;
  std::vector<LinkChannel> links_;
  std::vector<double> power_;
  std::vector<char> active_;
};

class RandomizedPolicy : public Policy {
 public:
  RandomizedPolicy(const LayeredNetwork& layered, std::vector<BetaEntry> beta, uint64_t seed)
      : layered_(&layered) {
    const Network& net = layered.network();
    if (net.has_wireless()) throw InvalidInput("randomized policy needs fixed link capacities");
    const int resources = net.num_edges() + net.num_nodes();
    by_resource_.resize(resources);
    for (const BetaEntry& b : beta) {
      if (!(b.beta >= 0) || !std::isfinite(b.beta)) throw InvalidInput("beta must be finite and >= 0");
      if (b.beta == 0) continue;
      const int r = b.processing ? net.num_edges() + b.resource : b.resource;
      by_resource_.at(r).push_back(b);
    }
    for (int r = 0; r < resources; ++r) {
      double sum = 0.0;
      for (const BetaEntry& b : by_resource_[r]) sum += b.beta;
      if (sum > 1.0 + 1e-9) throw InvalidInput("beta probabilities exceed 1 on a resource");
      rng_.emplace_back(seed, RngStream::kRandomizedPolicy, static_cast<uint64_t>(r));
    }
  }

  void Decide(const PolicyInput&, SlotDecision& decision) override {
    decision.clear();
    const Network& net = layered_->network();
    for (size_t r = 0; r < by_resource_.size(); ++r) {
      double u = rng_[r].Uniform();
      for (const BetaEntry& b : by_resource_[r]) {
        if (u < b.beta) {
          int64_t flow;
          if (b.processing) {
            flow = ProcessingFlow(net.node(b.resource).processing_capacity, layered_->edge(b.edge).rho);
          } else {
            flow = net.edge(b.resource).capacity;
          }
          if (flow > 0) decision.flows.push_back({b.edge, b.choice, flow});
          break;
        }
        u -= b.beta;
      }
    }
  }

  std::string name() const override { return "randomized"; }

 private:
  const LayeredNetwork* layered_;
  std::vector<std::vector<BetaEntry>> by_resource_;
  std::vector<CounterRng> rng_;
};

}  // namespace

std::unique_ptr<Policy> MakePolicy(const Scenario& scenario, const LayeredNetwork& layered,
                                   const PolicyConfig& config) {
  config.Validate();
  if (config.kind == PolicyKind::kEdspa) return std::make_unique<EdspaPolicy>(scenario, layered);
  return std::make_unique<MaxWeightPolicy>(scenario, layered, config);
}

std::unique_ptr<Policy> MakeRandomizedPolicy(const LayeredNetwork& layered,
                                             std::vector<BetaEntry> beta, uint64_t seed) {
  return std::make_unique<RandomizedPolicy>(layered, std::move(beta), seed);
}

}  // namespace mcnet
