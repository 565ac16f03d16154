#include "mcnet/queue_state.h"

#include <algorithm>
#include <cmath>

#include "mcnet/rng.h"

namespace mcnet {

void RunFifo::Push(uint64_t origin, int64_t count) {
  if (count <= 0) return;
  if (!runs_.empty() && runs_.back().origin == origin) {
    runs_.back().count += count;
  } else {
    runs_.push_back({origin, count});
  }
  size_ += count;
}

int64_t RunFifo::Pop(int64_t n, std::vector<Run>& out) {
  int64_t popped = 0;
  while (popped < n && !runs_.empty()) {
    Run& front = runs_.front();
    const int64_t take = std::min(front.count, n - popped);
    out.push_back({front.origin, take});
    front.count -= take;
    popped += take;
    if (front.count == 0) runs_.pop_front();
  }
  size_ -= popped;
  return popped;
}

QueueState::QueueState(const LayeredNetwork& layered, uint64_t seed)
    : layered_(&layered),
      num_destinations_(layered.network().num_destinations()),
      full_mask_(DupStatus::AllOnes(layered.network().num_destinations()).bits()) {
  const size_t cells = static_cast<size_t>(layered.num_nodes()) << num_destinations_;
  fifo_.resize(cells);
  in_total_.assign(cells, 0);
  out_total_.assign(cells, 0);
  residue_.resize(layered.num_processing_edges());
  for (size_t p = 0; p < residue_.size(); ++p) {
    residue_[p] = CounterRng(seed, RngStream::kRounding, p).Uniform();
  }
}

void QueueState::Enqueue(int node, DupStatus q, const Run& run) {
  if (q.empty() || run.count <= 0) return;
  const int cell = Cell(node, q);
  fifo_[cell].Push(run.origin, run.count);
  in_total_[cell] += run.count;
  total_ += run.count;
  weighted_total_ += run.count * q.count();
}

uint64_t QueueState::NewOrigin(int64_t slot) {
  tracks_.push_back({slot, 0});
  return tracks_.size() - 1;
}

void QueueState::Inject(int node, DupStatus q, int64_t count, int64_t slot) {
  for (int64_t c = 0; c < count; ++c) Enqueue(node, q, Run{NewOrigin(slot), 1});
}

TransmitResult QueueState::Transmit(const SlotDecision& decision) {
  TransmitResult tx;
  std::vector<const EdgeFlow*> order;
  order.reserve(decision.flows.size());
  for (const EdgeFlow& f : decision.flows) order.push_back(&f);
  std::stable_sort(order.begin(), order.end(),
                   [](const EdgeFlow* a, const EdgeFlow* b) { return a->edge < b->edge; });
  const int first_processing = layered_->num_transmission_edges();
  for (const EdgeFlow* f : order) {
    if (f->flow <= 0) continue;
    const LayeredEdge& e = layered_->edge(f->edge);
    const int cell = Cell(e.from, f->choice.q);
    scratch_.clear();
    const int64_t popped = fifo_[cell].Pop(f->flow, scratch_);
    out_total_[cell] += popped;
    total_ -= popped;
    weighted_total_ -= popped * f->choice.q.count();
    tx.real_popped += popped;
    tx.dummies += f->flow - popped;
    const DupStatus reload = f->choice.reloaded();
    for (const Run& run : scratch_) {
      if (e.kind == LayeredEdgeKind::kTransmission) {
        tx.landings.push_back({e.to, f->choice.s, run});
      } else {
        double& acc = residue_[f->edge - first_processing];
        const double total = acc + static_cast<double>(run.count) * e.zeta;
        const double out = std::floor(total);
        acc = total - out;
        if (out > 0) tx.landings.push_back({e.to, f->choice.s, Run{run.origin, static_cast<int64_t>(out)}});
      }
      if (!reload.empty()) tx.reloads.push_back({e.from, reload, run});
    }
  }
  return tx;
}

void QueueState::Land(int node, DupStatus q, const Run& run, int64_t slot, ReceiveStats& stats) {
  const int k = layered_->DestinationIndex(node);
  if (k >= 0) {
    if (auto split = DestinationArrivalSplit(q, k)) {
      Track& track = tracks_[run.origin];
      stats.copies_delivered += run.count;
      stats.copy_delay_sum += run.count * (slot - track.arrival_slot);
      const bool was_complete = track.delivered == full_mask_;
      track.delivered |= split->departing.bits();
      if (!was_complete && track.delivered == full_mask_) {
        ++stats.packets_completed;
        stats.completion_delay_sum += slot - track.arrival_slot;
      }
      Enqueue(node, split->reloaded, run);
      return;
    }
  }
  Enqueue(node, q, run);
}

ReceiveStats QueueState::Receive(const TransmitResult& tx, const ArrivalBatch& arrivals,
                                 int64_t slot, bool unicast_arrivals) {
  ReceiveStats stats;
  for (const auto& l : tx.landings) Land(l.node, l.status, l.run, slot, stats);
  for (const auto& l : tx.reloads) Enqueue(l.node, l.status, l.run);
  const DupStatus all = DupStatus(full_mask_);
  for (size_t i = 0; i < arrivals.count.size(); ++i) {
    const int64_t c = arrivals.count[i];
    if (c <= 0) continue;
    const int v = layered_->NodeIndex(static_cast<int>(i), 0);
    stats.arrivals += c;
    for (int64_t p = 0; p < c; ++p) {
      const uint64_t origin = NewOrigin(slot);
      if (unicast_arrivals) {
        for (int k = 0; k < num_destinations_; ++k) Land(v, DupStatus::Single(k), Run{origin, 1}, slot, stats);
      } else {
        Land(v, all, Run{origin, 1}, slot, stats);
      }
    }
  }
  return stats;
}

void ValidateDecision(const LayeredNetwork& layered, const SlotDecision& decision,
                      std::span<const int64_t> link_capacity) {
  const Network& net = layered.network();
  const uint32_t full = DupStatus::AllOnes(net.num_destinations()).bits();
  std::vector<int64_t> link_load(net.num_edges(), 0);
  std::vector<int> link_choices(net.num_edges(), 0);
  std::vector<double> node_load(net.num_nodes(), 0.0);
  std::vector<int> node_choices(net.num_nodes(), 0);
  for (const EdgeFlow& f : decision.flows) {
    if (f.edge < 0 || f.edge >= layered.num_edges()) throw InvalidDecision("flow on unknown layered edge");
    if (f.flow < 0) throw InvalidDecision("negative flow on layered edge " + std::to_string(f.edge));
    if (!f.choice.valid() || (f.choice.q.bits() & ~full) != 0) {
      throw InvalidDecision("invalid duplication choice on layered edge " + std::to_string(f.edge));
    }
    const LayeredEdge& e = layered.edge(f.edge);
    const int k = layered.DestinationIndex(e.from);
    if (k >= 0 && f.choice.q.has(k)) {
      throw InvalidDecision("destination " + std::to_string(k + 1) +
                            " cannot hold a status that still includes it");
    }
    if (f.flow == 0) continue;
    if (e.kind == LayeredEdgeKind::kTransmission) {
      link_load[e.physical] += f.flow;
      ++link_choices[e.physical];
    } else {
      node_load[e.physical] += e.rho * static_cast<double>(f.flow);
      ++node_choices[e.physical];
    }
  }
  for (int e = 0; e < net.num_edges(); ++e) {
    if (link_choices[e] > 1) throw InvalidDecision("more than one active choice on link " + std::to_string(e));
    if (link_load[e] > link_capacity[e]) {
      throw InvalidDecision("link " + net.node(net.edge(e).from).name + "->" +
                            net.node(net.edge(e).to).name + " over capacity: " +
                            std::to_string(link_load[e]) + " > " + std::to_string(link_capacity[e]));
    }
  }
  for (int i = 0; i < net.num_nodes(); ++i) {
    if (node_choices[i] > 1) throw InvalidDecision("more than one processing choice at node " + net.node(i).name);
    const double cap = net.node(i).processing_capacity;
    if (node_load[i] > cap * (1 + 1e-9) + 1e-12) {
      throw InvalidDecision("processing at node " + net.node(i).name + " over capacity");
    }
  }
  for (const WirelessLinkState& w : decision.wireless) {
    if (w.edge < 0 || w.edge >= net.num_edges() || !net.edge(w.edge).wireless) {
      throw InvalidDecision("wireless state on a non-wireless link");
    }
    if (w.power_w < 0 || w.capacity < 0) throw InvalidDecision("negative wireless power or capacity");
    if (link_load[w.edge] > 0 && !w.active) throw InvalidDecision("flow on an inactive wireless link");
  }
}

double SlotCost(const LayeredNetwork& layered, const SlotDecision& decision, double slot_seconds) {
  const Network& net = layered.network();
  double cost = 0.0;
  for (const EdgeFlow& f : decision.flows) {
    const LayeredEdge& e = layered.edge(f.edge);
    if (e.kind == LayeredEdgeKind::kTransmission) {
      cost += net.edge(e.physical).cost * static_cast<double>(f.flow);
    } else {
      cost += net.node(e.physical).processing_cost * e.rho * static_cast<double>(f.flow);
    }
  }
  for (const WirelessLinkState& w : decision.wireless) {
    if (!w.active) continue;
    cost += net.node(net.edge(w.edge).from).energy_cost_per_j * slot_seconds * w.power_w;
  }
  return cost;
}

double WeightedBacklog(const QueueState& state, double total_rate) {
  if (!(total_rate > 0)) throw InvalidInput("weighted backlog needs a positive total arrival rate");
  return static_cast<double>(state.weighted_total()) / (state.num_destinations() * total_rate);
}

}  // namespace mcnet
