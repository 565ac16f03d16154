// Per-(layered node, status) queues and the two-phase slot dynamics.
//
// Packets are stored as FIFO runs of (origin, count): every packet in a run
// descends from the same exogenous arrival. The origin keys the delay
// bookkeeping, so no per-packet payload is kept.

#ifndef MCNET_QUEUE_STATE_H_
#define MCNET_QUEUE_STATE_H_

#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcnet/network.h"
#include "mcnet/status.h"

namespace mcnet {

class InvalidDecision : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Run {
  uint64_t origin = 0;
  int64_t count = 0;
};

class RunFifo {
 public:
  int64_t size() const { return size_; }
  bool empty() const { return size_ == 0; }
  void Push(uint64_t origin, int64_t count);
  // Pops up to n packets from the front, appending runs to `out`. Returns the
  // number popped.
  int64_t Pop(int64_t n, std::vector<Run>& out);
  const std::deque<Run>& runs() const { return runs_; }

 private:
  std::deque<Run> runs_;
  int64_t size_ = 0;
};

// Flow on one layered edge under one duplication choice.
struct EdgeFlow {
  int edge = 0;  // layered edge id
  DupChoice choice;
  int64_t flow = 0;
};

struct WirelessLinkState {
  int edge = 0;  // physical edge id
  double gain = 0.0;
  double power_w = 0.0;
  bool active = false;
  int64_t capacity = 0;  // packets this slot
};

struct SlotDecision {
  std::vector<EdgeFlow> flows;
  std::vector<WirelessLinkState> wireless;

  void clear() {
    flows.clear();
    wireless.clear();
  }
};

// New packets per physical node for one slot.
struct ArrivalBatch {
  std::vector<int64_t> count;
};

struct TransmitResult {
  struct Landing {
    int node = 0;  // layered node receiving the copy
    DupStatus status;
    Run run;
  };
  std::vector<Landing> landings;  // in layered-edge order of the decision
  std::vector<Landing> reloads;
  int64_t real_popped = 0;
  int64_t dummies = 0;
};

struct ReceiveStats {
  int64_t copies_delivered = 0;
  int64_t copy_delay_sum = 0;  // slots
  int64_t packets_completed = 0;
  int64_t completion_delay_sum = 0;
  int64_t arrivals = 0;
};

class QueueState {
 public:
  QueueState(const LayeredNetwork& layered, uint64_t seed);

  int num_destinations() const { return num_destinations_; }
  int num_statuses() const { return 1 << num_destinations_; }
  int num_cells() const { return static_cast<int>(fifo_.size()); }
  int Cell(int node, DupStatus q) const { return node * num_statuses() + static_cast<int>(q.bits()); }

  int64_t backlog(int node, DupStatus q) const { return fifo_[Cell(node, q)].size(); }
  int64_t backlog_cell(int cell) const { return fifo_[cell].size(); }
  const RunFifo& fifo(int node, DupStatus q) const { return fifo_[Cell(node, q)]; }
  int64_t total_backlog() const { return total_; }
  // Sum over queues of |q| * Q^(q): copies still owed to destinations.
  int64_t weighted_total() const { return weighted_total_; }

  // Pops packets per the decision (in order) and builds in-flight copies and
  // reloads. Shortfalls become dummies. Processing outputs are scaled by the
  // function's scaling factor with a per-(node, stage) residue accumulator.
  TransmitResult Transmit(const SlotDecision& decision);

  // Lands copies in edge order (splitting at destinations), then reloads,
  // then exogenous arrivals. With `unicast_arrivals` each arrival enters as D
  // single-destination packets.
  ReceiveStats Receive(const TransmitResult& tx, const ArrivalBatch& arrivals, int64_t slot,
                       bool unicast_arrivals);

  // Cumulative real packets entering and leaving each cell.
  const std::vector<int64_t>& inflow_totals() const { return in_total_; }
  const std::vector<int64_t>& outflow_totals() const { return out_total_; }

  int64_t packets_created() const { return static_cast<int64_t>(tracks_.size()); }

  // Appends packets directly; used by tests and warm starts. Origins are fresh.
  void Inject(int node, DupStatus q, int64_t count, int64_t slot);

 private:
  struct Track {
    int64_t arrival_slot = 0;
    uint32_t delivered = 0;
  };

  void Enqueue(int node, DupStatus q, const Run& run);
  void Land(int node, DupStatus q, const Run& run, int64_t slot, ReceiveStats& stats);
  uint64_t NewOrigin(int64_t slot);

  const LayeredNetwork* layered_;
  int num_destinations_;
  uint32_t full_mask_;
  std::vector<RunFifo> fifo_;
  int64_t total_ = 0;
  int64_t weighted_total_ = 0;
  std::vector<int64_t> in_total_;
  std::vector<int64_t> out_total_;
  std::vector<Track> tracks_;
  std::vector<double> residue_;  // per processing edge
  std::vector<Run> scratch_;
};

// Throws InvalidDecision on negative flows, invalid or out-of-range choices,
// selected statuses that cannot exist at the node, or capacity violations.
// `link_capacity` gives the per-physical-edge capacity for this slot.
void ValidateDecision(const LayeredNetwork& layered, const SlotDecision& decision,
                      std::span<const int64_t> link_capacity);

// Operational cost of a slot: per-packet link costs, processing resource
// costs and wireless transmit energy over active links.
double SlotCost(const LayeredNetwork& layered, const SlotDecision& decision,
                double slot_seconds);

// Delay estimator sum_q |q| Q^(q) / (D * total rate). Throws when the rate is 0.
double WeightedBacklog(const QueueState& state, double total_rate);

}  // namespace mcnet

#endif  // MCNET_QUEUE_STATE_H_
