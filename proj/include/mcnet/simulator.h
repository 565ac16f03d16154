// Slotted simulation loop and run metrics.
//
// Per slot: record the slot-start backlog, move users and draw channel gains,
// let the policy decide, validate, transmit, then land copies, reloads and
// new arrivals. The first 20% of slots are excluded from averages.

#ifndef MCNET_SIMULATOR_H_
#define MCNET_SIMULATOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mcnet/network.h"
#include "mcnet/policy.h"
#include "mcnet/queue_state.h"
#include "mcnet/rng.h"
#include "mcnet/scenario.h"

namespace mcnet {

enum class StabilityVerdict { kStable, kUnstable, kInconclusive };

std::string VerdictName(StabilityVerdict verdict);

// Least-squares slope over the second half of the series, times the window
// length, divided by the window mean: how much the backlog rose across the
// window relative to its level. Zero for an all-zero window.
double RelativeRise(std::span<const double> series);

// Standard error of RelativeRise from a regression on `batches` batch means
// of the same window, so autocorrelated noise is not mistaken for a trend.
double RelativeRiseStdError(std::span<const double> series, int batches = 20);

struct VerdictThresholds {
  double stable_rise = 0.2;
  double unstable_rise = 0.5;
  double significance = 3.0;  // standard errors
  int batches = 20;
  int64_t min_length = 10000;
};

// Series shorter than 10^4 slots are inconclusive. Otherwise, with rise R
// and standard error se:
//   R <= 0.2, or R < 0.5 with R <= 3 se   -> stable
//   R >= 0.5 with R > 3 se                -> unstable
//   anything else                         -> inconclusive
StabilityVerdict ClassifyStability(std::span<const double> series, const VerdictThresholds& t = {});

struct SimOptions {
  int64_t slots = 10000;
  uint64_t seed = 1;
  double warmup_fraction = 0.2;
  int64_t thinning = 100;  // keep every n-th slot in the exported series
  int flow_batches = 20;   // batches for the conservation statistics
  bool validate = true;
};

// Time-averaged in + arrivals - out for one queue over the measurement
// window, with the batch-means standard error.
struct CellFlowStat {
  int node = 0;  // layered node
  DupStatus status;
  double residual = 0.0;  // packets per slot
  double sigma = 0.0;
  double throughput = 0.0;  // mean outflow per slot
};

struct RunMetrics {
  std::string policy;
  uint64_t seed = 0;
  int64_t slots = 0;
  int64_t warmup = 0;
  double slot_seconds = 0.0;

  double avg_cost = 0.0;
  double avg_backlog = 0.0;
  // sum |q| Q / (D * total rate), averaged: the backlog-based delay estimate.
  double delay_estimate_slots = 0.0;
  double avg_copy_delay_slots = 0.0;
  double avg_completion_delay_slots = 0.0;
  int64_t arrivals = 0;
  int64_t delivered_copies = 0;
  int64_t completed_packets = 0;
  int64_t dummies = 0;

  StabilityVerdict verdict = StabilityVerdict::kInconclusive;
  double relative_rise = 0.0;
  double rise_stderr = 0.0;

  std::vector<double> backlog_series;  // every `thinning` slots
  std::vector<double> weighted_series;  // sum |q| Q at the same slots
  std::vector<double> cost_series;
  std::vector<CellFlowStat> flow_stats;  // cells with traffic in the window
};

using PolicyFactory =
    std::function<std::unique_ptr<Policy>(const Scenario&, const LayeredNetwork&)>;

class Simulator {
 public:
  Simulator(const Scenario& scenario, const PolicyFactory& factory, const SimOptions& options);
  Simulator(const Scenario& scenario, const PolicyConfig& config, const SimOptions& options);

  void Step();
  int64_t slot() const { return slot_; }
  const QueueState& state() const { return *state_; }
  const LayeredNetwork& layered() const { return *layered_; }
  const SlotDecision& last_decision() const { return decision_; }
  // Called after each validated decision, before it is applied.
  void set_observer(std::function<void(int64_t, const SlotDecision&)> observer) {
    observer_ = std::move(observer);
  }

  // Runs the remaining slots and returns the metrics.
  RunMetrics Finish();

 private:
  void DrawArrivals();
  void UpdateChannels();
  void SnapshotFlows();

  Scenario scenario_;
  SimOptions options_;
  std::unique_ptr<LayeredNetwork> layered_;
  std::unique_ptr<QueueState> state_;
  std::unique_ptr<Policy> policy_;
  std::function<void(int64_t, const SlotDecision&)> observer_;
  int64_t slot_ = 0;
  int64_t warmup_ = 0;
  SlotDecision decision_;
  ArrivalBatch arrivals_;
  std::vector<CounterRng> arrival_rng_;
  std::vector<std::poisson_distribution<int64_t>> poisson_;
  std::vector<CounterRng> fading_rng_;
  std::vector<CounterRng> mobility_rng_;
  std::vector<std::optional<Point>> positions_;
  std::vector<double> gains_;
  std::vector<int64_t> capacity_;

  // Accumulators over the measurement window.
  double cost_sum_ = 0.0;
  double backlog_sum_ = 0.0;
  double weighted_sum_ = 0.0;
  ReceiveStats window_;
  int64_t dummies_ = 0;
  std::vector<double> full_backlog_;
  RunMetrics metrics_;
  std::vector<std::vector<int64_t>> flow_in_snapshots_;
  std::vector<std::vector<int64_t>> flow_out_snapshots_;
  std::vector<int64_t> snapshot_slots_;
};

RunMetrics Run(const Scenario& scenario, const PolicyConfig& config, const SimOptions& options);

}  // namespace mcnet

#endif  // MCNET_SIMULATOR_H_
