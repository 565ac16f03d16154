#include "mcnet/simulator.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcnet/wireless.h"

namespace mcnet {

std::string VerdictName(StabilityVerdict verdict) {
  switch (verdict) {
    case StabilityVerdict::kStable:
      return "stable";
    case StabilityVerdict::kUnstable:
      return "unstable";
    case StabilityVerdict::kInconclusive:
      return "inconclusive";
  }
  return "?";
}

double RelativeRise(std::span<const double> series) {
  const size_t n = series.size();
  if (n < 4) return 0.0;
  const auto window = series.subspan(n / 2);
  const double w = static_cast<double>(window.size());
  const double tbar = (w - 1) / 2;
  double mean = 0.0;
  for (double v : window) mean += v;
  mean /= w;
  if (mean <= 0) return 0.0;
  double num = 0.0, den = 0.0;
  for (size_t t = 0; t < window.size(); ++t) {
    const double dt = static_cast<double>(t) - tbar;
    num += dt * (window[t] - mean);
    den += dt * dt;
  }
  return num / den * w / mean;
}

double RelativeRiseStdError(std::span<const double> series, int batches) {
  const size_t n = series.size();
  const auto window = series.subspan(n / 2);
  if (batches < 3 || window.size() < static_cast<size_t>(batches)) return 0.0;
  double mean = 0.0;
  for (double v : window) mean += v;
  mean /= static_cast<double>(window.size());
  if (mean <= 0) return 0.0;
  const size_t len = window.size() / batches;
  std::vector<double> t(batches), y(batches);
  for (int b = 0; b < batches; ++b) {
    double sum = 0.0;
    for (size_t i = 0; i < len; ++i) sum += window[b * len + i];
    y[b] = sum / static_cast<double>(len);
    t[b] = (static_cast<double>(b) + 0.5) * static_cast<double>(len);
  }
  const double tbar = std::accumulate(t.begin(), t.end(), 0.0) / batches;
  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / batches;
  double sxx = 0.0, sxy = 0.0;
  for (int b = 0; b < batches; ++b) {
    sxx += (t[b] - tbar) * (t[b] - tbar);
    sxy += (t[b] - tbar) * (y[b] - ybar);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (int b = 0; b < batches; ++b) {
    const double r = y[b] - ybar - slope * (t[b] - tbar);
    ss += r * r;
  }
  const double se_slope = std::sqrt(ss / (batches - 2) / sxx);
  return se_slope * static_cast<double>(window.size()) / mean;
}

StabilityVerdict ClassifyStability(std::span<const double> series, const VerdictThresholds& t) {
  if (static_cast<int64_t>(series.size()) < t.min_length) return StabilityVerdict::kInconclusive;
  const double rise = RelativeRise(series);
  if (rise <= t.stable_rise) return StabilityVerdict::kStable;
  const double noise = t.significance * RelativeRiseStdError(series, t.batches);
  if (rise >= t.unstable_rise) return rise > noise ? StabilityVerdict::kUnstable : StabilityVerdict::kInconclusive;
  return rise <= noise ? StabilityVerdict::kStable : StabilityVerdict::kInconclusive;
}

Simulator::Simulator(const Scenario& scenario, const PolicyConfig& config, const SimOptions& options)
    : Simulator(
          scenario,
          [config](const Scenario& s, const LayeredNetwork& l) { return MakePolicy(s, l, config); },
          options) {}

Simulator::Simulator(const Scenario& scenario, const PolicyFactory& factory, const SimOptions& options)
    : scenario_(scenario), options_(options) {
  if (options_.slots < 1) throw InvalidInput("slot count must be >= 1");
  if (!(options_.warmup_fraction >= 0 && options_.warmup_fraction < 1)) {
    throw InvalidInput("warm-up fraction must be in [0, 1)");
  }
  if (options_.thinning < 1) options_.thinning = 1;
  if (options_.flow_batches < 1) options_.flow_batches = 1;
  const Network& net = scenario_.network;
  if (net.has_wireless() && !scenario_.wireless) {
    throw InvalidInput("wireless links need wireless parameters");
  }
  layered_ = std::make_unique<LayeredNetwork>(net, scenario_.service);
  state_ = std::make_unique<QueueState>(*layered_, options_.seed);
  policy_ = factory(scenario_, *layered_);
  warmup_ = static_cast<int64_t>(std::floor(options_.warmup_fraction * options_.slots));

  const int n = net.num_nodes();
  arrivals_.count.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    arrival_rng_.emplace_back(options_.seed, RngStream::kArrivals, i);
    poisson_.emplace_back(scenario_.arrivals.rate[i] > 0 ? scenario_.arrivals.rate[i] : 1.0);
    mobility_rng_.emplace_back(options_.seed, RngStream::kMobility, i);
    positions_.push_back(net.node(i).position);
  }
  for (int e = 0; e < net.num_edges(); ++e) fading_rng_.emplace_back(options_.seed, RngStream::kFading, e);
  gains_.assign(net.num_edges(), 0.0);
  capacity_.assign(net.num_edges(), 0);
  full_backlog_.reserve(options_.slots);

  metrics_.policy = policy_->name();
  metrics_.seed = options_.seed;
  metrics_.slots = options_.slots;
  metrics_.warmup = warmup_;
  metrics_.slot_seconds = scenario_.wireless ? scenario_.wireless->slot_seconds : scenario_.slot_seconds;
}

void Simulator::DrawArrivals() {
  const auto& rate = scenario_.arrivals.rate;
  const auto& cap = scenario_.arrivals.max;
  for (size_t i = 0; i < arrivals_.count.size(); ++i) {
    if (rate[i] <= 0) {
      arrivals_.count[i] = 0;
      continue;
    }
    arrivals_.count[i] = std::min(poisson_[i](arrival_rng_[i]), cap[i]);
  }
}

void Simulator::UpdateChannels() {
  const Network& net = scenario_.network;
  if (!scenario_.wireless) return;
  const WirelessParams& w = *scenario_.wireless;
  if (slot_ > 0 && w.mobility_sigma_m > 0) {
    for (int i = 0; i < net.num_nodes(); ++i) {
      if (net.node(i).kind != NodeKind::kUserEquipment || !positions_[i]) continue;
      std::normal_distribution<double> step(0.0, w.mobility_sigma_m);
      Point& p = *positions_[i];
      p.x = std::clamp(p.x + step(mobility_rng_[i]), -w.area_half_width_m, w.area_half_width_m);
      p.y = std::clamp(p.y + step(mobility_rng_[i]), -w.area_half_width_m, w.area_half_width_m);
    }
  }
  for (int e = 0; e < net.num_edges(); ++e) {
    const Edge& edge = net.edge(e);
    if (!edge.wireless) continue;
    const Point& a = *positions_[edge.from];
    const Point& b = *positions_[edge.to];
    gains_[e] = ChannelGain(w, std::hypot(a.x - b.x, a.y - b.y), fading_rng_[e]);
  }
}

void Simulator::SnapshotFlows() {
  flow_in_snapshots_.push_back(state_->inflow_totals());
  flow_out_snapshots_.push_back(state_->outflow_totals());
  snapshot_slots_.push_back(slot_);
}

void Simulator::Step() {
  const Network& net = scenario_.network;
  if (slot_ == warmup_) SnapshotFlows();
  const bool measuring = slot_ >= warmup_;

  const double backlog = static_cast<double>(state_->total_backlog());
  full_backlog_.push_back(backlog);
  if (slot_ % options_.thinning == 0) {
    metrics_.backlog_series.push_back(backlog);
    metrics_.weighted_series.push_back(static_cast<double>(state_->weighted_total()));
  }

  UpdateChannels();
  decision_.clear();
  policy_->Decide({state_.get(), slot_, gains_}, decision_);

  for (int e = 0; e < net.num_edges(); ++e) capacity_[e] = net.edge(e).wireless ? 0 : net.edge(e).capacity;
  for (const WirelessLinkState& w : decision_.wireless) {
    if (w.edge >= 0 && w.edge < net.num_edges() && w.active) capacity_[w.edge] = w.capacity;
  }
  if (options_.validate) ValidateDecision(*layered_, decision_, capacity_);
  if (observer_) observer_(slot_, decision_);

  const double cost = SlotCost(*layered_, decision_, metrics_.slot_seconds);
  if (slot_ % options_.thinning == 0) metrics_.cost_series.push_back(cost);

  const TransmitResult tx = state_->Transmit(decision_);
  DrawArrivals();
  const ReceiveStats rx = state_->Receive(tx, arrivals_, slot_, policy_->unicast_arrivals());

  if (measuring) {
    cost_sum_ += cost;
    backlog_sum_ += backlog;
    weighted_sum_ += static_cast<double>(state_->weighted_total());
    window_.copies_delivered += rx.copies_delivered;
    window_.copy_delay_sum += rx.copy_delay_sum;
    window_.packets_completed += rx.packets_completed;
    window_.completion_delay_sum += rx.completion_delay_sum;
    window_.arrivals += rx.arrivals;
    dummies_ += tx.dummies;
  }
  ++slot_;

  if (measuring) {
    const int64_t window = options_.slots - warmup_;
    const int64_t done = slot_ - warmup_;
    const int64_t batch = std::max<int64_t>(1, window / options_.flow_batches);
    if (done % batch == 0 && done / batch <= options_.flow_batches) SnapshotFlows();
  }
}

RunMetrics Simulator::Finish() {
  while (slot_ < options_.slots) Step();
  RunMetrics m = metrics_;
  const double window = static_cast<double>(options_.slots - warmup_);
  m.avg_cost = cost_sum_ / window;
  m.avg_backlog = backlog_sum_ / window;
  const double rate = scenario_.arrivals.total();
  const int d = scenario_.num_destinations();
  m.delay_estimate_slots = rate > 0 ? weighted_sum_ / window / (d * rate) : 0.0;
  m.arrivals = window_.arrivals;
  m.delivered_copies = window_.copies_delivered;
  m.completed_packets = window_.packets_completed;
  m.dummies = dummies_;
  if (window_.copies_delivered > 0) {
    m.avg_copy_delay_slots =
        static_cast<double>(window_.copy_delay_sum) / static_cast<double>(window_.copies_delivered);
  }
  if (window_.packets_completed > 0) {
    m.avg_completion_delay_slots = static_cast<double>(window_.completion_delay_sum) /
                                   static_cast<double>(window_.packets_completed);
  }
  m.relative_rise = RelativeRise(full_backlog_);
  m.rise_stderr = RelativeRiseStdError(full_backlog_);
  m.verdict = ClassifyStability(full_backlog_);

  // Per-cell conservation residuals: (in - out) per slot, batch means.
  const size_t batches = snapshot_slots_.empty() ? 0 : snapshot_slots_.size() - 1;
  if (batches >= 1) {
    const auto& in0 = flow_in_snapshots_.front();
    const auto& out0 = flow_out_snapshots_.front();
    const auto& in1 = flow_in_snapshots_.back();
    const auto& out1 = flow_out_snapshots_.back();
    const double span_slots = static_cast<double>(snapshot_slots_.back() - snapshot_slots_.front());
    const int statuses = state_->num_statuses();
    for (int c = 0; c < state_->num_cells(); ++c) {
      const int64_t moved_in = in1[c] - in0[c];
      const int64_t moved_out = out1[c] - out0[c];
      if (moved_in == 0 && moved_out == 0) continue;
      CellFlowStat stat;
      stat.node = c / statuses;
      stat.status = DupStatus(static_cast<uint32_t>(c % statuses));
      stat.residual = static_cast<double>(moved_in - moved_out) / span_slots;
      stat.throughput = static_cast<double>(moved_out) / span_slots;
      if (batches >= 2) {
        std::vector<double> means;
        for (size_t b = 0; b < batches; ++b) {
          const double len = static_cast<double>(snapshot_slots_[b + 1] - snapshot_slots_[b]);
          const int64_t din = flow_in_snapshots_[b + 1][c] - flow_in_snapshots_[b][c];
          const int64_t dout = flow_out_snapshots_[b + 1][c] - flow_out_snapshots_[b][c];
          means.push_back(static_cast<double>(din - dout) / len);
        }
        const double mu = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
        double ss = 0.0;
        for (double v : means) ss += (v - mu) * (v - mu);
        stat.sigma = std::sqrt(ss / (means.size() - 1) / means.size());
      }
      m.flow_stats.push_back(stat);
    }
  }
  return m;
}

RunMetrics Run(const Scenario& scenario, const PolicyConfig& config, const SimOptions& options) {
  PolicyConfig c = config;
  if (c.cluster_seed == 0) c.cluster_seed = options.seed;
  Simulator sim(scenario, c, options);
  return sim.Finish();
}

}  // namespace mcnet
