#include "mcnet/sweep.h"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <mutex>
#include <thread>

namespace mcnet {

SweepAxis ParseSweepAxis(const std::string& name) {
  if (name == "V") return SweepAxis::kV;
  if (name == "eta") return SweepAxis::kEta;
  if (name == "lambda") return SweepAxis::kLambda;
  if (name == "D") return SweepAxis::kDestinations;
  if (name == "K") return SweepAxis::kTrees;
  throw InvalidInput("unknown sweep axis '" + name + "' (V, eta, lambda, D, K)");
}

std::string SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kV:
      return "V";
    case SweepAxis::kEta:
      return "eta";
    case SweepAxis::kLambda:
      return "lambda";
    case SweepAxis::kDestinations:
      return "D";
    case SweepAxis::kTrees:
      return "K";
  }
  return "?";
}

int DefaultWorkerCount() {
  if (const char* env = std::getenv("MCNET_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n >= 1) return static_cast<int>(n);
    throw InvalidInput("MCNET_WORKERS must be a positive integer");
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

struct Job {
  Scenario scenario;
  PolicyConfig config;
  SimOptions options;
};

int IntegerValue(double v, const std::string& axis) {
  if (v != std::floor(v) || v < 1) throw InvalidInput(axis + " values must be positive integers");
  return static_cast<int>(v);
}

}  // namespace

std::vector<SweepRow> RunSweep(const SweepSpec& spec) {
  if (spec.replications < 1) throw InvalidInput("replications must be >= 1");
  if (spec.policies.empty()) throw InvalidInput("sweep needs at least one policy");
  if (spec.values.empty()) throw InvalidInput("sweep needs at least one value");
  const std::string axis = SweepAxisName(spec.axis);

  std::vector<Job> jobs;
  std::vector<SweepRow> rows;
  for (double value : spec.values) {
    if (!std::isfinite(value)) throw InvalidInput(axis + " values must be finite");
    Scenario scenario = spec.scenario;
    if (spec.axis == SweepAxis::kLambda) scenario = spec.scenario.WithTotalLoad(value);
    if (spec.axis == SweepAxis::kDestinations) {
      scenario = spec.scenario.WithDestinationCount(IntegerValue(value, axis));
    }
    for (int rep = 0; rep < spec.replications; ++rep) {
      for (const PolicyConfig& base : spec.policies) {
        PolicyConfig config = base;
        if (spec.axis == SweepAxis::kV) config.V = value;
        if (spec.axis == SweepAxis::kEta) config.eta = value;
        if (spec.axis == SweepAxis::kTrees) config.num_trees = IntegerValue(value, axis);
        config.Validate();
        SimOptions options = spec.options;
        options.seed = spec.options.seed + static_cast<uint64_t>(rep);
        if (config.cluster_seed == 0) config.cluster_seed = options.seed;
        jobs.push_back({scenario, config, options});
        rows.push_back({axis, value, rep, {}});
      }
    }
  }

  const int workers = std::max(1, std::min<int>(spec.workers > 0 ? spec.workers : DefaultWorkerCount(),
                                                 static_cast<int>(jobs.size())));
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (size_t i = next++; i < jobs.size(); i = next++) {
      try {
        rows[i].metrics = Run(jobs[i].scenario, jobs[i].config, jobs[i].options);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

void WriteMetricsCsv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kMetricsCsvVersion << "\n";
  out << "axis,value,replication,policy,seed,slots,warmup,avg_cost,avg_backlog,"
         "delay_estimate_slots,copy_delay_slots,copy_delay_s,completion_delay_slots,"
         "completion_delay_s,arrivals,delivered_copies,completed_packets,dummies,verdict,"
         "relative_rise,rise_stderr\n";
  out << std::setprecision(10);
  for (const SweepRow& r : rows) {
    const RunMetrics& m = r.metrics;
    out << r.axis << ',' << r.value << ',' << r.replication << ',' << m.policy << ',' << m.seed << ','
        << m.slots << ',' << m.warmup << ',' << m.avg_cost << ',' << m.avg_backlog << ','
        << m.delay_estimate_slots << ',' << m.avg_copy_delay_slots << ','
        << m.avg_copy_delay_slots * m.slot_seconds << ',' << m.avg_completion_delay_slots << ','
        << m.avg_completion_delay_slots * m.slot_seconds << ',' << m.arrivals << ','
        << m.delivered_copies << ',' << m.completed_packets << ',' << m.dummies << ','
        << VerdictName(m.verdict) << ',' << m.relative_rise << ',' << m.rise_stderr << '\n';
  }
}

}  // namespace mcnet
