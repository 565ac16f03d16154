// Parameter sweeps and the metrics CSV.
//
// Replication r of every value and policy runs with seed base + r, so the
// values of one sweep see the same arrival and fading draws. Runs execute on
// a worker pool sized by the MCNET_WORKERS environment variable (default:
// hardware concurrency).

#ifndef MCNET_SWEEP_H_
#define MCNET_SWEEP_H_

#include <ostream>
#include <string>
#include <vector>

#include "mcnet/policy.h"
#include "mcnet/scenario.h"
#include "mcnet/simulator.h"

namespace mcnet {

enum class SweepAxis { kV, kEta, kLambda, kDestinations, kTrees };

// "V", "eta", "lambda", "D", "K".
SweepAxis ParseSweepAxis(const std::string& name);
std::string SweepAxisName(SweepAxis axis);

struct SweepSpec {
  Scenario scenario;
  std::vector<PolicyConfig> policies;
  SweepAxis axis = SweepAxis::kV;
  std::vector<double> values;
  int replications = 1;
  SimOptions options;  // options.seed is the base seed
  int workers = 0;     // 0: MCNET_WORKERS or hardware concurrency
};

struct SweepRow {
  std::string axis;
  double value = 0.0;
  int replication = 0;
  RunMetrics metrics;
};

// Rows ordered by (value, replication, policy). Throws InvalidInput for
// invalid axis values before any run starts.
std::vector<SweepRow> RunSweep(const SweepSpec& spec);

// Worker count from MCNET_WORKERS, falling back to the hardware count.
int DefaultWorkerCount();

inline constexpr const char* kMetricsCsvVersion = "# mcnet-metrics v1";

void WriteMetricsCsv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace mcnet

#endif  // MCNET_SWEEP_H_
