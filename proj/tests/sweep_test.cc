#include "mcnet/sweep.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <sstream>

#include "test_util.h"

namespace mcnet {
namespace {

using testing::Star;

SweepSpec SmallSpec() {
  SweepSpec spec;
  spec.scenario = Star(0.5);
  spec.policies = {PolicyConfig{}};
  spec.axis = SweepAxis::kV;
  spec.values = {0, 5};
  spec.replications = 3;
  spec.options.slots = 1000;
  spec.options.seed = 7;
  spec.workers = 2;
  return spec;
}

TEST(Sweep, AxisNamesRoundTrip) {
  for (SweepAxis a : {SweepAxis::kV, SweepAxis::kEta, SweepAxis::kLambda, SweepAxis::kDestinations,
                      SweepAxis::kTrees}) {
    EXPECT_EQ(ParseSweepAxis(SweepAxisName(a)), a);
  }
  EXPECT_THROW(ParseSweepAxis("mu"), InvalidInput);
}

TEST(Sweep, ReplicationsUseConsecutiveSeeds) {
  const auto rows = RunSweep(SmallSpec());
  ASSERT_EQ(rows.size(), 6u);
  for (size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].value, i < 3 ? 0.0 : 5.0);
    EXPECT_EQ(rows[i].replication, static_cast<int>(i % 3));
    EXPECT_EQ(rows[i].metrics.seed, 7u + i % 3);
  }
  EXPECT_NE(rows[0].metrics.backlog_series, rows[1].metrics.backlog_series);
}

TEST(Sweep, WorkerCountDoesNotChangeResults) {
  SweepSpec spec = SmallSpec();
  spec.workers = 1;
  const auto serial = RunSweep(spec);
  spec.workers = 4;
  const auto parallel = RunSweep(spec);
  ASSERT_EQ(serial.size(), parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].metrics.avg_cost, parallel[i].metrics.avg_cost);
    EXPECT_EQ(serial[i].metrics.backlog_series, parallel[i].metrics.backlog_series);
  }
}

TEST(Sweep, RejectsInvalidValues) {
  SweepSpec spec = SmallSpec();
  spec.axis = SweepAxis::kDestinations;
  spec.values = {2.5};
  EXPECT_THROW(RunSweep(spec), InvalidInput);
  spec.values = {3};
  EXPECT_THROW(RunSweep(spec), InvalidInput);
  spec.axis = SweepAxis::kTrees;
  spec.values = {0};
  EXPECT_THROW(RunSweep(spec), InvalidInput);
  spec.axis = SweepAxis::kV;
  spec.values = {-1};
  EXPECT_THROW(RunSweep(spec), InvalidInput);
  spec.values = {1};
  spec.replications = 0;
  EXPECT_THROW(RunSweep(spec), InvalidInput);
}

TEST(Sweep, LambdaAndDestinationAxes) {
  SweepSpec spec = SmallSpec();
  spec.axis = SweepAxis::kLambda;
  spec.values = {0.0};
  spec.replications = 1;
  EXPECT_EQ(RunSweep(spec)[0].metrics.arrivals, 0);
  spec.axis = SweepAxis::kDestinations;
  spec.values = {1};
  const auto rows = RunSweep(spec);
  EXPECT_GT(rows[0].metrics.delivered_copies, 0);
  EXPECT_EQ(rows[0].metrics.delivered_copies, rows[0].metrics.completed_packets);
}

TEST(Sweep, CsvHasVersionAndOneLinePerRow) {
  const auto rows = RunSweep(SmallSpec());
  std::ostringstream out;
  WriteMetricsCsv(out, rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, kMetricsCsvVersion);
  std::getline(in, line);
  const auto columns = std::count(line.begin(), line.end(), ',');
  EXPECT_EQ(line.substr(0, 10), "axis,value");
  int data = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), columns);
    ++data;
  }
  EXPECT_EQ(data, 6);
}

TEST(Sweep, WorkerCountFromEnvironment) {
  setenv("MCNET_WORKERS", "3", 1);
  EXPECT_EQ(DefaultWorkerCount(), 3);
  setenv("MCNET_WORKERS", "zero", 1);
  EXPECT_THROW(DefaultWorkerCount(), InvalidInput);
  unsetenv("MCNET_WORKERS");
  EXPECT_GE(DefaultWorkerCount(), 1);
}

}  // namespace
}  // namespace mcnet
