// Scenario files: network, service chain, wireless parameters and arrival
// rates in one JSON document. See README.md for the schema.

#ifndef MCNET_SCENARIO_H_
#define MCNET_SCENARIO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcnet/network.h"

namespace mcnet {

enum class PowerMode { kOptimal, kUniform };

struct WirelessParams {
  double bandwidth_hz = 100e6;
  double slot_seconds = 1e-3;
  double packet_bits = 1e3;
  double carrier_ghz = 30.0;
  double shadow_sigma_db = 8.2;
  double noise_dbm_per_hz = -174.0;
  double range_m = 150.0;
  PowerMode power_mode = PowerMode::kOptimal;
  double mobility_sigma_m = 0.0;  // per-slot random-walk step, per axis
  double area_half_width_m = 100.0;

  // Thermal noise over the whole band, in watts.
  double noise_w() const;
  void Validate() const;
};

struct Arrivals {
  std::vector<double> rate;      // mean packets per slot, per node
  std::vector<int64_t> max;      // per-slot cap, per node

  double total() const;
};

struct Scenario {
  std::string name;
  Network network;
  Service service;
  std::optional<WirelessParams> wireless;
  Arrivals arrivals;
  double slot_seconds = 1e-3;  // for reporting delays in seconds

  int num_destinations() const { return network.num_destinations(); }

  // Same arrival direction rescaled so the rates sum to `total`. Caps that
  // were not given explicitly are recomputed as ceil(10 * rate).
  Scenario WithTotalLoad(double total) const;
  // Keeps the first `count` destinations.
  Scenario WithDestinationCount(int count) const;

  std::vector<bool> explicit_max;  // per node, whether the cap was configured
};

Scenario ParseScenario(const std::string& json_text);
Scenario LoadScenario(const std::string& path);

// Default per-slot arrival cap for a mean rate.
int64_t DefaultArrivalCap(double rate);

}  // namespace mcnet

#endif  // MCNET_SCENARIO_H_
