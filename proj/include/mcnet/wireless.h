// Wireless links for edge-computing scenarios: channel gains, Shannon
// capacity, transmit-power allocation and link activation.
//
// Powers are in watts, rates in bit/s. `weight` arguments are differential
// backlogs in packets; the packet size converts bits into packets.

#ifndef MCNET_WIRELESS_H_
#define MCNET_WIRELESS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "mcnet/network.h"
#include "mcnet/rng.h"
#include "mcnet/scenario.h"

namespace mcnet {

// 32.4 + 20 log10(fc [GHz]) + 31.9 log10(d [m]), in dB.
double PathLossDb(double carrier_ghz, double distance_m);

// Linear gain with shadow fading drawn from `rng`. Zero beyond the range.
double ChannelGain(const WirelessParams& params, double distance_m, CounterRng& rng);

double ShannonRate(const WirelessParams& params, double power_w, double gain);

// floor(tau * R / packet_bits).
int64_t WirelessCapacity(const WirelessParams& params, double power_w, double gain);

// Per-link inputs to power allocation.
struct LinkChannel {
  double weight = 0.0;  // best duplication weight on the link, packets
  double gain = 0.0;
};

// max[B0 w / (L (price + nu) ln 2) - sigma^2 / g, 0], where price is the
// energy cost times V. An infinite value is returned when price + nu = 0 and
// w > 0; callers clamp it.
double PowerAtLevel(const WirelessParams& params, const LinkChannel& link, double price,
                    double nu);

// Single-link transmitter: min[p(0), budget].
double SingleLinkPower(const WirelessParams& params, const LinkChannel& link, double price,
                       double budget);

struct WaterFill {
  std::vector<double> power;
  double nu = 0.0;
  int iterations = 0;
};

// Multi-link transmitter: finds nu* >= 0 so the total power meets the budget
// (bisection, 200 steps, upper side kept) or nu* = 0 when p(0) already fits.
WaterFill AllocatePower(const WirelessParams& params, std::span<const LinkChannel> links,
                        double price, double budget);

// Index of the link with the largest positive value, or -1. Ties go to the
// lowest index.
int ActivateSingleLink(std::span<const double> psi);

// w tau R / L - V e tau p: the per-link objective the activation compares.
double LinkUtility(const WirelessParams& params, const LinkChannel& link, double price,
                   double power_w);

}  // namespace mcnet

#endif  // MCNET_WIRELESS_H_
