#include "mcnet/wireless.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace mcnet {

double PathLossDb(double carrier_ghz, double distance_m) {
  return 32.4 + 20.0 * std::log10(carrier_ghz) + 31.9 * std::log10(distance_m);
}

double ChannelGain(const WirelessParams& params, double distance_m, CounterRng& rng) {
  if (distance_m > params.range_m) return 0.0;
  const double d = std::max(distance_m, 1.0);  // inside 1 m the model is not meaningful
  double shadow = 0.0;
  if (params.shadow_sigma_db > 0) {
    std::normal_distribution<double> normal(0.0, params.shadow_sigma_db);
    shadow = normal(rng);
  }
  return std::pow(10.0, -(PathLossDb(params.carrier_ghz, d) + shadow) / 10.0);
}

double ShannonRate(const WirelessParams& params, double power_w, double gain) {
  if (power_w <= 0 || gain <= 0) return 0.0;
  return params.bandwidth_hz * std::log2(1.0 + gain * power_w / params.noise_w());
}

int64_t WirelessCapacity(const WirelessParams& params, double power_w, double gain) {
  const double packets = params.slot_seconds * ShannonRate(params, power_w, gain) / params.packet_bits;
  return static_cast<int64_t>(std::floor(packets + 1e-9));
}

double PowerAtLevel(const WirelessParams& params, const LinkChannel& link, double price,
                    double nu) {
  if (link.weight <= 0 || link.gain <= 0) return 0.0;
  const double level = price + nu;
  if (level <= 0) return std::numeric_limits<double>::infinity();
  const double p = params.bandwidth_hz * link.weight /
                       (params.packet_bits * level * std::numbers::ln2) -
                   params.noise_w() / link.gain;
  return std::max(p, 0.0);
}

double SingleLinkPower(const WirelessParams& params, const LinkChannel& link, double price,
                       double budget) {
  return std::min(PowerAtLevel(params, link, price, 0.0), budget);
}

WaterFill AllocatePower(const WirelessParams& params, std::span<const LinkChannel> links,
                        double price, double budget) {
  WaterFill out;
  out.power.assign(links.size(), 0.0);
  auto total_at = [&](double nu) {
    double sum = 0.0;
    for (const LinkChannel& l : links) sum += PowerAtLevel(params, l, price, nu);
    return sum;
  };
  double max_weight = 0.0;
  for (const LinkChannel& l : links) {
    if (l.gain > 0) max_weight = std::max(max_weight, l.weight);
  }
  if (max_weight <= 0 || budget <= 0) return out;
  double nu = 0.0;
  if (!(price > 0) || total_at(0.0) > budget) {
    double lo = 0.0;
    double hi = params.bandwidth_hz * max_weight / (params.packet_bits * std::numbers::ln2);
    while (total_at(hi) > budget) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (total_at(mid) > budget) {
        lo = mid;
      } else {
        hi = mid;
      }
      out.iterations = it + 1;
    }
    nu = hi;
  }
  out.nu = nu;
  for (size_t i = 0; i < links.size(); ++i) out.power[i] = PowerAtLevel(params, links[i], price, nu);
  return out;
}

int ActivateSingleLink(std::span<const double> psi) {
  int best = -1;
  for (size_t i = 0; i < psi.size(); ++i) {
    if (psi[i] > 0 && (best < 0 || psi[i] > psi[best])) best = static_cast<int>(i);
  }
  return best;
}

double LinkUtility(const WirelessParams& params, const LinkChannel& link, double price,
                   double power_w) {
  const double packets = params.slot_seconds * ShannonRate(params, power_w, link.gain) / params.packet_bits;
  return link.weight * packets - price * params.slot_seconds * power_w;
}

}  // namespace mcnet
