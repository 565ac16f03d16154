#include "mcnet/wireless.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace mcnet {
namespace {

WirelessParams Params() { return WirelessParams{}; }

TEST(Wireless, PathLossAndNoise) {
  EXPECT_NEAR(PathLossDb(30.0, 100.0), 32.4 + 20 * std::log10(30.0) + 63.8, 1e-12);
  EXPECT_NEAR(Params().noise_w(), std::pow(10.0, (-174.0 - 30) / 10) * 100e6, 1e-25);
}

TEST(Wireless, GainZeroBeyondRange) {
  WirelessParams p = Params();
  CounterRng rng(1, RngStream::kFading, 0);
  EXPECT_EQ(ChannelGain(p, 151.0, rng), 0.0);
  p.shadow_sigma_db = 0;
  EXPECT_NEAR(ChannelGain(p, 50.0, rng), std::pow(10.0, -PathLossDb(30.0, 50.0) / 10), 1e-20);
}

TEST(Wireless, CapacityFloorsShannon) {
  const WirelessParams p = Params();
  const double g = 1e-11;
  const double rate = ShannonRate(p, 0.2, g);
  EXPECT_EQ(WirelessCapacity(p, 0.2, g), static_cast<int64_t>(std::floor(1e-3 * rate / 1e3)));
  EXPECT_EQ(WirelessCapacity(p, 0.0, g), 0);
}

TEST(Wireless, PowerMonotoneInLevel) {
  const WirelessParams p = Params();
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> w(0.0, 500.0), lg(-13, -9), nu(0.0, 1e9);
  for (int trial = 0; trial < 500; ++trial) {
    const LinkChannel link{w(gen), std::pow(10.0, lg(gen))};
    const double price = 0.5 * nu(gen);
    double a = nu(gen), b = nu(gen);
    if (a > b) std::swap(a, b);
    EXPECT_GE(PowerAtLevel(p, link, price, a), PowerAtLevel(p, link, price, b));
    EXPECT_GE(PowerAtLevel(p, link, price, b), 0.0);
  }
}

TEST(Wireless, WaterFillMeetsBudgetWithSlackness) {
  const WirelessParams p = Params();
  std::mt19937 gen(2);
  std::uniform_real_distribution<double> w(0.0, 300.0), lg(-13, -9), budget(0.05, 2.0), price(0.0, 1e-2);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<LinkChannel> links(1 + trial % 6);
    for (auto& l : links) l = {w(gen), std::pow(10.0, lg(gen))};
    const double P = budget(gen);
    const double pr = trial % 3 == 0 ? 0.0 : price(gen);
    const WaterFill wf = AllocatePower(p, links, pr, P);
    double sum = 0.0;
    for (size_t j = 0; j < links.size(); ++j) {
      EXPECT_GE(wf.power[j], 0.0);
      EXPECT_NEAR(wf.power[j], PowerAtLevel(p, links[j], pr, wf.nu), 1e-9 * P + 1e-12);
      sum += wf.power[j];
    }
    EXPECT_LE(sum, P * (1 + 1e-9));
    // Complementary slackness: nu > 0 only with the budget tight.
    if (wf.nu > 0) EXPECT_NEAR(sum, P, 1e-9 * P);
  }
}

TEST(Wireless, ZeroPriceSpendsWholeBudget) {
  const WirelessParams p = Params();
  const std::vector<LinkChannel> links{{10.0, 1e-11}, {20.0, 1e-12}};
  const WaterFill wf = AllocatePower(p, links, 0.0, 1.0);
  EXPECT_NEAR(wf.power[0] + wf.power[1], 1.0, 1e-9);
  EXPECT_GT(wf.nu, 0.0);
}

TEST(Wireless, SingleLinkClampsToBudget) {
  const WirelessParams p = Params();
  const LinkChannel link{50.0, 1e-11};
  EXPECT_DOUBLE_EQ(SingleLinkPower(p, link, 0.0, 0.2), 0.2);
  const double free = PowerAtLevel(p, link, 1e6, 0.0);
  EXPECT_DOUBLE_EQ(SingleLinkPower(p, link, 1e6, 1e9), free);
}

TEST(Wireless, ActivationPicksArgmax) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> psi(1 + trial % 7);
    for (double& v : psi) v = u(gen);
    const int j = ActivateSingleLink(psi);
    int oracle = -1;
    for (size_t k = 0; k < psi.size(); ++k) {
      if (psi[k] > 0 && (oracle < 0 || psi[k] > psi[oracle])) oracle = static_cast<int>(k);
    }
    EXPECT_EQ(j, oracle);
  }
  EXPECT_EQ(ActivateSingleLink(std::vector<double>{1.0, 1.0}), 0);
  EXPECT_EQ(ActivateSingleLink(std::vector<double>{0.0, -1.0}), -1);
}

TEST(Wireless, UtilityAtOptimalPowerBeatsOtherPowers) {
  // For a single link, p(0) maximizes w tau R / L - price tau p.
  const WirelessParams p = Params();
  const LinkChannel link{40.0, 3e-12};
  const double price = 2e-4;
  const double best = PowerAtLevel(p, link, price, 0.0);
  const double u_best = LinkUtility(p, link, price, best);
  for (double f : {0.0, 0.5, 0.9, 1.1, 2.0}) {
    EXPECT_LE(LinkUtility(p, link, price, f * best), u_best + 1e-9);
  }
}

}  // namespace
}  // namespace mcnet
