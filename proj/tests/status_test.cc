#include "mcnet/status.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

namespace mcnet {
namespace {

// Oracle: a choice assigns each destination one of {absent, kept, sent}
// with at least one sent.
std::set<std::pair<uint32_t, uint32_t>> BruteForceOmega(int d) {
  std::set<std::pair<uint32_t, uint32_t>> out;
  int total = 1;
  for (int k = 0; k < d; ++k) total *= 3;
  for (int code = 0; code < total; ++code) {
    uint32_t q = 0, s = 0;
    int c = code;
    for (int k = 0; k < d; ++k, c /= 3) {
      if (c % 3 >= 1) q |= 1u << k;
      if (c % 3 == 2) s |= 1u << k;
    }
    if (s != 0) out.insert({q, s});
  }
  return out;
}

TEST(DupStatus, BasicOps) {
  const DupStatus a = DupStatus::Parse("110");
  EXPECT_TRUE(a.has(0));
  EXPECT_TRUE(a.has(1));
  EXPECT_FALSE(a.has(2));
  EXPECT_EQ(a.count(), 2);
  EXPECT_EQ(a.ToString(3), "110");
  EXPECT_TRUE(DupStatus::AllOnes(3).contains(a));
  EXPECT_FALSE(a.contains(DupStatus::Single(2)));
  EXPECT_EQ((DupStatus::AllOnes(3) - a).bits(), DupStatus::Single(2).bits());
}

TEST(DupStatus, ParseRoundTrip) {
  for (int d = 1; d <= 5; ++d) {
    for (uint32_t b = 0; b < (1u << d); ++b) {
      EXPECT_EQ(DupStatus::Parse(DupStatus(b).ToString(d)).bits(), b);
    }
  }
  EXPECT_THROW(DupStatus::Parse("10x"), InvalidInput);
  EXPECT_THROW(DupStatus::Parse(""), InvalidInput);
}

TEST(Omega, MatchesBruteForceOracle) {
  for (int d = 1; d <= 6; ++d) {
    const auto omega = EnumerateOmega(d);
    const auto oracle = BruteForceOmega(d);
    ASSERT_EQ(omega.size(), oracle.size()) << "D=" << d;
    std::set<std::pair<uint32_t, uint32_t>> got;
    for (const DupChoice& c : omega) {
      EXPECT_TRUE(c.valid());
      got.insert({c.q.bits(), c.s.bits()});
    }
    EXPECT_EQ(got, oracle);
    EXPECT_TRUE(std::is_sorted(omega.begin(), omega.end()));
    EXPECT_EQ(OmegaSize(d), omega.size());
  }
}

TEST(Omega, RejectsOutOfRange) {
  EXPECT_THROW(EnumerateOmega(0), InvalidInput);
  EXPECT_THROW(EnumerateOmega(kMaxDestinations + 1), InvalidInput);
}

TEST(Omega, SmallCases) {
  const auto one = EnumerateOmega(1);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].q.bits(), 1u);
  EXPECT_EQ(one[0].s.bits(), 1u);
  EXPECT_EQ(EnumerateOmega(2).size(), 5u);
}

TEST(Subsets, EnumeratesEachNonemptySubmaskOnce) {
  for (uint32_t q = 0; q < 64; ++q) {
    std::vector<uint32_t> got;
    for (DupStatus s : SubsetsOf(DupStatus(q))) got.push_back(s.bits());
    std::vector<uint32_t> want;
    for (uint32_t s = 1; s < 64; ++s) {
      if ((s & ~q) == 0) want.push_back(s);
    }
    EXPECT_EQ(got, want) << q;
  }
}

TEST(Split, PreservesCoverage) {
  for (const DupChoice& c : EnumerateOmega(4)) {
    const auto [sent, kept] = Split(c.q, c.s);
    EXPECT_EQ((sent | kept).bits(), c.q.bits());
    EXPECT_TRUE((sent & kept).empty());
    EXPECT_EQ(kept.bits(), c.reloaded().bits());
  }
  EXPECT_THROW(Split(DupStatus(0b011), DupStatus(0b100)), InvalidInput);
  EXPECT_THROW(Split(DupStatus(0b011), DupStatus(0)), InvalidInput);
}

TEST(DestinationArrival, SplitsOffTheLocalCopy) {
  const auto split = DestinationArrivalSplit(DupStatus::Parse("111"), 1);
  ASSERT_TRUE(split.has_value());
  EXPECT_EQ(split->departing.bits(), DupStatus::Single(1).bits());
  EXPECT_EQ(split->reloaded.ToString(3), "101");
  const auto last = DestinationArrivalSplit(DupStatus::Parse("010"), 1);
  ASSERT_TRUE(last.has_value());
  EXPECT_TRUE(last->reloaded.empty());
  EXPECT_FALSE(DestinationArrivalSplit(DupStatus::Parse("101"), 1).has_value());
}

}  // namespace
}  // namespace mcnet
