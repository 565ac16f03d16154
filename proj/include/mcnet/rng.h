// Counter-based random streams.
//
// Every random consumer draws from its own named stream keyed by
// (run seed, stream, substream). Output i of a stream is a fixed function of
// that key and i, so toggling one component never shifts another's draws.
//
// Streams:
//   kArrivals          exogenous packet arrivals, substream = source node
//   kFading            shadow fading per wireless edge, substream = edge id
//   kMobility          user-equipment random walk, substream = node id
//   kClustering        k-means++ seeding for duplication trees
//   kRandomizedPolicy  stationary randomized policy draws, substream = resource
//   kRounding          initial residues of fractional scaling, substream = node

#ifndef MCNET_RNG_H_
#define MCNET_RNG_H_

#include <cstdint>
#include <limits>

namespace mcnet {

enum class RngStream : uint64_t {
  kArrivals = 1,
  kFading = 2,
  kMobility = 3,
  kClustering = 4,
  kRandomizedPolicy = 5,
  kRounding = 6,
};

// SplitMix64 finalizer.
constexpr uint64_t Mix64(uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  using result_type = uint64_t;

  CounterRng(uint64_t seed, RngStream stream, uint64_t substream = 0)
      : key_(Mix64(Mix64(seed ^ 0x6a09e667f3bcc909ULL) ^
                   Mix64(static_cast<uint64_t>(stream) * 0x9e3779b97f4a7c15ULL + substream))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return Mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

  // Uniform in [0, 1).
  double Uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

}  // namespace mcnet

#endif  // MCNET_RNG_H_
