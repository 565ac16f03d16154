// Duplication-status algebra.
//
// A packet's status is a bit mask over the ordered destination list: bit k is
// set while destination k still needs a copy. A duplication choice (q, s)
// takes a status-q packet, transmits a copy with status s and keeps (reloads)
// a copy with status q - s at the current node.

#ifndef MCNET_STATUS_H_
#define MCNET_STATUS_H_

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mcnet {

// Largest supported destination set.
inline constexpr int kMaxDestinations = 16;

class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DupStatus {
 public:
  constexpr DupStatus() = default;
  constexpr explicit DupStatus(uint32_t bits) : bits_(bits) {}

  static constexpr DupStatus AllOnes(int num_destinations) {
    return DupStatus((uint32_t{1} << num_destinations) - 1);
  }
  static constexpr DupStatus Single(int k) { return DupStatus(uint32_t{1} << k); }

  constexpr uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool has(int k) const { return (bits_ >> k) & 1u; }
  constexpr int count() const { return std::popcount(bits_); }
  constexpr bool contains(DupStatus other) const {
    return (other.bits_ & ~bits_) == 0;
  }

  constexpr DupStatus operator|(DupStatus o) const { return DupStatus(bits_ | o.bits_); }
  constexpr DupStatus operator&(DupStatus o) const { return DupStatus(bits_ & o.bits_); }
  constexpr DupStatus operator^(DupStatus o) const { return DupStatus(bits_ ^ o.bits_); }
  // Set difference; only meaningful when `o` is a subset.
  constexpr DupStatus operator-(DupStatus o) const { return DupStatus(bits_ & ~o.bits_); }

  constexpr auto operator<=>(const DupStatus&) const = default;

  // Destination 1 first, e.g. "110" for D = 3 means bits {0, 1}.
  std::string ToString(int num_destinations) const;
  // Inverse of ToString; the string length fixes D. Throws on other characters.
  static DupStatus Parse(const std::string& text);

 private:
  uint32_t bits_ = 0;
};

struct DupChoice {
  DupStatus q;  // status of the packet selected for operation
  DupStatus s;  // status of the transmitted copy

  DupStatus reloaded() const { return q - s; }
  bool valid() const { return !s.empty() && q.contains(s); }

  auto operator<=>(const DupChoice&) const = default;
};

// Iterates the nonempty submasks of q in increasing numeric order.
class SubsetRange {
 public:
  class iterator {
   public:
    using value_type = DupStatus;
    using difference_type = std::ptrdiff_t;

    iterator() = default;
    iterator(uint32_t q, uint32_t cur, bool done) : q_(q), cur_(cur), done_(done) {}

    DupStatus operator*() const { return DupStatus(cur_); }
    iterator& operator++() {
      // Next submask above cur_: standard "(cur - q) & q" walk.
      uint32_t next = (cur_ - q_) & q_;
      if (next == 0) {
        done_ = true;
      } else {
        cur_ = next;
      }
      return *this;
    }
    iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    bool operator==(const iterator& o) const {
      if (done_ || o.done_) return done_ == o.done_;
      return cur_ == o.cur_;
    }

   private:
    uint32_t q_ = 0;
    uint32_t cur_ = 0;
    bool done_ = true;
  };

  explicit SubsetRange(DupStatus q) : q_(q.bits()) {}

  iterator begin() const {
    if (q_ == 0) return end();
    // Lowest nonempty submask is the lowest set bit.
    return iterator(q_, q_ & (~q_ + 1), false);
  }
  iterator end() const { return iterator(q_, 0, true); }

 private:
  uint32_t q_;
};

// Every nonempty submask s of q, each once. Empty when q is zero.
inline SubsetRange SubsetsOf(DupStatus q) { return SubsetRange(q); }

// All duplication choices for D destinations, ordered by (q, s).
// Size is 3^D - 2^D. Throws InvalidInput when D is outside [1, kMaxDestinations].
std::vector<DupChoice> EnumerateOmega(int num_destinations);

uint64_t OmegaSize(int num_destinations);

// Splits q into (transmitted s, reloaded q - s). Throws InvalidInput unless
// s is a nonempty subset of q.
std::pair<DupStatus, DupStatus> Split(DupStatus q, DupStatus s);

// Result of a status-q packet reaching destination k.
struct DestinationSplit {
  DupStatus departing;  // b_k, leaves the network
  DupStatus reloaded;   // q - b_k, zero when the packet is fully delivered
};

// nullopt when bit k of q is not set (the packet just passes through).
std::optional<DestinationSplit> DestinationArrivalSplit(DupStatus q, int k);

}  // namespace mcnet

#endif  // MCNET_STATUS_H_
