#include "mcnet/status.h"

namespace mcnet {

std::string DupStatus::ToString(int num_destinations) const {
  std::string out;
  out.reserve(num_destinations);
  for (int k = 0; k < num_destinations; ++k) out.push_back(has(k) ? '1' : '0');
  return out;
}

DupStatus DupStatus::Parse(const std::string& text) {
  if (text.empty() || text.size() > static_cast<size_t>(kMaxDestinations)) {
    throw InvalidInput("status string must have 1 to " + std::to_string(kMaxDestinations) +
                       " characters");
  }
  uint32_t bits = 0;
  for (size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '1') {
      bits |= uint32_t{1} << k;
    } else if (text[k] != '0') {
      throw InvalidInput("status string '" + text + "' is not binary");
    }
  }
  return DupStatus(bits);
}

uint64_t OmegaSize(int num_destinations) {
  uint64_t three = 1, two = 1;
  for (int i = 0; i < num_destinations; ++i) {
    three *= 3;
    two *= 2;
  }
  return three - two;
}

std::vector<DupChoice> EnumerateOmega(int num_destinations) {
  if (num_destinations < 1 || num_destinations > kMaxDestinations) {
    throw InvalidInput("destination count " + std::to_string(num_destinations) +
                       " outside [1, " + std::to_string(kMaxDestinations) + "]");
  }
  std::vector<DupChoice> out;
  out.reserve(OmegaSize(num_destinations));
  const uint32_t limit = uint32_t{1} << num_destinations;
  for (uint32_t q = 1; q < limit; ++q) {
    for (DupStatus s : SubsetsOf(DupStatus(q))) out.push_back({DupStatus(q), s});
  }
  return out;
}

std::pair<DupStatus, DupStatus> Split(DupStatus q, DupStatus s) {
  if (s.empty() || !q.contains(s)) {
    throw InvalidInput("invalid duplication choice: transmitted status is not a "
                       "nonempty subset of the selected status");
  }
  return {s, q ^ s};
}

std::optional<DestinationSplit> DestinationArrivalSplit(DupStatus q, int k) {
  if (!q.has(k)) return std::nullopt;
  const DupStatus bk = DupStatus::Single(k);
  return DestinationSplit{bk, q - bk};
}

}  // namespace mcnet
