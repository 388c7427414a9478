#include "tbsg/random.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace tbsg {

std::vector<std::uint32_t> Rng::sample_distinct(std::uint32_t bound, std::uint32_t count) {
  if (count > bound) throw std::invalid_argument("sample_distinct: count exceeds bound");
  std::vector<std::uint32_t> out;
  out.reserve(count);
  if (count * 2 >= bound) {
    // Dense case: partial Fisher-Yates over the whole range.
    std::vector<std::uint32_t> all(bound);
    for (std::uint32_t i = 0; i < bound; ++i) all[i] = i;
    for (std::uint32_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<std::uint32_t>(below(bound - i));
      std::swap(all[i], all[j]);
    }
    out.assign(all.begin(), all.begin() + count);
  } else {
    std::unordered_set<std::uint32_t> chosen;
    chosen.reserve(count * 2);
    for (std::uint32_t j = bound - count; j < bound; ++j) {
      const auto t = static_cast<std::uint32_t>(below(static_cast<std::uint64_t>(j) + 1));
      const std::uint32_t pick = chosen.contains(t) ? j : t;
      chosen.insert(pick);
      out.push_back(pick);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace tbsg
