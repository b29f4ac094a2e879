#include "ipwvar/random_streams.hpp"

#include <array>

namespace ipwvar {

Rng make_stream(std::uint64_t base_seed, std::uint64_t scenario_index, std::uint64_t replicate_index,
                StreamPurpose purpose) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v & 0xffffffffu); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  const std::array<std::uint32_t, 7> words{lo(base_seed),      hi(base_seed),      lo(scenario_index),
                                           hi(scenario_index), lo(replicate_index), hi(replicate_index),
                                           static_cast<std::uint32_t>(purpose)};
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

}  // namespace ipwvar
