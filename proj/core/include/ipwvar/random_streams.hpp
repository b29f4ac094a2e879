#pragma once

#include <cstdint>
#include <random>

namespace ipwvar {

using Rng = std::mt19937_64;

// Independent uses of the same base seed draw from disjoint streams.
enum class StreamPurpose : std::uint32_t {
  Estimation = 0,
  Reference = 1,
  Calibration = 2,
};

// Seeds a generator from (base_seed, scenario, replicate, purpose) through
// std::seed_seq, so a replicate's stream does not depend on scheduling.
Rng make_stream(std::uint64_t base_seed, std::uint64_t scenario_index, std::uint64_t replicate_index,
                StreamPurpose purpose = StreamPurpose::Estimation);

}  // namespace ipwvar
