#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "ipwvar/sim_datagen.hpp"

namespace ipwvar {

inline constexpr std::uint64_t kRegistryDerivationSeed = 1085;

// The nine scenarios with gamma_0 calibrated once (seed kRegistryDerivationSeed,
// population 10^6, default generative model) and frozen.
std::vector<ScenarioSpec> scenario_registry();

struct RegistryRecord {
  ScenarioSpec spec;
  double target_rate = kTargetResponseRate;
  double achieved_rate = 0.0;
  Eigen::Index population = kCalibrationPopulation;
};

// Calibrates every scenario of the grid from scratch.
std::vector<RegistryRecord> calibrate_registry(const GenerativeModel& model, double target_rate,
                                               std::uint64_t seed, Eigen::Index population = kCalibrationPopulation);

// Accepts "MAR1", "mar 1", "MNAR6", ... Throws UnknownScenario.
const ScenarioSpec& find_scenario(std::string_view label, const std::vector<ScenarioSpec>& registry);

// "all" or a comma-separated list of labels, returned in grid order.
std::vector<ScenarioSpec> select_scenarios(std::string_view selection, const std::vector<ScenarioSpec>& registry);

// One record per line:
// label,index,gamma_x,gamma_y,gamma_z1,gamma_z2,gamma_z3,gamma_z4,gamma_0,target_rate,achieved_rate,population,derivation_seed,n
void write_registry(std::ostream& out, const std::vector<RegistryRecord>& records);
std::vector<ScenarioSpec> read_registry(std::istream& in);

}  // namespace ipwvar
