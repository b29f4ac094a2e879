#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ipwvar/csv_dataset.hpp"
#include "ipwvar/mc_harness.hpp"
#include "ipwvar/variance_estimators.hpp"

namespace ipwvar::cli {

inline constexpr std::uint64_t kDefaultSimulationSeed = 2024;

// Exit statuses. Anything nonzero comes with an "error,<Cause>,<message>" line on stderr.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  // fit
  std::string data;
  ColumnMapping mapping;
  std::string estimator = "all";
  bool naive_unscaled = false;

  // simulate / calibrate / report
  std::string scenario = "all";
  std::int64_t reps = kDefaultReplicates;
  std::int64_t ref_reps = 0;  // 0: same as reps
  std::optional<std::uint64_t> seed;
  int parallelism = 1;
  std::string records;
  std::string registry;
  bool include_exposure = false;
  int cohort_size = 1000;
  double target_rate = kTargetResponseRate;
  std::int64_t population = kCalibrationPopulation;

  std::string out;
};

// "all", a single name, or a comma-separated list. Throws InvalidArgument.
std::vector<EstimatorKind> parse_estimator_selection(const std::string& selection);

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_calibrate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace ipwvar::cli
