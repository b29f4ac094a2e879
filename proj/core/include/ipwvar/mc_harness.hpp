#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ipwvar/random_streams.hpp"
#include "ipwvar/response_model.hpp"
#include "ipwvar/sim_datagen.hpp"
#include "ipwvar/variance_estimators.hpp"

namespace ipwvar {

// Column of Z holding the exposure; its coefficient is the target of inference.
inline constexpr Eigen::Index kExposureCoefficient = 1;
inline constexpr std::int64_t kDefaultReplicates = 10'000;
// A report is flagged invalid above this share of failed replicates.
inline constexpr double kMaxFailureShare = 0.01;

inline constexpr std::array<EstimatorKind, 3> kAllEstimators{EstimatorKind::Naive, EstimatorKind::Robust,
                                                             EstimatorKind::Linearized};

struct ReplicateRecord {
  std::string scenario;
  int scenario_index = 0;
  StreamPurpose purpose = StreamPurpose::Estimation;
  std::int64_t replicate = 0;

  bool ok = false;
  std::string failure;  // ErrorCode name when !ok
  std::string failure_detail;

  Eigen::VectorXd beta_hat;
  // Diagonal of each covariance estimate, indexed like kAllEstimators.
  std::array<Eigen::VectorXd, 3> variance;
  // Full matrices, only kept with HarnessOptions::keep_matrices.
  std::array<Eigen::MatrixXd, 3> cov;

  bool converged = false;
  int iterations = 0;
  int clamp_count = 0;
  double response_rate = 0.0;

  double exposure_variance(EstimatorKind kind) const { return variance[static_cast<std::size_t>(kind)](kExposureCoefficient); }
};

struct HarnessOptions {
  ExposureInResponse exposure = ExposureInResponse::Auto;
  FitOptions fit;
  bool keep_matrices = false;
};

// Generate -> fit response model -> weighted fit -> three variance
// estimators. Failures are captured in the record, never thrown.
ReplicateRecord run_replicate(const ScenarioSpec& spec, const GenerativeModel& model, std::int64_t replicate_index,
                              std::uint64_t base_seed, StreamPurpose purpose = StreamPurpose::Estimation,
                              const HarnessOptions& opts = {});

// B replicates on up to `parallelism` threads (<= 0: hardware concurrency).
// Records come back ordered by replicate index whatever the thread count.
std::vector<ReplicateRecord> run_scenario(const ScenarioSpec& spec, const GenerativeModel& model, std::int64_t B,
                                          std::uint64_t base_seed, int parallelism = 1,
                                          StreamPurpose purpose = StreamPurpose::Estimation,
                                          const HarnessOptions& opts = {});

// Per-coefficient empirical variance (denominator B - 1) of beta_hat over
// successful records. NaN entries when fewer than two succeeded.
Eigen::VectorXd empirical_variance(const std::vector<ReplicateRecord>& records);

// Empirical variance over an independent run drawn from the Reference streams.
Eigen::VectorXd reference_variance(const ScenarioSpec& spec, const GenerativeModel& model, std::int64_t B_ref,
                                   std::uint64_t seed, int parallelism = 1, const HarnessOptions& opts = {});

// (mean_V - V_ref) / V_ref. Throws ZeroReference unless V_ref > 0.
double relative_bias(double mean_v, double v_ref);

struct ReportCell {
  std::string scenario;
  EstimatorKind estimator = EstimatorKind::Naive;
  Eigen::Index coefficient = kExposureCoefficient;
  double mean_v = 0.0;
  double v_ref = 0.0;
  double rb = 0.0;
  std::int64_t n_fail = 0;
  std::int64_t B = 0;
  std::uint64_t seed = 0;
};

struct ScenarioSummary {
  std::string scenario;
  int scenario_index = 0;
  std::int64_t B = 0;
  std::int64_t n_fail = 0;
  std::int64_t ref_B = 0;
  std::int64_t ref_fail = 0;
  double mean_response_rate = 0.0;
  Eigen::VectorXd mean_beta;
  Eigen::VectorXd sd_beta;
  bool valid = true;
};

struct SimulationReport {
  std::vector<ReportCell> cells;     // exposure coefficient, scenario x estimator
  std::vector<ReportCell> extended;  // every coefficient
  std::vector<ScenarioSummary> summaries;
  std::uint64_t seed = 0;
  bool valid = true;

  const ReportCell& cell(const std::string& scenario, EstimatorKind kind) const;
  const ScenarioSummary& summary(const std::string& scenario) const;
};

// Aggregates estimation and reference records (any order) into the
// scenario x estimator relative-bias grid. Every scenario present needs
// reference records. Failed replicates are excluded from means and counted.
SimulationReport build_report(std::vector<ReplicateRecord> records, std::uint64_t seed);

}  // namespace ipwvar
