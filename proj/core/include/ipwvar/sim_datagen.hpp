#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ipwvar/dataset.hpp"
#include "ipwvar/random_streams.hpp"

namespace ipwvar {

inline constexpr int kCovariateCount = 7;
inline constexpr double kTargetCorrExposureCovariate = 0.2;
inline constexpr double kTargetCorrOutcomeExposure = 0.3;
inline constexpr double kTargetCorrOutcomeCovariate = 0.2;
inline constexpr double kTargetResponseRate = 0.6;
inline constexpr double kResponseCovariateCoef = 0.1;

// Coefficients of the exposure and outcome generators:
//   x = c_x + a (z1 + z2 + z5 + z6) + sd_x * eps
//   y = c_y + beta x + b (z1 + z3 + z5 + z7) + sd_y * eps'
struct GenerativeModel {
  double exposure_intercept = 1.0;
  double exposure_coef = 0.0;
  double exposure_noise_sd = 1.0;
  double outcome_intercept = 1.0;
  double outcome_exposure_coef = 0.0;
  double outcome_covariate_coef = 0.0;
  double outcome_noise_sd = 1.0;
};

// Which covariate the outcome-covariate correlation target is imposed on.
// z1 also drives the exposure, z3 only the outcome; the two correlations
// differ whenever a and beta are both nonzero.
enum class CorrelationAnchor { SharedCovariate, OutcomeOnlyCovariate };

struct OutcomeCoefficients {
  double beta = 0.0;  // exposure effect
  double b = 0.0;     // common covariate effect
};

// Solves a / sqrt(4a^2 + 1) = target_corr. Throws NoSolution for |target_corr| >= 0.5.
double derive_exposure_coefficient(double target_corr = kTargetCorrExposureCovariate);

// Solves corr(y, x) = corr_yx and corr(y, z_anchor) = corr_yz for unit
// noise variances. Throws NoSolution when the targets are infeasible.
OutcomeCoefficients derive_outcome_coefficients(double a, double corr_yx = kTargetCorrOutcomeExposure,
                                                double corr_yz = kTargetCorrOutcomeCovariate,
                                                CorrelationAnchor anchor = CorrelationAnchor::OutcomeOnlyCovariate);

// Exposure and outcome coefficients meeting the default correlation targets.
GenerativeModel default_generative_model();

struct ScenarioSpec {
  std::string label;
  int index = 0;  // position in the scenario grid; keys the random streams
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  std::array<double, 4> gamma_z{kResponseCovariateCoef, kResponseCovariateCoef, kResponseCovariateCoef,
                                kResponseCovariateCoef};
  double gamma_0 = 0.0;
  std::uint64_t derivation_seed = 0;
  int n = 1000;

  bool is_mnar() const { return gamma_y != 0.0; }
};

// The nine response-mechanism scenarios with gamma_0 left at zero.
std::vector<ScenarioSpec> scenario_grid();

struct GeneratedCohort {
  Eigen::MatrixXd z;  // n x 7
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd p_true;
  Eigen::VectorXd R;
  GenerativeModel model;

  Eigen::Index n() const { return x.size(); }
};

// Linear predictor of the true response model without gamma_0.
double response_offset(const ScenarioSpec& spec, double x, double y, const double* z);

GeneratedCohort generate_cohort(const ScenarioSpec& spec, const GenerativeModel& model, Rng& rng);
GeneratedCohort generate_cohort(const ScenarioSpec& spec, const GenerativeModel& model, std::uint64_t seed);

struct CalibrationResult {
  double gamma_0 = 0.0;
  double achieved_rate = 0.0;  // mean p_true over the calibration population
  int iterations = 0;
};

inline constexpr Eigen::Index kCalibrationPopulation = 1'000'000;
inline constexpr double kCalibrationTolerance = 0.002;

// Bisection on gamma_0 in [-10, 10] so that the mean true response
// probability of a fixed synthetic population hits target_rate.
// Throws BracketFailure if the target is not bracketed.
CalibrationResult calibrate_gamma0(const ScenarioSpec& spec, const GenerativeModel& model,
                                   double target_rate = kTargetResponseRate, std::uint64_t seed = 0,
                                   Eigen::Index population = kCalibrationPopulation);

enum class ExposureInResponse { Auto, Always, Never };

// Z = [1, x, z1, z3, z5, z7]; X = [1, (x), z1, z2, z3, z4] with x included
// when gamma_x != 0 under Auto. y is never a response covariate. Y is NaN
// where R = 0.
AnalysisDataset to_analysis_dataset(const GeneratedCohort& cohort, const ScenarioSpec& spec,
                                    ExposureInResponse exposure = ExposureInResponse::Auto);

}  // namespace ipwvar
