#include "ipwvar/sim_datagen.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ipwvar/errors.hpp"
#include "ipwvar/response_model.hpp"

namespace ipwvar {

namespace {

struct Draw {
  std::array<double, kCovariateCount> z;
  double x;
  double y;
};

Draw draw_individual(const GenerativeModel& m, Rng& rng, std::normal_distribution<double>& normal) {
  Draw d;
  for (double& zk : d.z) zk = normal(rng);
  const double eps = normal(rng);
  const double eps_prime = normal(rng);
  d.x = m.exposure_intercept + m.exposure_coef * (d.z[0] + d.z[1] + d.z[4] + d.z[5]) + m.exposure_noise_sd * eps;
  d.y = m.outcome_intercept + m.outcome_exposure_coef * d.x +
        m.outcome_covariate_coef * (d.z[0] + d.z[2] + d.z[4] + d.z[6]) + m.outcome_noise_sd * eps_prime;
  return d;
}

double mean_probability(const std::vector<double>& offsets, double gamma_0) {
  double total = 0.0;
  for (double eta : offsets) total += expit(gamma_0 + eta);
  return total / static_cast<double>(offsets.size());
}

}  // namespace

double derive_exposure_coefficient(double target_corr) {
  // corr(x, z_k) = a / sqrt(4 a^2 + 1)  =>  a = c / sqrt(1 - 4 c^2)
  if (!(std::abs(target_corr) < 0.5)) {
    throw Error(ErrorCode::NoSolution, "exposure-covariate correlation must satisfy |c| < 0.5 with four covariates");
  }
  return target_corr / std::sqrt(1.0 - 4.0 * target_corr * target_corr);
}

OutcomeCoefficients derive_outcome_coefficients(double a, double corr_yx, double corr_yz,
                                                CorrelationAnchor anchor) {
  if (!(std::abs(corr_yx) < 1.0) || !(std::abs(corr_yz) < 1.0)) {
    throw Error(ErrorCode::NoSolution, "correlation targets must lie in (-1, 1)");
  }
  // Moments with s = sd(y):
  //   Var(x) = 4a^2 + 1, Cov(y, x) = beta Var(x) + 2ab,
  //   Cov(y, z1) = beta a + b, Cov(y, z3) = b,
  //   Var(y) = beta^2 Var(x) + 4b^2 + 4ab beta + 1.
  // Both targets are linear in s: beta = k1 s, b = k2 s.
  const double var_x = 4.0 * a * a + 1.0;
  const double sd_x = std::sqrt(var_x);
  double k1 = 0.0;
  double k2 = 0.0;
  if (anchor == CorrelationAnchor::OutcomeOnlyCovariate) {
    k2 = corr_yz;
    k1 = (corr_yx * sd_x - 2.0 * a * corr_yz) / var_x;
  } else {
    const double denom = var_x - 2.0 * a * a;
    k1 = (corr_yx * sd_x - 2.0 * a * corr_yz) / denom;
    k2 = corr_yz - a * k1;
  }
  // Var(y) = s^2 Q + 1 = s^2
  const double explained = k1 * k1 * var_x + 4.0 * k2 * k2 + 4.0 * a * k1 * k2;
  if (!(explained < 1.0)) {
    std::ostringstream msg;
    msg << "targets (" << corr_yx << ", " << corr_yz << ") require explained variance share " << explained;
    throw Error(ErrorCode::NoSolution, msg.str());
  }
  const double s = 1.0 / std::sqrt(1.0 - explained);
  return {k1 * s, k2 * s};
}

GenerativeModel default_generative_model() {
  GenerativeModel m;
  m.exposure_coef = derive_exposure_coefficient();
  const OutcomeCoefficients oc = derive_outcome_coefficients(m.exposure_coef);
  m.outcome_exposure_coef = oc.beta;
  m.outcome_covariate_coef = oc.b;
  return m;
}

std::vector<ScenarioSpec> scenario_grid() {
  struct Row {
    const char* label;
    double gx;
    double gy;
  };
  static constexpr Row rows[] = {
      {"MAR1", 0.0, 0.0},  {"MAR2", 0.2, 0.0},  {"MAR3", 0.5, 0.0},
      {"MNAR1", 0.0, 0.2}, {"MNAR2", 0.2, 0.2}, {"MNAR3", 0.5, 0.2},
      {"MNAR4", 0.0, 0.5}, {"MNAR5", 0.2, 0.5}, {"MNAR6", 0.5, 0.5},
  };
  std::vector<ScenarioSpec> grid;
  int index = 0;
  for (const Row& r : rows) {
    ScenarioSpec s;
    s.label = r.label;
    s.index = index++;
    s.gamma_x = r.gx;
    s.gamma_y = r.gy;
    grid.push_back(s);
  }
  return grid;
}

double response_offset(const ScenarioSpec& spec, double x, double y, const double* z) {
  return spec.gamma_y * y + spec.gamma_x * x + spec.gamma_z[0] * z[0] + spec.gamma_z[1] * z[1] +
         spec.gamma_z[2] * z[2] + spec.gamma_z[3] * z[3];
}

GeneratedCohort generate_cohort(const ScenarioSpec& spec, const GenerativeModel& model, Rng& rng) {
  if (spec.n < 1) throw Error(ErrorCode::InvalidArgument, "cohort size must be positive");
  const Eigen::Index n = spec.n;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  GeneratedCohort c;
  c.model = model;
  c.z.resize(n, kCovariateCount);
  c.x.resize(n);
  c.y.resize(n);
  c.p_true.resize(n);
  c.R.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Draw d = draw_individual(model, rng, normal);
    for (int k = 0; k < kCovariateCount; ++k) c.z(i, k) = d.z[k];
    c.x(i) = d.x;
    c.y(i) = d.y;
    c.p_true(i) = expit(spec.gamma_0 + response_offset(spec, d.x, d.y, d.z.data()));
    c.R(i) = uniform(rng) < c.p_true(i) ? 1.0 : 0.0;
  }
  return c;
}

GeneratedCohort generate_cohort(const ScenarioSpec& spec, const GenerativeModel& model, std::uint64_t seed) {
  Rng rng = make_stream(seed, static_cast<std::uint64_t>(spec.index), 0);
  return generate_cohort(spec, model, rng);
}

CalibrationResult calibrate_gamma0(const ScenarioSpec& spec, const GenerativeModel& model, double target_rate,
                                   std::uint64_t seed, Eigen::Index population) {
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "target response rate must lie in (0, 1)");
  }
  if (population < 1) throw Error(ErrorCode::InvalidArgument, "calibration population must be positive");

  Rng rng = make_stream(seed, static_cast<std::uint64_t>(spec.index), 0, StreamPurpose::Calibration);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> offsets(static_cast<std::size_t>(population));
  for (double& eta : offsets) {
    const Draw d = draw_individual(model, rng, normal);
    eta = response_offset(spec, d.x, d.y, d.z.data());
  }

  double lo = -10.0;
  double hi = 10.0;
  if (mean_probability(offsets, lo) > target_rate || mean_probability(offsets, hi) < target_rate) {
    throw Error(ErrorCode::BracketFailure, "target response rate not attainable for gamma_0 in [-10, 10]");
  }
  CalibrationResult result;
  while (hi - lo > 1e-12 && result.iterations < 200) {
    const double mid = 0.5 * (lo + hi);
    if (mean_probability(offsets, mid) < target_rate) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++result.iterations;
  }
  result.gamma_0 = 0.5 * (lo + hi);
  result.achieved_rate = mean_probability(offsets, result.gamma_0);
  if (!(std::abs(result.achieved_rate - target_rate) <= kCalibrationTolerance)) {
    throw Error(ErrorCode::BracketFailure, "bisection did not reach the target response rate");
  }
  return result;
}

AnalysisDataset to_analysis_dataset(const GeneratedCohort& cohort, const ScenarioSpec& spec,
                                    ExposureInResponse exposure) {
  const Eigen::Index n = cohort.n();
  const bool with_x = exposure == ExposureInResponse::Always ||
                      (exposure == ExposureInResponse::Auto && spec.gamma_x != 0.0);

  AnalysisDataset data;
  data.z_names = {"(Intercept)", "x", "z1", "z3", "z5", "z7"};
  data.Z.resize(n, 6);
  data.Z.col(0).setOnes();
  data.Z.col(1) = cohort.x;
  data.Z.col(2) = cohort.z.col(0);
  data.Z.col(3) = cohort.z.col(2);
  data.Z.col(4) = cohort.z.col(4);
  data.Z.col(5) = cohort.z.col(6);

  data.x_names = {"(Intercept)"};
  data.X.resize(n, with_x ? 6 : 5);
  data.X.col(0).setOnes();
  Eigen::Index col = 1;
  if (with_x) {
    data.x_names.push_back("x");
    data.X.col(col++) = cohort.x;
  }
  for (int k = 0; k < 4; ++k) {
    data.x_names.push_back("z" + std::to_string(k + 1));
    data.X.col(col++) = cohort.z.col(k);
  }

  data.R = cohort.R;
  data.v = Eigen::VectorXd::Ones(n);
  data.Y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    data.Y(i) = cohort.R(i) == 1.0 ? cohort.y(i) : std::numeric_limits<double>::quiet_NaN();
  }
  return data;
}

}  // namespace ipwvar
