#include "ipwvar/mc_harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "ipwvar/association_model.hpp"
#include "ipwvar/errors.hpp"

namespace ipwvar {

ReplicateRecord run_replicate(const ScenarioSpec& spec, const GenerativeModel& model, std::int64_t replicate_index,
                              std::uint64_t base_seed, StreamPurpose purpose, const HarnessOptions& opts) {
  ReplicateRecord rec;
  rec.scenario = spec.label;
  rec.scenario_index = spec.index;
  rec.purpose = purpose;
  rec.replicate = replicate_index;

  Rng rng = make_stream(base_seed, static_cast<std::uint64_t>(spec.index),
                        static_cast<std::uint64_t>(replicate_index), purpose);
  const GeneratedCohort cohort = generate_cohort(spec, model, rng);
  rec.response_rate = cohort.R.mean();

  try {
    const AnalysisDataset data = to_analysis_dataset(cohort, spec, opts.exposure);
    const ResponseFit rfit = fit_response(data, opts.fit);
    rec.converged = rfit.converged;
    rec.iterations = rfit.iterations;
    rec.clamp_count = rfit.clamp_count;

    const AssociationFit afit = fit_weighted_linear(data, rfit.p_hat);
    rec.beta_hat = afit.beta_hat;

    const VarianceEstimate naive = naive_variance(afit, rfit.p_hat, data);
    const RobustResult robust = robust_variance(afit, rfit, data);
    const LinearizedResult lin = linearized_variance(afit, rfit, data);
    const std::array<const Eigen::MatrixXd*, 3> covs{&naive.cov, &robust.estimate.cov, &lin.estimate.cov};
    for (std::size_t k = 0; k < covs.size(); ++k) {
      rec.variance[k] = covs[k]->diagonal();
      if (opts.keep_matrices) rec.cov[k] = *covs[k];
    }
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.failure = std::string(to_string(e.code()));
    rec.failure_detail = e.what();
  }
  return rec;
}

std::vector<ReplicateRecord> run_scenario(const ScenarioSpec& spec, const GenerativeModel& model, std::int64_t B,
                                          std::uint64_t base_seed, int parallelism, StreamPurpose purpose,
                                          const HarnessOptions& opts) {
  if (B < 1) throw Error(ErrorCode::InvalidArgument, "number of replicates must be at least 1");
  std::vector<ReplicateRecord> records(static_cast<std::size_t>(B));
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (std::int64_t b = next++; b < B; b = next++) {
      records[static_cast<std::size_t>(b)] = run_replicate(spec, model, b, base_seed, purpose, opts);
    }
  };

  int threads = parallelism > 0 ? parallelism : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::int64_t>(threads, B));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return records;
}

Eigen::VectorXd empirical_variance(const std::vector<ReplicateRecord>& records) {
  Eigen::Index p = 0;
  for (const auto& r : records) {
    if (r.ok) {
      p = r.beta_hat.size();
      break;
    }
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p);
  std::int64_t count = 0;
  for (const auto& r : records) {
    if (!r.ok) continue;
    mean += r.beta_hat;
    ++count;
  }
  if (count < 2) return Eigen::VectorXd::Constant(p, std::numeric_limits<double>::quiet_NaN());
  mean /= static_cast<double>(count);
  Eigen::VectorXd ss = Eigen::VectorXd::Zero(p);
  for (const auto& r : records) {
    if (!r.ok) continue;
    ss += (r.beta_hat - mean).array().square().matrix();
  }
  return ss / static_cast<double>(count - 1);
}

Eigen::VectorXd reference_variance(const ScenarioSpec& spec, const GenerativeModel& model, std::int64_t B_ref,
                                   std::uint64_t seed, int parallelism, const HarnessOptions& opts) {
  return empirical_variance(run_scenario(spec, model, B_ref, seed, parallelism, StreamPurpose::Reference, opts));
}

double relative_bias(double mean_v, double v_ref) {
  if (!(v_ref > 0.0)) throw Error(ErrorCode::ZeroReference, "reference variance must be positive");
  return (mean_v - v_ref) / v_ref;
}

const ReportCell& SimulationReport::cell(const std::string& scenario, EstimatorKind kind) const {
  for (const auto& c : cells) {
    if (c.scenario == scenario && c.estimator == kind) return c;
  }
  throw Error(ErrorCode::UnknownScenario, "no report cell for " + scenario);
}

const ScenarioSummary& SimulationReport::summary(const std::string& scenario) const {
  for (const auto& s : summaries) {
    if (s.scenario == scenario) return s;
  }
  throw Error(ErrorCode::UnknownScenario, "no summary for " + scenario);
}

SimulationReport build_report(std::vector<ReplicateRecord> records, std::uint64_t seed) {
  // Canonical order makes every floating-point fold independent of input order.
  std::sort(records.begin(), records.end(), [](const ReplicateRecord& a, const ReplicateRecord& b) {
    if (a.scenario_index != b.scenario_index) return a.scenario_index < b.scenario_index;
    if (a.purpose != b.purpose) return a.purpose < b.purpose;
    return a.replicate < b.replicate;
  });

  struct Group {
    std::string label;
    std::vector<ReplicateRecord> estimation;
    std::vector<ReplicateRecord> reference;
  };
  std::map<int, Group> groups;
  for (auto& r : records) {
    Group& g = groups[r.scenario_index];
    g.label = r.scenario;
    if (r.purpose == StreamPurpose::Reference) {
      g.reference.push_back(std::move(r));
    } else {
      g.estimation.push_back(std::move(r));
    }
  }

  SimulationReport report;
  report.seed = seed;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (auto& [index, g] : groups) {
    if (g.reference.empty()) {
      throw Error(ErrorCode::InvalidArgument, "scenario " + g.label + " has no reference records");
    }
    ScenarioSummary sum;
    sum.scenario = g.label;
    sum.scenario_index = index;
    sum.B = static_cast<std::int64_t>(g.estimation.size());
    sum.ref_B = static_cast<std::int64_t>(g.reference.size());

    Eigen::Index p = 0;
    double rate_total = 0.0;
    for (const auto& r : g.estimation) {
      rate_total += r.response_rate;
      if (!r.ok) ++sum.n_fail;
      else p = r.beta_hat.size();
    }
    for (const auto& r : g.reference) {
      if (!r.ok) ++sum.ref_fail;
      else if (p == 0) p = r.beta_hat.size();
    }
    sum.mean_response_rate = sum.B > 0 ? rate_total / static_cast<double>(sum.B) : nan;

    const std::int64_t ok_count = sum.B - sum.n_fail;
    sum.mean_beta = Eigen::VectorXd::Zero(p);
    std::array<Eigen::VectorXd, 3> mean_var;
    for (auto& m : mean_var) m = Eigen::VectorXd::Zero(p);
    for (const auto& r : g.estimation) {
      if (!r.ok) continue;
      sum.mean_beta += r.beta_hat;
      for (std::size_t k = 0; k < 3; ++k) mean_var[k] += r.variance[k];
    }
    if (ok_count > 0) {
      sum.mean_beta /= static_cast<double>(ok_count);
      for (auto& m : mean_var) m /= static_cast<double>(ok_count);
    } else {
      sum.mean_beta.setConstant(nan);
      for (auto& m : mean_var) m.setConstant(nan);
    }
    sum.sd_beta = empirical_variance(g.estimation).array().sqrt();

    const Eigen::VectorXd v_ref = empirical_variance(g.reference);
    const auto max_fail = [](std::int64_t total) { return kMaxFailureShare * static_cast<double>(total); };
    sum.valid = static_cast<double>(sum.n_fail) <= max_fail(sum.B) &&
                static_cast<double>(sum.ref_fail) <= max_fail(sum.ref_B);
    report.valid = report.valid && sum.valid;

    for (Eigen::Index coef = 0; coef < p; ++coef) {
      for (std::size_t k = 0; k < 3; ++k) {
        ReportCell c;
        c.scenario = g.label;
        c.estimator = kAllEstimators[k];
        c.coefficient = coef;
        c.mean_v = mean_var[k](coef);
        c.v_ref = v_ref(coef);
        c.rb = v_ref(coef) > 0.0 ? relative_bias(c.mean_v, c.v_ref) : nan;
        c.n_fail = sum.n_fail;
        c.B = sum.B;
        c.seed = seed;
        if (coef == kExposureCoefficient) report.cells.push_back(c);
        report.extended.push_back(c);
      }
    }
    report.summaries.push_back(std::move(sum));
  }
  return report;
}

}  // namespace ipwvar
