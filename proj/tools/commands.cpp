#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "ipwvar/association_model.hpp"
#include "ipwvar/errors.hpp"
#include "ipwvar/report_io.hpp"
#include "ipwvar/response_model.hpp"
#include "ipwvar/scenario_registry.hpp"
#include "ipwvar/text_io.hpp"

namespace ipwvar::cli {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

// Writes to `path` when set, otherwise to `fallback`.
template <typename Write>
void emit(const std::string& path, std::ostream& fallback, Write&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  write(file);
  if (!file) throw Error(ErrorCode::Io, "write to '" + path + "' failed");
}

// report.csv -> report.<tag>.csv
std::string sibling_path(const std::string& path, const std::string& tag) {
  std::filesystem::path p(path);
  const std::string ext = p.has_extension() ? p.extension().string() : std::string(".csv");
  p.replace_extension();
  return p.string() + "." + tag + ext;
}

int report_error(std::ostream& err, const Error& e) {
  err << "error," << to_string(e.code()) << ',' << e.what() << '\n';
  const bool usage = e.code() == ErrorCode::UnknownScenario || e.code() == ErrorCode::InvalidArgument;
  return usage ? kExitUsage : kExitFailure;
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    return report_error(err, e);
  } catch (const std::exception& e) {
    err << "error,Io," << e.what() << '\n';
    return kExitFailure;
  }
}

void write_simulation_outputs(const RunConfig& cfg, const SimulationReport& report, const Provenance& provenance,
                              std::ostream& out) {
  emit(cfg.out, out, [&](std::ostream& os) { write_report_csv(os, report, provenance); });
  if (cfg.out.empty()) return;
  static const std::vector<std::string> names{"(Intercept)", "x", "z1", "z3", "z5", "z7"};
  emit(sibling_path(cfg.out, "extended"), out,
       [&](std::ostream& os) { write_extended_report_csv(os, report, names, provenance); });
  emit(sibling_path(cfg.out, "summary"), out, [&](std::ostream& os) { write_summary_csv(os, report, provenance); });
}

}  // namespace

std::vector<EstimatorKind> parse_estimator_selection(const std::string& selection) {
  if (selection == "all") return {kAllEstimators.begin(), kAllEstimators.end()};
  std::vector<EstimatorKind> kinds;
  for (const std::string& name : split_fields(selection)) {
    const auto kind = parse_estimator(name);
    if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + name + "'");
    if (std::find(kinds.begin(), kinds.end(), *kind) == kinds.end()) kinds.push_back(*kind);
  }
  if (kinds.empty()) throw Error(ErrorCode::InvalidArgument, "no estimator selected");
  std::sort(kinds.begin(), kinds.end());
  return kinds;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto kinds = parse_estimator_selection(cfg.estimator);
    if (cfg.data.empty()) throw Error(ErrorCode::InvalidArgument, "--data is required");
    const AnalysisDataset data = parse_dataset(std::filesystem::path(cfg.data), cfg.mapping);
    const ResponseFit rfit = fit_response(data);
    const AssociationFit afit = fit_weighted_linear(data, rfit.p_hat);

    std::vector<VarianceEstimate> estimates;
    for (EstimatorKind kind : kinds) {
      switch (kind) {
        case EstimatorKind::Naive: estimates.push_back(naive_variance(afit, rfit.p_hat, data)); break;
        case EstimatorKind::Robust: estimates.push_back(robust_variance(afit, rfit, data).estimate); break;
        case EstimatorKind::Linearized: estimates.push_back(linearized_variance(afit, rfit, data).estimate); break;
      }
    }
    Eigen::VectorXd unscaled_se;
    if (cfg.naive_unscaled) unscaled_se = naive_variance_unscaled(rfit.p_hat, data).diagonal().array().sqrt();

    double w_min = std::numeric_limits<double>::infinity();
    double w_max = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      if (!data.responded(i)) continue;
      w_min = std::min(w_min, 1.0 / rfit.p_hat(i));
      w_max = std::max(w_max, 1.0 / rfit.p_hat(i));
    }

    emit(cfg.out, out, [&](std::ostream& os) {
      const ColumnMapping& m = cfg.mapping;
      os << "# ipwvar fit\n"
         << "# data=" << cfg.data << '\n'
         << "# response_indicator=" << m.response_indicator << '\n'
         << "# outcome=" << m.outcome << '\n'
         << "# response_covariates=" << join(m.response_covariates, ";") << '\n'
         << "# assoc_covariates=" << join(m.assoc_covariates, ";") << '\n'
         << "# variance_structure=" << (m.variance_structure.empty() ? "1" : m.variance_structure) << '\n'
         << "# estimator=" << cfg.estimator << '\n';
      os << "coefficient,beta";
      for (const auto& e : estimates) os << ",se_" << to_string(e.kind);
      if (cfg.naive_unscaled) os << ",se_naive_unscaled";
      os << '\n';
      for (Eigen::Index k = 0; k < data.p(); ++k) {
        os << data.z_names[static_cast<std::size_t>(k)] << ',' << format_number(afit.beta_hat(k));
        for (const auto& e : estimates) os << ',' << format_number(e.se(k));
        if (cfg.naive_unscaled) os << ',' << format_number(unscaled_se(k));
        os << '\n';
      }
      os << "# diagnostics\n"
         << "# n=" << data.n() << '\n'
         << "# respondents=" << data.respondent_count() << '\n'
         << "# response_converged=" << (rfit.converged ? 1 : 0) << '\n'
         << "# response_iterations=" << rfit.iterations << '\n'
         << "# score_norm=" << format_number(rfit.final_gradient_norm) << '\n'
         << "# weight_min=" << format_number(w_min) << '\n'
         << "# weight_max=" << format_number(w_max) << '\n'
         << "# clamp_count=" << rfit.clamp_count << '\n'
         << "# sigma2_hat=" << format_number(afit.sigma2_hat) << '\n';
    });
    return kExitOk;
  });
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.reps < 1) throw Error(ErrorCode::InvalidArgument, "--reps must be at least 1");
    if (cfg.cohort_size < 2) throw Error(ErrorCode::InvalidArgument, "cohort size must be at least 2");
    std::vector<ScenarioSpec> registry;
    if (cfg.registry.empty()) {
      registry = scenario_registry();
    } else {
      std::ifstream in(cfg.registry);
      if (!in) throw Error(ErrorCode::Io, "cannot open registry '" + cfg.registry + "'");
      registry = read_registry(in);
    }
    std::vector<ScenarioSpec> scenarios = select_scenarios(cfg.scenario, registry);
    for (auto& s : scenarios) s.n = cfg.cohort_size;

    const std::uint64_t seed = cfg.seed.value_or(kDefaultSimulationSeed);
    const std::int64_t ref_reps = cfg.ref_reps > 0 ? cfg.ref_reps : cfg.reps;
    const GenerativeModel model = default_generative_model();
    HarnessOptions opts;
    opts.exposure = cfg.include_exposure ? ExposureInResponse::Always : ExposureInResponse::Auto;

    std::vector<ReplicateRecord> records;
    std::vector<std::string> labels;
    std::vector<std::string> gammas;
    for (const auto& s : scenarios) {
      labels.push_back(s.label);
      gammas.push_back(s.label + ":" + format_number(s.gamma_0));
      auto est = run_scenario(s, model, cfg.reps, seed, cfg.parallelism, StreamPurpose::Estimation, opts);
      auto ref = run_scenario(s, model, ref_reps, seed, cfg.parallelism, StreamPurpose::Reference, opts);
      std::move(est.begin(), est.end(), std::back_inserter(records));
      std::move(ref.begin(), ref.end(), std::back_inserter(records));
    }

    Provenance provenance{
        "ipwvar simulate",
        "scenarios=" + join(labels),
        "reps=" + std::to_string(cfg.reps),
        "ref_reps=" + std::to_string(ref_reps),
        "seed=" + std::to_string(seed),
        "n=" + std::to_string(cfg.cohort_size),
        "exposure_in_response=" + std::string(cfg.include_exposure ? "always" : "auto"),
        "registry=" + (cfg.registry.empty() ? std::string("builtin") : cfg.registry),
        "gamma_0=" + join(gammas, ";"),
        "generative_model=a:" + format_number(model.exposure_coef) + ";beta:" +
            format_number(model.outcome_exposure_coef) + ";b:" + format_number(model.outcome_covariate_coef),
    };
    if (!cfg.records.empty()) {
      emit(cfg.records, out, [&](std::ostream& os) { write_records_csv(os, records, provenance); });
    }

    const SimulationReport report = build_report(std::move(records), seed);
    provenance.push_back("report_valid=" + std::string(report.valid ? "1" : "0"));
    write_simulation_outputs(cfg, report, provenance, out);

    err << "simulate: seed=" << seed << " reps=" << cfg.reps << " ref_reps=" << ref_reps
        << " scenarios=" << join(labels) << (report.valid ? "" : " (report flagged invalid: failures above 1%)")
        << '\n';
    return kExitOk;
  });
}

int cmd_calibrate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::uint64_t seed = cfg.seed.value_or(kRegistryDerivationSeed);
    const auto records = calibrate_registry(default_generative_model(), cfg.target_rate, seed, cfg.population);
    emit(cfg.out, out, [&](std::ostream& os) {
      os << "# ipwvar calibrate\n"
         << "# target_rate=" << format_number(cfg.target_rate) << '\n'
         << "# population=" << cfg.population << '\n'
         << "# seed=" << seed << '\n';
      write_registry(os, records);
    });
    return kExitOk;
  });
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.data.empty()) throw Error(ErrorCode::InvalidArgument, "--data (replicate-record file) is required");
    std::ifstream in(cfg.data);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + cfg.data + "'");
    RecordsFile file = read_records_csv(in);

    std::uint64_t seed = cfg.seed.value_or(0);
    if (const std::string s = provenance_value(file.provenance, "seed"); !s.empty() && !cfg.seed) {
      seed = std::stoull(s);
    }
    const SimulationReport report = build_report(std::move(file.records), seed);
    Provenance provenance = file.provenance;
    provenance.push_back("report_valid=" + std::string(report.valid ? "1" : "0"));
    write_simulation_outputs(cfg, report, provenance, out);
    return kExitOk;
  });
}

}  // namespace ipwvar::cli
