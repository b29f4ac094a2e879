#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ipwvar/dataset.hpp"
#include "ipwvar/sim_datagen.hpp"

namespace ipwvar {

// Which input columns play which role. Intercepts are added by the reader
// and must not appear in the file.
struct ColumnMapping {
  std::string response_indicator;
  std::string outcome;
  std::vector<std::string> response_covariates;
  std::vector<std::string> assoc_covariates;
  std::string variance_structure;  // empty: v = 1
};

// Rejects overlapping roles (outcome among response covariates, indicator
// used as a covariate, ...). Throws InvalidArgument.
void validate_mapping(const ColumnMapping& mapping);

// Comma-delimited table with a header row; empty fields and "NA" are
// missing. Throws MissingColumn, NonNumeric, MissingInRespondent or
// MissingInResponseCovariate.
AnalysisDataset parse_dataset(std::istream& in, const ColumnMapping& mapping);
AnalysisDataset parse_dataset(const std::filesystem::path& path, const ColumnMapping& mapping);

// R,y,x,z1..z7 with y written as NA for nonrespondents.
void write_cohort_csv(std::ostream& out, const GeneratedCohort& cohort);

// Mapping that turns write_cohort_csv output back into to_analysis_dataset(cohort, spec, exposure).
ColumnMapping cohort_mapping(const ScenarioSpec& spec, ExposureInResponse exposure = ExposureInResponse::Auto);

}  // namespace ipwvar
