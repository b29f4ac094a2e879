#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ipwvar/mc_harness.hpp"

namespace ipwvar {

// Leading '#' lines written before every table so a file carries its own
// provenance. Must not contain anything that varies between identical runs.
using Provenance = std::vector<std::string>;

// scenario,estimator,mean_V,V_ref,RB,n_fail,B,seed  (exposure coefficient)
void write_report_csv(std::ostream& out, const SimulationReport& report, const Provenance& provenance);

// scenario,estimator,coefficient,mean_V,V_ref,RB,n_fail,B,seed  (all coefficients)
void write_extended_report_csv(std::ostream& out, const SimulationReport& report,
                               const std::vector<std::string>& coefficient_names, const Provenance& provenance);

// scenario,B,n_fail,ref_B,ref_fail,mean_response_rate,mean_beta_x,sd_beta_x,valid
void write_summary_csv(std::ostream& out, const SimulationReport& report, const Provenance& provenance);

// One line per replicate with full-precision numbers, so re-aggregating a
// saved file reproduces the report exactly.
void write_records_csv(std::ostream& out, const std::vector<ReplicateRecord>& records, const Provenance& provenance);

struct RecordsFile {
  Provenance provenance;
  std::vector<ReplicateRecord> records;
};
RecordsFile read_records_csv(std::istream& in);

// Value of a "key=value" provenance line, or empty.
std::string provenance_value(const Provenance& provenance, const std::string& key);

}  // namespace ipwvar
