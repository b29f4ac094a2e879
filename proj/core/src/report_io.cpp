#include "ipwvar/report_io.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "ipwvar/errors.hpp"
#include "ipwvar/text_io.hpp"

namespace ipwvar {

namespace {

void write_provenance(std::ostream& out, const Provenance& provenance) {
  for (const auto& line : provenance) out << "# " << line << '\n';
}

std::string_view purpose_name(StreamPurpose p) {
  switch (p) {
    case StreamPurpose::Estimation: return "estimation";
    case StreamPurpose::Reference: return "reference";
    case StreamPurpose::Calibration: return "calibration";
  }
  return "estimation";
}

StreamPurpose parse_purpose(const std::string& s) {
  if (s == "estimation") return StreamPurpose::Estimation;
  if (s == "reference") return StreamPurpose::Reference;
  if (s == "calibration") return StreamPurpose::Calibration;
  throw Error(ErrorCode::InvalidArgument, "unknown record purpose '" + s + "'");
}

}  // namespace

void write_report_csv(std::ostream& out, const SimulationReport& report, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << "scenario,estimator,mean_V,V_ref,RB,n_fail,B,seed\n";
  for (const auto& c : report.cells) {
    out << c.scenario << ',' << to_string(c.estimator) << ',' << format_number(c.mean_v) << ',' << format_number(c.v_ref) << ',' << format_number(c.rb) << ','
        << c.n_fail << ',' << c.B << ',' << c.seed << '\n';
  }
}

void write_extended_report_csv(std::ostream& out, const SimulationReport& report,
                               const std::vector<std::string>& coefficient_names, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << "scenario,estimator,coefficient,mean_V,V_ref,RB,n_fail,B,seed\n";
  for (const auto& c : report.extended) {
    const auto idx = static_cast<std::size_t>(c.coefficient);
    const std::string name = idx < coefficient_names.size() ? coefficient_names[idx] : std::to_string(idx);
    out << c.scenario << ',' << to_string(c.estimator) << ',' << name << ',' << format_number(c.mean_v) << ',' << format_number(c.v_ref) << ','
        << format_number(c.rb) << ',' << c.n_fail << ',' << c.B << ',' << c.seed << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SimulationReport& report, const Provenance& provenance) {
  write_provenance(out, provenance);
  out << "scenario,B,n_fail,ref_B,ref_fail,mean_response_rate,mean_beta_x,sd_beta_x,valid\n";
  for (const auto& s : report.summaries) {
    const bool has_x = s.mean_beta.size() > kExposureCoefficient;
    out << s.scenario << ',' << s.B << ',' << s.n_fail << ',' << s.ref_B << ',' << s.ref_fail << ','
        << format_number(s.mean_response_rate) << ','
        << (has_x ? format_number(s.mean_beta(kExposureCoefficient)) : "NA") << ','
        << (has_x ? format_number(s.sd_beta(kExposureCoefficient)) : "NA") << ',' << (s.valid ? 1 : 0) << '\n';
  }
}

void write_records_csv(std::ostream& out, const std::vector<ReplicateRecord>& records, const Provenance& provenance) {
  Eigen::Index p = 0;
  for (const auto& r : records) p = std::max(p, r.beta_hat.size());

  write_provenance(out, provenance);
  out << "scenario,scenario_index,purpose,replicate,status,failure,response_rate,converged,iterations,clamp_count";
  for (Eigen::Index k = 0; k < p; ++k) out << ",beta_" << k;
  for (EstimatorKind kind : kAllEstimators) {
    for (Eigen::Index k = 0; k < p; ++k) out << ',' << to_string(kind) << '_' << k;
  }
  out << '\n';

  for (const auto& r : records) {
    out << r.scenario << ',' << r.scenario_index << ',' << purpose_name(r.purpose) << ',' << r.replicate << ','
        << (r.ok ? "ok" : "failed") << ',' << (r.ok ? "" : r.failure) << ',' << format_number(r.response_rate) << ','
        << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << r.clamp_count;
    for (Eigen::Index k = 0; k < p; ++k) {
      out << ',' << (r.ok && k < r.beta_hat.size() ? format_number(r.beta_hat(k)) : "NA");
    }
    for (std::size_t e = 0; e < 3; ++e) {
      for (Eigen::Index k = 0; k < p; ++k) {
        out << ',' << (r.ok && k < r.variance[e].size() ? format_number(r.variance[e](k)) : "NA");
      }
    }
    out << '\n';
  }
}

RecordsFile read_records_csv(std::istream& in) {
  RecordsFile file;
  std::vector<ReplicateRecord>& records = file.records;
  std::string line;
  std::vector<std::string> header;
  Eigen::Index p = 0;
  constexpr std::size_t kFixed = 10;
  while (std::getline(in, line)) {
    if (header.empty() && line.rfind("# ", 0) == 0) {
      file.provenance.push_back(line.substr(2));
      continue;
    }
    if (is_skippable_line(line)) continue;
    auto f = split_fields(line);
    if (header.empty()) {
      header = std::move(f);
      if (header.size() < kFixed || header[0] != "scenario" || (header.size() - kFixed) % 4 != 0) {
        throw Error(ErrorCode::InvalidArgument, "not a replicate-record table");
      }
      p = static_cast<Eigen::Index>((header.size() - kFixed) / 4);
      continue;
    }
    if (f.size() != header.size()) {
      throw Error(ErrorCode::InvalidArgument, "record line has " + std::to_string(f.size()) + " fields, expected " +
                                                  std::to_string(header.size()));
    }
    auto num = [&](std::size_t k) {
      const auto v = parse_number(f[k]);
      if (!v) throw Error(ErrorCode::NonNumeric, "field '" + f[k] + "' in column " + header[k] + " is not numeric");
      return *v;
    };
    ReplicateRecord r;
    r.scenario = f[0];
    r.scenario_index = static_cast<int>(num(1));
    r.purpose = parse_purpose(f[2]);
    r.replicate = static_cast<std::int64_t>(num(3));
    r.ok = f[4] == "ok";
    r.failure = f[5];
    r.response_rate = num(6);
    r.converged = num(7) != 0.0;
    r.iterations = static_cast<int>(num(8));
    r.clamp_count = static_cast<int>(num(9));
    if (r.ok) {
      r.beta_hat.resize(p);
      for (Eigen::Index k = 0; k < p; ++k) r.beta_hat(k) = num(kFixed + static_cast<std::size_t>(k));
      for (std::size_t e = 0; e < 3; ++e) {
        r.variance[e].resize(p);
        for (Eigen::Index k = 0; k < p; ++k) {
          r.variance[e](k) = num(kFixed + static_cast<std::size_t>((1 + e) * p + k));
        }
      }
    }
    records.push_back(std::move(r));
  }
  if (header.empty()) throw Error(ErrorCode::InvalidArgument, "replicate-record table has no header");
  return file;
}

std::string provenance_value(const Provenance& provenance, const std::string& key) {
  const std::string prefix = key + "=";
  for (const auto& line : provenance) {
    if (line.rfind(prefix, 0) == 0) return line.substr(prefix.size());
  }
  return {};
}

}  // namespace ipwvar
