#include "ipwvar/csv_dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "ipwvar/errors.hpp"
#include "ipwvar/text_io.hpp"

namespace ipwvar {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

void validate_mapping(const ColumnMapping& m) {
  if (m.response_indicator.empty()) throw Error(ErrorCode::InvalidArgument, "response indicator column not set");
  if (m.outcome.empty()) throw Error(ErrorCode::InvalidArgument, "outcome column not set");
  if (m.outcome == m.response_indicator) {
    throw Error(ErrorCode::InvalidArgument, "outcome and response indicator must differ");
  }
  if (contains(m.response_covariates, m.outcome)) {
    throw Error(ErrorCode::InvalidArgument, "outcome '" + m.outcome + "' cannot be a response-model covariate");
  }
  if (contains(m.assoc_covariates, m.outcome)) {
    throw Error(ErrorCode::InvalidArgument, "outcome '" + m.outcome + "' cannot be an association covariate");
  }
  if (contains(m.response_covariates, m.response_indicator) || contains(m.assoc_covariates, m.response_indicator)) {
    throw Error(ErrorCode::InvalidArgument, "response indicator cannot be a covariate");
  }
  if (!m.variance_structure.empty() &&
      (m.variance_structure == m.outcome || m.variance_structure == m.response_indicator)) {
    throw Error(ErrorCode::InvalidArgument, "variance-structure column overlaps another role");
  }
  for (const auto* list : {&m.response_covariates, &m.assoc_covariates}) {
    for (std::size_t i = 0; i < list->size(); ++i) {
      if (std::count(list->begin(), list->end(), (*list)[i]) > 1) {
        throw Error(ErrorCode::InvalidArgument, "column '" + (*list)[i] + "' listed twice");
      }
    }
  }
}

AnalysisDataset parse_dataset(std::istream& in, const ColumnMapping& mapping) {
  validate_mapping(mapping);

  std::string line;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    if (!is_skippable_line(line)) header = split_fields(line);
  }
  if (header.empty()) throw Error(ErrorCode::InvalidArgument, "input has no header row");

  std::unordered_map<std::string, std::size_t> position;
  for (std::size_t k = 0; k < header.size(); ++k) position.emplace(header[k], k);
  auto column = [&](const std::string& name) {
    const auto it = position.find(name);
    if (it == position.end()) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not found");
    return it->second;
  };
  const std::size_t r_col = column(mapping.response_indicator);
  const std::size_t y_col = column(mapping.outcome);
  std::vector<std::size_t> x_cols;
  std::vector<std::size_t> z_cols;
  for (const auto& c : mapping.response_covariates) x_cols.push_back(column(c));
  for (const auto& c : mapping.assoc_covariates) z_cols.push_back(column(c));
  const bool has_v = !mapping.variance_structure.empty();
  const std::size_t v_col = has_v ? column(mapping.variance_structure) : 0;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_skippable_line(line)) continue;
    auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + " has " +
                                                  std::to_string(fields.size()) + " fields, header has " +
                                                  std::to_string(header.size()));
    }
    rows.push_back(std::move(fields));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "input has no data rows");

  auto value = [&](std::size_t row, std::size_t col) -> double {
    const std::string& f = rows[row][col];
    if (is_missing(f)) return nan;
    const auto v = parse_number(f);
    if (!v) {
      throw Error(ErrorCode::NonNumeric, "value '" + f + "' in column '" + header[col] + "' (data row " +
                                             std::to_string(row + 1) + ") is not numeric");
    }
    return *v;
  };

  AnalysisDataset data;
  data.x_names.push_back("(Intercept)");
  data.x_names.insert(data.x_names.end(), mapping.response_covariates.begin(), mapping.response_covariates.end());
  data.z_names.push_back("(Intercept)");
  data.z_names.insert(data.z_names.end(), mapping.assoc_covariates.begin(), mapping.assoc_covariates.end());
  data.X.resize(n, static_cast<Eigen::Index>(x_cols.size() + 1));
  data.Z.resize(n, static_cast<Eigen::Index>(z_cols.size() + 1));
  data.Y.resize(n);
  data.R.resize(n);
  data.v.resize(n);

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = static_cast<std::size_t>(i);
    const double r = value(row, r_col);
    if (!(r == 0.0 || r == 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "response indicator must be 0 or 1 (data row " +
                                                  std::to_string(row + 1) + ")");
    }
    data.R(i) = r;
    data.X(i, 0) = 1.0;
    for (std::size_t k = 0; k < x_cols.size(); ++k) {
      const double x = value(row, x_cols[k]);
      if (std::isnan(x)) {
        throw Error(ErrorCode::MissingInResponseCovariate, "response covariate '" + header[x_cols[k]] +
                                                               "' missing in data row " + std::to_string(row + 1));
      }
      data.X(i, static_cast<Eigen::Index>(k + 1)) = x;
    }
    data.Z(i, 0) = 1.0;
    for (std::size_t k = 0; k < z_cols.size(); ++k) data.Z(i, static_cast<Eigen::Index>(k + 1)) = value(row, z_cols[k]);
    data.Y(i) = value(row, y_col);
    data.v(i) = has_v ? value(row, v_col) : 1.0;

    if (r == 1.0 && (std::isnan(data.Y(i)) || !data.Z.row(i).allFinite() || std::isnan(data.v(i)))) {
      throw Error(ErrorCode::MissingInRespondent, "respondent in data row " + std::to_string(row + 1) +
                                                      " lacks outcome, association covariate or variance structure");
    }
    if (r == 0.0) data.Y(i) = nan;
  }
  validate(data);
  return data;
}

AnalysisDataset parse_dataset(const std::filesystem::path& path, const ColumnMapping& mapping) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "'");
  return parse_dataset(in, mapping);
}

void write_cohort_csv(std::ostream& out, const GeneratedCohort& cohort) {
  out << "R,y,x";
  for (int k = 1; k <= kCovariateCount; ++k) out << ",z" << k;
  out << '\n';
  for (Eigen::Index i = 0; i < cohort.n(); ++i) {
    out << (cohort.R(i) == 1.0 ? 1 : 0) << ',' << (cohort.R(i) == 1.0 ? format_number(cohort.y(i)) : "NA") << ','
        << format_number(cohort.x(i));
    for (int k = 0; k < kCovariateCount; ++k) out << ',' << format_number(cohort.z(i, k));
    out << '\n';
  }
}

ColumnMapping cohort_mapping(const ScenarioSpec& spec, ExposureInResponse exposure) {
  ColumnMapping m;
  m.response_indicator = "R";
  m.outcome = "y";
  const bool with_x = exposure == ExposureInResponse::Always ||
                      (exposure == ExposureInResponse::Auto && spec.gamma_x != 0.0);
  if (with_x) m.response_covariates.push_back("x");
  m.response_covariates.insert(m.response_covariates.end(), {"z1", "z2", "z3", "z4"});
  m.assoc_covariates = {"x", "z1", "z3", "z5", "z7"};
  return m;
}

}  // namespace ipwvar
