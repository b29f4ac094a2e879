#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "ipwvar/csv_dataset.hpp"
#include "ipwvar/errors.hpp"
#include "ipwvar/scenario_registry.hpp"

namespace ipwvar {
namespace {

ColumnMapping simple_mapping() {
  ColumnMapping m;
  m.response_indicator = "R";
  m.outcome = "y";
  m.response_covariates = {"w"};
  m.assoc_covariates = {"x"};
  return m;
}

ErrorCode parse_error(const std::string& text, const ColumnMapping& m = simple_mapping()) {
  std::istringstream in(text);
  try {
    parse_dataset(in, m);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return ErrorCode::Io;
}

TEST(ParseDataset, MasksNonrespondentOutcome) {
  std::istringstream in("R,y,w,x\n1,2.5,0.1,1\n1,3.0,-0.2,2\n0,,0.4,NA\n0,NA,1.5,\n");
  const auto d = parse_dataset(in, simple_mapping());
  EXPECT_EQ(d.n(), 4);
  EXPECT_EQ(d.q(), 2);
  EXPECT_EQ(d.p(), 2);
  EXPECT_EQ(d.Y(0), 2.5);
  EXPECT_EQ(d.Y(1), 3.0);
  EXPECT_TRUE(std::isnan(d.Y(2)));
  EXPECT_TRUE(std::isnan(d.Y(3)));
  EXPECT_TRUE((d.X.col(0).array() == 1.0).all());
  EXPECT_TRUE((d.Z.col(0).array() == 1.0).all());
  EXPECT_EQ(d.X(3, 1), 1.5);
  EXPECT_EQ(d.x_names, (std::vector<std::string>{"(Intercept)", "w"}));
  EXPECT_EQ(d.z_names, (std::vector<std::string>{"(Intercept)", "x"}));
  EXPECT_TRUE((d.v.array() == 1.0).all());
}

TEST(ParseDataset, OutcomeOfNonrespondentIsIgnored) {
  std::istringstream in("R,y,w,x\n1,2.5,0.1,1\n0,9.9,0.4,2\n");
  EXPECT_TRUE(std::isnan(parse_dataset(in, simple_mapping()).Y(1)));
}

TEST(ParseDataset, VarianceStructureColumn) {
  auto m = simple_mapping();
  m.variance_structure = "v";
  std::istringstream in("R,y,w,x,v\n1,2.5,0.1,1,2\n0,,0.4,,\n");
  const auto d = parse_dataset(in, m);
  EXPECT_EQ(d.v(0), 2.0);
}

TEST(ParseDataset, Errors) {
  EXPECT_EQ(parse_error("R,y,w,x\n1,2,NA,1\n"), ErrorCode::MissingInResponseCovariate);
  EXPECT_EQ(parse_error("R,y,w,x\n0,,NA,1\n"), ErrorCode::MissingInResponseCovariate);
  EXPECT_EQ(parse_error("R,y,x\n1,2,1\n"), ErrorCode::MissingColumn);
  EXPECT_EQ(parse_error("R,y,w,x\n1,abc,0.1,1\n"), ErrorCode::NonNumeric);
  EXPECT_EQ(parse_error("R,y,w,x\n1,2,0.1,1e\n"), ErrorCode::NonNumeric);
  EXPECT_EQ(parse_error("R,y,w,x\n1,,0.1,1\n"), ErrorCode::MissingInRespondent);
  EXPECT_EQ(parse_error("R,y,w,x\n1,2,0.1,NA\n"), ErrorCode::MissingInRespondent);
  EXPECT_EQ(parse_error("R,y,w,x\n2,2,0.1,1\n"), ErrorCode::InvalidArgument);
  EXPECT_EQ(parse_error("R,y,w,x\n1,2,0.1\n"), ErrorCode::InvalidArgument);
  EXPECT_EQ(parse_error(""), ErrorCode::InvalidArgument);
}

TEST(ParseDataset, MissingFile) {
  try {
    parse_dataset(std::filesystem::path("/nonexistent/cohort.csv"), simple_mapping());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(ColumnMapping, RolesMustBeDisjoint) {
  auto m = simple_mapping();
  m.response_covariates.push_back("y");
  EXPECT_THROW(validate_mapping(m), Error);
  m = simple_mapping();
  m.assoc_covariates.push_back("R");
  EXPECT_THROW(validate_mapping(m), Error);
  m = simple_mapping();
  m.assoc_covariates.push_back("x");
  EXPECT_THROW(validate_mapping(m), Error);
  m = simple_mapping();
  m.outcome = "R";
  EXPECT_THROW(validate_mapping(m), Error);
  m = simple_mapping();
  m.response_covariates.push_back("x");  // shared between the two models is fine
  EXPECT_NO_THROW(validate_mapping(m));
}

TEST(CohortCsv, RoundTripIsExact) {
  const auto reg = scenario_registry();
  for (const char* label : {"MAR1", "MNAR6"}) {
    const auto& spec = find_scenario(label, reg);
    const auto cohort = generate_cohort(spec, default_generative_model(), 31);
    std::stringstream buf;
    write_cohort_csv(buf, cohort);
    const auto parsed = parse_dataset(buf, cohort_mapping(spec));
    const auto direct = to_analysis_dataset(cohort, spec);
    EXPECT_EQ(parsed.X, direct.X) << label;
    EXPECT_EQ(parsed.Z, direct.Z) << label;
    EXPECT_EQ(parsed.R, direct.R) << label;
    EXPECT_EQ(parsed.v, direct.v) << label;
    for (Eigen::Index i = 0; i < parsed.n(); ++i) {
      if (parsed.responded(i)) {
        EXPECT_EQ(parsed.Y(i), direct.Y(i));
      } else {
        EXPECT_TRUE(std::isnan(parsed.Y(i)) && std::isnan(direct.Y(i)));
      }
    }
  }
}

}  // namespace
}  // namespace ipwvar
