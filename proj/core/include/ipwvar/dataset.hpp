#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ipwvar {

// Full baseline sample for one analysis.
//
// X is the response-model design (fully observed, intercept first).
// Z is the association-model design (intercept first); Z and Y may hold
// NaN for nonrespondents and are only read where R == 1.
// R holds 0/1 response indicators, v the known variance structure.
struct AnalysisDataset {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Z;
  Eigen::VectorXd Y;
  Eigen::VectorXd R;
  Eigen::VectorXd v;

  std::vector<std::string> x_names;
  std::vector<std::string> z_names;

  Eigen::Index n() const { return R.size(); }
  Eigen::Index q() const { return X.cols(); }
  Eigen::Index p() const { return Z.cols(); }

  Eigen::Index respondent_count() const;
  bool responded(Eigen::Index i) const { return R(i) == 1.0; }
};

// Checks shapes, 0/1 indicators, positivity of v for respondents and the
// absence of missing values where they are not allowed. Throws ipwvar::Error.
void validate(const AnalysisDataset& data);

// Builds a dataset with v = 1 and generic column names. Convenience for
// callers that assemble designs by hand.
AnalysisDataset make_dataset(Eigen::MatrixXd X, Eigen::MatrixXd Z, Eigen::VectorXd Y,
                             Eigen::VectorXd R);

}  // namespace ipwvar
