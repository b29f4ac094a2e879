#include "ipwvar/dataset.hpp"

#include <cmath>

#include "ipwvar/errors.hpp"

namespace ipwvar {

Eigen::Index AnalysisDataset::respondent_count() const {
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < R.size(); ++i) {
    if (R(i) == 1.0) ++count;
  }
  return count;
}

void validate(const AnalysisDataset& data) {
  const Eigen::Index n = data.n();
  if (data.X.rows() != n || data.Z.rows() != n || data.Y.size() != n || data.v.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "X, Z, Y, R and v must all have n rows");
  }
  if (data.X.cols() == 0 || data.Z.cols() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "design matrices need at least one column");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (data.R(i) != 0.0 && data.R(i) != 1.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "response indicator must be 0 or 1 (row " + std::to_string(i) + ")");
    }
    if (!data.X.row(i).allFinite()) {
      throw Error(ErrorCode::MissingInResponseCovariate,
                  "response-model covariates must be fully observed (row " + std::to_string(i) + ")");
    }
    if (data.R(i) == 1.0) {
      if (!std::isfinite(data.Y(i)) || !data.Z.row(i).allFinite()) {
        throw Error(ErrorCode::MissingInRespondent,
                    "respondent lacks outcome or association covariate (row " + std::to_string(i) + ")");
      }
      if (!(data.v(i) > 0.0) || !std::isfinite(data.v(i))) {
        throw Error(ErrorCode::InvalidArgument,
                    "variance structure must be strictly positive (row " + std::to_string(i) + ")");
      }
    }
  }
}

AnalysisDataset make_dataset(Eigen::MatrixXd X, Eigen::MatrixXd Z, Eigen::VectorXd Y,
                             Eigen::VectorXd R) {
  AnalysisDataset data;
  data.v = Eigen::VectorXd::Ones(R.size());
  for (Eigen::Index j = 0; j < X.cols(); ++j) data.x_names.push_back(j == 0 ? "(Intercept)" : "x" + std::to_string(j));
  for (Eigen::Index j = 0; j < Z.cols(); ++j) data.z_names.push_back(j == 0 ? "(Intercept)" : "z" + std::to_string(j));
  data.X = std::move(X);
  data.Z = std::move(Z);
  data.Y = std::move(Y);
  data.R = std::move(R);
  return data;
}

}  // namespace ipwvar
