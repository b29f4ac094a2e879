#pragma once

#include <Eigen/Dense>

#include "ipwvar/dataset.hpp"

namespace ipwvar {

// Weighted linear regression of Y on Z over respondents, with weights
// R_i / (p_i v_i).
struct AssociationFit {
  Eigen::VectorXd beta_hat;
  // e_i = Y_i - Z_i^T beta_hat for respondents, NaN otherwise.
  Eigen::VectorXd residuals;
  // sum_resp w_i e_i^2 / v_i / (sum_resp w_i - p) with w_i = 1/p_i.
  double sigma2_hat = 0.0;
  // sum_i (R_i / p_i) v_i^{-1} Z_i Z_i^T
  Eigen::MatrixXd gram;
};

// Throws SingularGram if respondent rows of Z are rank deficient and
// DimensionMismatch on inconsistent shapes.
AssociationFit fit_weighted_linear(const AnalysisDataset& data, const Eigen::VectorXd& p_hat);

// Cholesky of the gram; throws SingularGram if it is not numerically positive definite.
Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& gram);

}  // namespace ipwvar
