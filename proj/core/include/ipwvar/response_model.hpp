#pragma once

#include <Eigen/Dense>

#include "ipwvar/dataset.hpp"

namespace ipwvar {

struct FitOptions {
  double tolerance = 1e-10;        // max-norm of the logistic score
  int max_iterations = 50;
  int max_halvings = 20;
  double probability_floor = 1e-10;  // p_hat is clamped to [floor, 1 - floor]
};

// Logistic response model for Pr(R = 1 | X).
struct ResponseFit {
  Eigen::VectorXd alpha_hat;
  Eigen::VectorXd p_hat;
  // sum_j p_j (1 - p_j) X_j X_j^T evaluated at p_hat.
  Eigen::MatrixXd info_matrix;
  bool converged = false;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  int clamp_count = 0;
  // False when p_hat was supplied by the caller rather than estimated.
  bool estimated = true;
};

double expit(double eta) noexcept;
double logit(double p) noexcept;

// sum_j p_j (1 - p_j) X_j X_j^T
Eigen::MatrixXd response_information(const Eigen::MatrixXd& X, const Eigen::VectorXd& p);

// Solves sum_i X_i (R_i - expit(X_i^T alpha)) = 0 by safeguarded Newton-Raphson.
// Throws DegenerateResponse, SingularInformation or NonConvergence.
ResponseFit fit_response(const AnalysisDataset& data, const FitOptions& opts = {});

// Wraps externally known response probabilities. The result has
// estimated == false, so the linearized estimator refuses it unless asked.
ResponseFit known_response_probabilities(const AnalysisDataset& data, Eigen::VectorXd p);

// w_i = 1 / p_hat_i for every individual, respondent or not.
Eigen::VectorXd ipw_weights(const ResponseFit& fit, const AnalysisDataset& data);

// First-order expansion of 1/p_hat around p_star:
//   1/p*_i - (1/p*_i - 1) X_i^T {sum_j p*_j(1-p*_j) X_j X_j^T}^{-1} sum_j (R_j - p*_j) X_j
Eigen::VectorXd linearized_weight_approx(const Eigen::VectorXd& p_star, const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& R);

}  // namespace ipwvar
