#pragma once

#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "ipwvar/association_model.hpp"
#include "ipwvar/dataset.hpp"
#include "ipwvar/response_model.hpp"

namespace ipwvar {

enum class EstimatorKind { Naive, Robust, Linearized };

std::string_view to_string(EstimatorKind kind) noexcept;
std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept;

struct VarianceEstimate {
  EstimatorKind kind = EstimatorKind::Naive;
  Eigen::MatrixXd cov;
  Eigen::VectorXd se;
};

// Per-individual influence values. Row i of U (resp. V) is the linearized
// (resp. robust) influence vector of individual i.
struct InfluenceDecomposition {
  Eigen::MatrixXd gamma_hat;  // q x p
  Eigen::MatrixXd U;          // n x p
  Eigen::MatrixXd V;          // n x p
};

struct LinearizedResult {
  VarianceEstimate estimate;
  InfluenceDecomposition influence;
};

struct RobustResult {
  VarianceEstimate estimate;
  Eigen::MatrixXd V;  // n x p
};

struct LinearizedOptions {
  // The correction term assumes p_hat solves the logistic score equation.
  // Externally supplied probabilities are rejected unless this is set.
  bool allow_known_probabilities = false;
};

// sigma2_hat * gram^{-1}: what weighted least-squares software reports by default.
VarianceEstimate naive_variance(const AssociationFit& afit, const Eigen::VectorXd& p_hat,
                                const AnalysisDataset& data);

// (sum_resp Z_i Z_i^T / p_i)^{-1}, the unscaled textbook form with neither
// sigma^2 nor v. Diagnostic only.
Eigen::MatrixXd naive_variance_unscaled(const Eigen::VectorXd& p_hat, const AnalysisDataset& data);

// {sum_j p_j(1-p_j) X_j X_j^T}^{-1} sum_j R_j (1/p_j - 1) v_j^{-1} e_j X_j Z_j^T
Eigen::MatrixXd gamma_hat(const AssociationFit& afit, const ResponseFit& rfit, const AnalysisDataset& data);

LinearizedResult linearized_variance(const AssociationFit& afit, const ResponseFit& rfit,
                                     const AnalysisDataset& data, const LinearizedOptions& opts = {});

RobustResult robust_variance(const AssociationFit& afit, const ResponseFit& rfit, const AnalysisDataset& data);

}  // namespace ipwvar
