#include "ipwvar/variance_estimators.hpp"

#include <cmath>

#include "ipwvar/errors.hpp"

namespace ipwvar {

namespace {

VarianceEstimate make_estimate(EstimatorKind kind, Eigen::MatrixXd cov) {
  VarianceEstimate est;
  est.kind = kind;
  est.cov = 0.5 * (cov + cov.transpose());
  est.se = est.cov.diagonal().array().sqrt();
  return est;
}

void check_consistent(const AssociationFit& afit, const ResponseFit& rfit, const AnalysisDataset& data) {
  const Eigen::Index n = data.n();
  if (rfit.p_hat.size() != n || afit.residuals.size() != n || afit.gram.rows() != data.p() ||
      afit.beta_hat.size() != data.p()) {
    throw Error(ErrorCode::DimensionMismatch, "fits do not belong to this dataset");
  }
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "variance estimation needs n >= 2");
}

// Rows (R_i / p_i) v_i^{-1} e_i Z_i^T; zero for nonrespondents.
Eigen::MatrixXd weighted_scores(const AssociationFit& afit, const Eigen::VectorXd& p_hat,
                                const AnalysisDataset& data) {
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(data.n(), data.p());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (!data.responded(i)) continue;
    scores.row(i) = (afit.residuals(i) / (p_hat(i) * data.v(i))) * data.Z.row(i);
  }
  return scores;
}

Eigen::MatrixXd outer_sum(const Eigen::MatrixXd& rows) {
  const double n = static_cast<double>(rows.rows());
  return (n / (n - 1.0)) * (rows.transpose() * rows);
}

}  // namespace

std::string_view to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::Naive: return "naive";
    case EstimatorKind::Robust: return "robust";
    case EstimatorKind::Linearized: return "linearized";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator(std::string_view name) noexcept {
  if (name == "naive") return EstimatorKind::Naive;
  if (name == "robust") return EstimatorKind::Robust;
  if (name == "linearized") return EstimatorKind::Linearized;
  return std::nullopt;
}

VarianceEstimate naive_variance(const AssociationFit& afit, const Eigen::VectorXd& p_hat,
                                const AnalysisDataset& data) {
  if (p_hat.size() != data.n() || afit.gram.rows() != data.p()) {
    throw Error(ErrorCode::DimensionMismatch, "fit does not belong to this dataset");
  }
  if (!std::isfinite(afit.sigma2_hat)) {
    throw Error(ErrorCode::InvalidArgument, "residual variance undefined (total weight <= p)");
  }
  const auto llt = factor_gram(afit.gram);
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(data.p(), data.p()));
  return make_estimate(EstimatorKind::Naive, afit.sigma2_hat * inv);
}

Eigen::MatrixXd naive_variance_unscaled(const Eigen::VectorXd& p_hat, const AnalysisDataset& data) {
  if (p_hat.size() != data.n()) throw Error(ErrorCode::DimensionMismatch, "p_hat has wrong length");
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(data.p(), data.p());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (!data.responded(i)) continue;
    gram.noalias() += (1.0 / p_hat(i)) * data.Z.row(i).transpose() * data.Z.row(i);
  }
  const auto llt = factor_gram(gram);
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(data.p(), data.p()));
  return 0.5 * (inv + inv.transpose());
}

Eigen::MatrixXd gamma_hat(const AssociationFit& afit, const ResponseFit& rfit, const AnalysisDataset& data) {
  check_consistent(afit, rfit, data);
  const Eigen::Index q = data.q();
  if (rfit.info_matrix.rows() != q || rfit.info_matrix.cols() != q) {
    throw Error(ErrorCode::DimensionMismatch, "information matrix does not match the response design");
  }

  Eigen::MatrixXd right = Eigen::MatrixXd::Zero(q, data.p());
  for (Eigen::Index j = 0; j < data.n(); ++j) {
    if (!data.responded(j)) continue;
    const double c = (1.0 / rfit.p_hat(j) - 1.0) * afit.residuals(j) / data.v(j);
    if (c == 0.0) continue;
    right.noalias() += c * data.X.row(j).transpose() * data.Z.row(j);
  }
  // Known probabilities of one, or an exact fit, make the correction vanish
  // even when the information matrix is singular.
  if (right.isZero(0.0)) return right;

  Eigen::LLT<Eigen::MatrixXd> llt(rfit.info_matrix);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    throw Error(ErrorCode::SingularInformation, "response information matrix is not invertible");
  }
  return llt.solve(right);
}

LinearizedResult linearized_variance(const AssociationFit& afit, const ResponseFit& rfit,
                                     const AnalysisDataset& data, const LinearizedOptions& opts) {
  if (!rfit.estimated && !opts.allow_known_probabilities) {
    throw Error(ErrorCode::KnownProbabilityMisuse,
                "linearized estimator requires probabilities estimated by the response model");
  }
  check_consistent(afit, rfit, data);

  LinearizedResult out;
  InfluenceDecomposition& infl = out.influence;
  infl.gamma_hat = gamma_hat(afit, rfit, data);

  const auto llt = factor_gram(afit.gram);
  const Eigen::MatrixXd scores = weighted_scores(afit, rfit.p_hat, data);
  infl.V = llt.solve(scores.transpose()).transpose();

  if (infl.gamma_hat.isZero(0.0)) {
    infl.U = infl.V;
  } else {
    const Eigen::VectorXd resid_response = data.R - rfit.p_hat;
    const Eigen::MatrixXd correction = resid_response.asDiagonal() * (data.X * infl.gamma_hat);
    infl.U = llt.solve((scores - correction).transpose()).transpose();
  }
  out.estimate = make_estimate(EstimatorKind::Linearized, outer_sum(infl.U));
  return out;
}

RobustResult robust_variance(const AssociationFit& afit, const ResponseFit& rfit, const AnalysisDataset& data) {
  check_consistent(afit, rfit, data);
  const auto llt = factor_gram(afit.gram);
  RobustResult out;
  out.V = llt.solve(weighted_scores(afit, rfit.p_hat, data).transpose()).transpose();
  out.estimate = make_estimate(EstimatorKind::Robust, outer_sum(out.V));
  return out;
}

}  // namespace ipwvar
