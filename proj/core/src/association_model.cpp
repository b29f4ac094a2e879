#include "ipwvar/association_model.hpp"

#include <limits>

#include "ipwvar/errors.hpp"

namespace ipwvar {

Eigen::LLT<Eigen::MatrixXd> factor_gram(const Eigen::MatrixXd& gram) {
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (gram.size() == 0 || llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    throw Error(ErrorCode::SingularGram, "weighted gram matrix is not invertible");
  }
  return llt;
}

AssociationFit fit_weighted_linear(const AnalysisDataset& data, const Eigen::VectorXd& p_hat) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (p_hat.size() != n || data.Z.rows() != n || data.Y.size() != n || data.v.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "Z, Y, v, R and p_hat must have matching lengths");
  }

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd cross = Eigen::VectorXd::Zero(p);
  Eigen::Index respondents = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!data.responded(i)) continue;
    if (!(p_hat(i) > 0.0)) throw Error(ErrorCode::InvalidArgument, "response probabilities must be positive");
    const double w = 1.0 / (p_hat(i) * data.v(i));
    const auto z = data.Z.row(i).transpose();
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z, w);
    cross.noalias() += w * data.Y(i) * z;
    ++respondents;
  }
  if (respondents < p) throw Error(ErrorCode::SingularGram, "fewer respondents than association covariates");
  gram = gram.selfadjointView<Eigen::Lower>();

  AssociationFit fit;
  fit.beta_hat = factor_gram(gram).solve(cross);
  fit.gram = std::move(gram);

  fit.residuals = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  double weighted_sse = 0.0;
  double weight_total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!data.responded(i)) continue;
    const double e = data.Y(i) - data.Z.row(i).dot(fit.beta_hat);
    fit.residuals(i) = e;
    const double w = 1.0 / p_hat(i);
    weighted_sse += w * e * e / data.v(i);
    weight_total += w;
  }
  const double dof = weight_total - static_cast<double>(p);
  fit.sigma2_hat = dof > 0.0 ? weighted_sse / dof : std::numeric_limits<double>::quiet_NaN();
  return fit;
}

}  // namespace ipwvar
