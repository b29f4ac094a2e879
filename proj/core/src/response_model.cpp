#include "ipwvar/response_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ipwvar/errors.hpp"

namespace ipwvar {

namespace {

// Reciprocal condition number below which a Newton matrix is treated as singular.
constexpr double kMinRcond = 1e-14;

double softplus(double eta) noexcept {
  return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

double log_likelihood(const Eigen::VectorXd& eta, const Eigen::VectorXd& R) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += R(i) * eta(i) - softplus(eta(i));
  return ll;
}

Eigen::VectorXd probabilities(const Eigen::VectorXd& eta) {
  return eta.unaryExpr([](double e) { return expit(e); });
}

void check_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& R) {
  if (X.rows() != R.size()) throw Error(ErrorCode::DimensionMismatch, "X rows must equal length of R");
  if (X.cols() == 0) throw Error(ErrorCode::DimensionMismatch, "response design has no columns");
  if (!X.allFinite()) {
    throw Error(ErrorCode::MissingInResponseCovariate, "response-model covariates must be fully observed");
  }
}

Eigen::LLT<Eigen::MatrixXd> factor_information(const Eigen::MatrixXd& info) {
  Eigen::LLT<Eigen::MatrixXd> llt(info);
  if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
    throw Error(ErrorCode::SingularInformation, "response information matrix is not invertible");
  }
  return llt;
}

}  // namespace

double expit(double eta) noexcept {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double logit(double p) noexcept { return std::log(p / (1.0 - p)); }

Eigen::MatrixXd response_information(const Eigen::MatrixXd& X, const Eigen::VectorXd& p) {
  const Eigen::VectorXd w = p.array() * (1.0 - p.array());
  Eigen::MatrixXd info = X.transpose() * w.asDiagonal() * X;
  return 0.5 * (info + info.transpose());
}

ResponseFit fit_response(const AnalysisDataset& data, const FitOptions& opts) {
  const Eigen::MatrixXd& X = data.X;
  const Eigen::VectorXd& R = data.R;
  check_inputs(X, R);

  const double responders = R.sum();
  if (responders == 0.0 || responders == static_cast<double>(R.size())) {
    throw Error(ErrorCode::DegenerateResponse, "all individuals share the same response status");
  }
  if (X.rows() < X.cols()) {
    throw Error(ErrorCode::SingularInformation, "fewer rows than response-model columns");
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  if (qr.rank() < X.cols()) {
    throw Error(ErrorCode::SingularInformation, "response design is rank deficient");
  }

  ResponseFit fit;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(X.cols());
  Eigen::VectorXd eta = X * alpha;
  Eigen::VectorXd p = probabilities(eta);
  Eigen::VectorXd score = X.transpose() * (R - p);
  double ll = log_likelihood(eta, R);
  double gnorm = score.lpNorm<Eigen::Infinity>();

  int iter = 0;
  while (gnorm > opts.tolerance && iter < opts.max_iterations) {
    const auto llt = factor_information(response_information(X, p));
    const Eigen::VectorXd step = llt.solve(score);

    // Roundoff in the log-likelihood sum must not trigger halving near the optimum.
    const double slack = 1e-12 * (1.0 + std::abs(ll));
    double scale = 1.0;
    bool accepted = false;
    Eigen::VectorXd candidate;
    Eigen::VectorXd candidate_eta;
    double candidate_ll = ll;
    for (int h = 0; h <= opts.max_halvings; ++h) {
      candidate = alpha + scale * step;
      candidate_eta = X * candidate;
      candidate_ll = log_likelihood(candidate_eta, R);
      if (std::isfinite(candidate_ll) && candidate_ll >= ll - slack) {
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    ++iter;
    if (!accepted) break;

    alpha = std::move(candidate);
    eta = std::move(candidate_eta);
    ll = candidate_ll;
    p = probabilities(eta);
    score = X.transpose() * (R - p);
    gnorm = score.lpNorm<Eigen::Infinity>();
  }

  if (!(gnorm <= opts.tolerance)) {
    std::ostringstream msg;
    msg << "score norm " << gnorm << " after " << iter << " iterations, |alpha| = " << alpha.norm()
        << " (possible separation)";
    throw Error(ErrorCode::NonConvergence, msg.str());
  }

  // Complete separation: the score vanishes only because every fitted
  // probability has collapsed onto its observed indicator.
  if ((R - p).cwiseAbs().maxCoeff() < 1e-6) {
    std::ostringstream msg;
    msg << "fitted probabilities reproduce R exactly, |alpha| = " << alpha.norm() << " (complete separation)";
    throw Error(ErrorCode::NonConvergence, msg.str());
  }

  const double lo = opts.probability_floor;
  const double hi = 1.0 - opts.probability_floor;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) < lo || p(i) > hi) {
      p(i) = std::clamp(p(i), lo, hi);
      ++fit.clamp_count;
    }
  }

  fit.alpha_hat = std::move(alpha);
  fit.info_matrix = response_information(X, p);
  fit.p_hat = std::move(p);
  fit.converged = true;
  fit.iterations = iter;
  fit.final_gradient_norm = gnorm;
  return fit;
}

ResponseFit known_response_probabilities(const AnalysisDataset& data, Eigen::VectorXd p) {
  if (p.size() != data.n()) throw Error(ErrorCode::DimensionMismatch, "probability vector has wrong length");
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!(p(i) > 0.0 && p(i) <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "known probabilities must lie in (0, 1]");
    }
  }
  ResponseFit fit;
  fit.info_matrix = response_information(data.X, p);
  fit.p_hat = std::move(p);
  fit.converged = true;
  fit.estimated = false;
  return fit;
}

Eigen::VectorXd ipw_weights(const ResponseFit& fit, const AnalysisDataset& data) {
  if (fit.p_hat.size() != data.n()) {
    throw Error(ErrorCode::DimensionMismatch, "fit does not belong to this dataset");
  }
  return fit.p_hat.cwiseInverse();
}

Eigen::VectorXd linearized_weight_approx(const Eigen::VectorXd& p_star, const Eigen::MatrixXd& X,
                                         const Eigen::VectorXd& R) {
  check_inputs(X, R);
  if (p_star.size() != R.size()) throw Error(ErrorCode::DimensionMismatch, "p_star has wrong length");
  const Eigen::VectorXd score = X.transpose() * (R - p_star);
  const Eigen::VectorXd shift = factor_information(response_information(X, p_star)).solve(score);
  const Eigen::VectorXd inv = p_star.cwiseInverse();
  return inv.array() - (inv.array() - 1.0) * (X * shift).array();
}

}  // namespace ipwvar
