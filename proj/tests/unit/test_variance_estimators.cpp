#include <cmath>
#include <cstring>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "ipwvar/errors.hpp"
#include "ipwvar/variance_estimators.hpp"
#include "oracles.hpp"

namespace ipwvar {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

AnalysisDataset six_point() {
  Eigen::MatrixXd X(6, 2), Z(6, 2);
  X.col(0).setOnes();
  X.col(1) << 0.5, -1.2, 0.3, 2.0, -0.7, 1.1;
  Z.col(0).setOnes();
  Z.col(1) << 1.0, 0.2, -0.5, 1.5, 0.8, -1.0;
  Eigen::VectorXd Y(6), R(6);
  Y << 2.1, 0.4, kNaN, 3.3, 1.2, kNaN;
  R << 1, 1, 0, 1, 1, 0;
  auto data = make_dataset(X, Z, Y, R);
  data.v << 1, 2, 1, 0.5, 1.5, 1;
  return data;
}

ResponseFit six_point_fit(const AnalysisDataset& data) {
  Eigen::VectorXd p(6);
  p << 0.6, 0.45, 0.7, 0.8, 0.55, 0.35;
  return known_response_probabilities(data, p);
}

LinearizedOptions allow_known() { return LinearizedOptions{.allow_known_probabilities = true}; }

bool bit_identical(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

TEST(NaiveVariance, TextbookInterceptVariance) {
  const auto data = make_dataset(Eigen::MatrixXd::Ones(4, 1), Eigen::MatrixXd::Ones(4, 1),
                                 Eigen::Vector4d(0, 0, 2, 2), Eigen::Vector4d::Ones());
  const Eigen::VectorXd p = Eigen::VectorXd::Ones(4);
  const auto afit = fit_weighted_linear(data, p);
  EXPECT_DOUBLE_EQ(afit.beta_hat(0), 1.0);
  EXPECT_NEAR(afit.sigma2_hat, 4.0 / 3.0, 1e-15);
  const auto est = naive_variance(afit, p, data);
  EXPECT_EQ(est.kind, EstimatorKind::Naive);
  EXPECT_NEAR(est.cov(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(est.se(0), std::sqrt(1.0 / 3.0), 1e-15);
}

TEST(NaiveVariance, PerfectFitIsZero) {
  auto data = six_point();
  for (Eigen::Index i = 0; i < 6; ++i) {
    if (data.responded(i)) data.Y(i) = 1.0 + 2.0 * data.Z(i, 1);
  }
  const auto rfit = six_point_fit(data);
  const auto afit = fit_weighted_linear(data, rfit.p_hat);
  EXPECT_LE(naive_variance(afit, rfit.p_hat, data).cov.cwiseAbs().maxCoeff(), 1e-28);
}

TEST(NaiveVariance, SixPointClosedForm) {
  const auto data = six_point();
  const auto rfit = six_point_fit(data);
  const auto cov = naive_variance(fit_weighted_linear(data, rfit.p_hat), rfit.p_hat, data).cov;
  EXPECT_NEAR(cov(0, 0), 0.04579745353606612, 1e-12);
  EXPECT_NEAR(cov(0, 1), -0.03731031843348536, 1e-12);
  EXPECT_NEAR(cov(1, 0), -0.03731031843348536, 1e-12);
  EXPECT_NEAR(cov(1, 1), 0.03664024393353358, 1e-12);
}

TEST(NaiveVariance, UnscaledFormIsInverseWeightedGram) {
  const auto data = six_point();
  const auto rfit = six_point_fit(data);
  const Eigen::MatrixXd literal = naive_variance_unscaled(rfit.p_hat, data);
  Eigen::Matrix2d gram = Eigen::Matrix2d::Zero();
  for (Eigen::Index i = 0; i < 6; ++i) {
    if (data.responded(i)) gram += data.Z.row(i).transpose() * data.Z.row(i) / rfit.p_hat(i);
  }
  EXPECT_LE((literal - gram.inverse()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GammaHat, ZeroWhenProbabilitiesAreOne) {
  const auto data = six_point();
  const auto rfit = known_response_probabilities(data, Eigen::VectorXd::Ones(6));
  const auto afit = fit_weighted_linear(data, rfit.p_hat);
  const auto g = gamma_hat(afit, rfit, data);
  EXPECT_EQ(g.rows(), 2);
  EXPECT_EQ(g.cols(), 2);
  EXPECT_TRUE(g.isZero(0.0));
}

TEST(GammaHat, ZeroWhenResidualsVanish) {
  auto data = six_point();
  for (Eigen::Index i = 0; i < 6; ++i) {
    if (data.responded(i)) data.Y(i) = 0.25 - 0.5 * data.Z(i, 1);
  }
  const auto rfit = six_point_fit(data);
  AssociationFit afit = fit_weighted_linear(data, rfit.p_hat);
  for (Eigen::Index i = 0; i < 6; ++i) {
    if (data.responded(i)) afit.residuals(i) = 0.0;
  }
  EXPECT_TRUE(gamma_hat(afit, rfit, data).isZero(0.0));
}

TEST(GammaHat, SixPointFrozen) {
  const auto data = six_point();
  const auto rfit = six_point_fit(data);
  const auto g = gamma_hat(fit_weighted_linear(data, rfit.p_hat), rfit, data);
  EXPECT_NEAR(g(0, 0), -0.031980139469387846, 1e-12);
  EXPECT_NEAR(g(0, 1), -0.08325290117113651, 1e-12);
  EXPECT_NEAR(g(1, 0), 0.062173718730713985, 1e-12);
  EXPECT_NEAR(g(1, 1), 0.1589744987411004, 1e-12);
}

TEST(RobustVariance, TwoPointByHand) {
  const auto data = make_dataset(Eigen::MatrixXd::Ones(2, 1), Eigen::MatrixXd::Ones(2, 1), Eigen::Vector2d(0, 2),
                                 Eigen::Vector2d::Ones());
  const auto rfit = known_response_probabilities(data, Eigen::VectorXd::Ones(2));
  const auto afit = fit_weighted_linear(data, rfit.p_hat);
  const auto rob = robust_variance(afit, rfit, data);
  EXPECT_DOUBLE_EQ(afit.gram(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(rob.V(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(rob.V(1, 0), 0.5);
  EXPECT_NEAR(rob.estimate.cov(0, 0), 1.0, 1e-14);
}

TEST(RobustVariance, SixPointFrozen) {
  const auto data = six_point();
  const auto rfit = six_point_fit(data);
  const auto cov = robust_variance(fit_weighted_linear(data, rfit.p_hat), rfit, data).estimate.cov;
  EXPECT_NEAR(cov(0, 0), 0.06550568686110396, 1e-12);
  EXPECT_NEAR(cov(0, 1), -0.04502668512088426, 1e-12);
  EXPECT_NEAR(cov(1, 1), 0.033979145943903055, 1e-12);
}

TEST(LinearizedVariance, SixPointFrozen) {
  const auto data = six_point();
  const auto rfit = six_point_fit(data);
  const auto cov =
      linearized_variance(fit_weighted_linear(data, rfit.p_hat), rfit, data, allow_known()).estimate.cov;
  EXPECT_NEAR(cov(0, 0), 0.05781558520310172, 1e-12);
  EXPECT_NEAR(cov(0, 1), -0.03628750526549088, 1e-12);
  EXPECT_NEAR(cov(1, 1), 0.02404772756098316, 1e-12);
}

TEST(LinearizedVariance, RefusesKnownProbabilitiesByDefault) {
  const auto data = six_point();
  const auto rfit = six_point_fit(data);
  try {
    linearized_variance(fit_weighted_linear(data, rfit.p_hat), rfit, data);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::KnownProbabilityMisuse);
  }
}

TEST(LinearizedVariance, ZeroResidualsGiveZeroCovariance) {
  auto data = six_point();
  const auto rfit = six_point_fit(data);
  AssociationFit afit = fit_weighted_linear(data, rfit.p_hat);
  for (Eigen::Index i = 0; i < 6; ++i) {
    if (data.responded(i)) afit.residuals(i) = 0.0;
  }
  const auto lin = linearized_variance(afit, rfit, data, allow_known());
  const auto rob = robust_variance(afit, rfit, data);
  EXPECT_TRUE(lin.influence.U.isZero(0.0));
  EXPECT_TRUE(lin.estimate.cov.isZero(0.0));
  EXPECT_TRUE(rob.estimate.cov.isZero(0.0));
}

TEST(LinearizedVariance, KnownUnitProbabilitiesCollapseToRobustBitForBit) {
  auto data = six_point();
  data.R.setOnes();
  data.Y(2) = 0.9;
  data.Y(5) = -1.4;
  const auto rfit = known_response_probabilities(data, Eigen::VectorXd::Ones(6));
  const auto afit = fit_weighted_linear(data, rfit.p_hat);
  const auto lin = linearized_variance(afit, rfit, data, allow_known());
  const auto rob = robust_variance(afit, rfit, data);
  EXPECT_TRUE(bit_identical(lin.estimate.cov, rob.estimate.cov));
  EXPECT_TRUE(bit_identical(lin.influence.U, rob.V));
}

// Randomized small instance: estimated-or-known probabilities, random v.
oracle::Problem random_problem(std::mt19937_64& rng, AnalysisDataset& data, ResponseFit& rfit) {
  std::uniform_int_distribution<int> n_dist(8, 20);
  std::uniform_int_distribution<int> q_dist(1, 3);
  std::uniform_int_distribution<int> p_dist(1, 3);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.1, 0.95);
  std::uniform_real_distribution<double> vdist(0.3, 3.0);

  const int n = n_dist(rng);
  const int q = q_dist(rng);
  const int p = p_dist(rng);
  Eigen::MatrixXd X(n, q), Z(n, p);
  Eigen::VectorXd Y(n), R(n), probs(n), v(n);
  int respondents = 0;
  do {
    respondents = 0;
    for (int i = 0; i < n; ++i) {
      R(i) = unif(rng) < 0.6 ? 1.0 : 0.0;
      respondents += static_cast<int>(R(i));
    }
  } while (respondents < p + 2 || respondents == n);
  for (int i = 0; i < n; ++i) {
    X(i, 0) = 1.0;
    Z(i, 0) = 1.0;
    for (int k = 1; k < q; ++k) X(i, k) = normal(rng);
    for (int k = 1; k < p; ++k) Z(i, k) = normal(rng);
    Y(i) = R(i) == 1.0 ? normal(rng) : kNaN;
    probs(i) = unif(rng);
    v(i) = vdist(rng);
  }
  data = make_dataset(X, Z, Y, R);
  data.v = v;
  rfit = known_response_probabilities(data, probs);

  oracle::Problem pr;
  pr.X = oracle::to_mat(X);
  pr.Z = oracle::to_mat(Z);
  pr.Y = oracle::to_vec(Y);
  pr.R = oracle::to_vec(R);
  pr.v = oracle::to_vec(v);
  pr.p = oracle::to_vec(probs);
  return pr;
}

TEST(VarianceOracle, SixPointAgreesWithDoubleLoop) {
  const auto data = six_point();
  const auto rfit = six_point_fit(data);
  oracle::Problem pr{oracle::to_mat(data.X), oracle::to_mat(data.Z), oracle::to_vec(data.Y),
                     oracle::to_vec(data.R), oracle::to_vec(data.v), oracle::to_vec(rfit.p_hat)};
  const auto want = oracle::compute(pr);
  const auto afit = fit_weighted_linear(data, rfit.p_hat);
  const auto lin = linearized_variance(afit, rfit, data, allow_known());
  EXPECT_LE(oracle::relative_error(lin.influence.gamma_hat, want.gamma), 1e-12);
  EXPECT_LE(oracle::relative_error(lin.influence.U, want.U), 1e-12);
  EXPECT_LE(oracle::relative_error(lin.influence.V, want.V), 1e-12);
  EXPECT_LE(oracle::relative_error(lin.estimate.cov, want.linearized), 1e-12);
}

TEST(VarianceProperties, DecompositionSymmetryAndPsdOnRandomInstances) {
  std::mt19937_64 rng(20240901);
  for (int draw = 0; draw < 200; ++draw) {
    AnalysisDataset data;
    ResponseFit rfit;
    random_problem(rng, data, rfit);
    const auto afit = fit_weighted_linear(data, rfit.p_hat);
    const auto lin = linearized_variance(afit, rfit, data, allow_known());
    const auto rob = robust_variance(afit, rfit, data);
    const auto& infl = lin.influence;
    const Eigen::LLT<Eigen::MatrixXd> llt(afit.gram);
    const double n = static_cast<double>(data.n());

    for (Eigen::Index i = 0; i < data.n(); ++i) {
      const Eigen::VectorXd corr =
          llt.solve((data.R(i) - rfit.p_hat(i)) * infl.gamma_hat.transpose() * data.X.row(i).transpose());
      const Eigen::VectorXd diff = infl.U.row(i).transpose() - infl.V.row(i).transpose();
      EXPECT_LE((diff + corr).lpNorm<Eigen::Infinity>(), 1e-12 * (1.0 + corr.lpNorm<Eigen::Infinity>()));
      if (!data.responded(i)) {
        EXPECT_TRUE(infl.V.row(i).isZero(0.0));
        const Eigen::VectorXd expect = llt.solve(rfit.p_hat(i) * infl.gamma_hat.transpose() * data.X.row(i).transpose());
        EXPECT_LE((infl.U.row(i).transpose() - expect).lpNorm<Eigen::Infinity>(), 1e-12 * (1.0 + expect.norm()));
      }
    }
    const Eigen::MatrixXd rebuilt =
        rob.estimate.cov + n / (n - 1.0) * (infl.U.transpose() * infl.U - infl.V.transpose() * infl.V);
    EXPECT_LE((rebuilt - lin.estimate.cov).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + lin.estimate.cov.norm()));

    for (const Eigen::MatrixXd* cov : {&rob.estimate.cov, &lin.estimate.cov}) {
      EXPECT_TRUE(cov->isApprox(cov->transpose(), 0.0));
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(*cov);
      EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10 * cov->norm());
    }
    const auto naive = naive_variance(afit, rfit.p_hat, data);
    EXPECT_TRUE(naive.cov.isApprox(naive.cov.transpose(), 0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(naive.cov);
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(VarianceProperties, SumOfLinearizedInfluenceVanishesAfterEstimation) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  const int n = 400;
  Eigen::MatrixXd X(n, 3), Z(n, 2);
  Eigen::VectorXd Y(n), R(n);
  for (int i = 0; i < n; ++i) {
    X.row(i) << 1.0, normal(rng), normal(rng);
    Z.row(i) << 1.0, X(i, 1) + normal(rng);
    const double eta = 0.3 + 0.5 * X(i, 1) - 0.4 * X(i, 2);
    R(i) = std::uniform_real_distribution<double>()(rng) < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
    Y(i) = R(i) == 1.0 ? 1.0 + 0.5 * Z(i, 1) + normal(rng) : kNaN;
  }
  const auto data = make_dataset(X, Z, Y, R);
  const auto rfit = fit_response(data);
  const auto afit = fit_weighted_linear(data, rfit.p_hat);
  const auto lin = linearized_variance(afit, rfit, data);
  const Eigen::VectorXd total = lin.influence.U.colwise().sum();
  EXPECT_LE(total.lpNorm<Eigen::Infinity>(), 1e-10 * lin.influence.U.cwiseAbs().maxCoeff() * n);
}

}  // namespace
}  // namespace ipwvar
