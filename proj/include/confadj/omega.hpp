#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "confadj/error.hpp"
#include "confadj/numeric.hpp"

namespace confadj {

// Confounder-design association in the standardized parameterization.
// omega_bc = omega_naive * diag(shrink_correction), exactly.
struct omega_estimate {
  Eigen::MatrixXd omega_naive;       // d x k
  Eigen::VectorXd shrink_correction; // k
  Eigen::MatrixXd omega_bc;          // d x k
  std::vector<std::uint8_t> clamped; // per-factor: denominator floor fired
};

// Least-squares coefficients of each y1 column on the estimated loadings,
// returned d x k.
inline Eigen::MatrixXd naive_omega(const Eigen::MatrixXd& y1,
                                   const Eigen::MatrixXd& l_hat) {
  require(y1.rows() == l_hat.rows(), errc::dimension_mismatch,
          "naive_omega: y1 and l_hat must have the same number of features");
  require(l_hat.cols() >= 1, errc::invalid_argument,
          "naive_omega: l_hat has no columns");
  Eigen::MatrixXd ltl(l_hat.cols(), l_hat.cols());
  ltl.setZero();
  ltl.selfadjointView<Eigen::Lower>().rankUpdate(l_hat.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ltl);
  require(es.info() == Eigen::Success &&
              es.eigenvalues().minCoeff() >
                  1e-14 * std::max(es.eigenvalues().maxCoeff(), 0.0) &&
              es.eigenvalues().minCoeff() > 0,
          errc::singular_input, "naive_omega: l_hat^T l_hat is singular");
  const Eigen::MatrixXd lty1 = l_hat.transpose() * y1; // k x d
  return ltl.selfadjointView<Eigen::Lower>().llt().solve(lty1).transpose();
}

// Asymptotic attenuation of the naive estimate: component k is shrunk by
// lambda_k / (lambda_k + rho).
inline Eigen::VectorXd theoretical_shrinkage(const Eigen::VectorXd& lambda,
                                             double rho) {
  require(rho >= 0, errc::invalid_argument,
          "theoretical_shrinkage: rho must be >= 0");
  require((lambda.array() > 0).all(), errc::invalid_argument,
          "theoretical_shrinkage: lambda must be positive");
  return lambda.array() / (lambda.array() + rho);
}

// Multiplies component k of the naive estimate by
// lambda_hat_k / max(lambda_hat_k - rho_hat, clamp_eps * lambda_hat_k),
// flagging components where the floor fired (factor capped at 1/clamp_eps).
inline omega_estimate bias_corrected_omega(const Eigen::MatrixXd& omega_naive,
                                           const Eigen::VectorXd& lambda_hat,
                                           double rho_hat,
                                           double clamp_eps = 0.05) {
  const Eigen::Index k = omega_naive.cols();
  require(lambda_hat.size() == k, errc::dimension_mismatch,
          "bias_corrected_omega: lambda_hat length != omega_naive columns");
  require(rho_hat >= 0, errc::invalid_argument,
          "bias_corrected_omega: rho_hat must be >= 0");
  require(clamp_eps > 0 && clamp_eps < 1, errc::invalid_argument,
          "bias_corrected_omega: clamp_eps must lie in (0,1)");
  require((lambda_hat.array() > 0).all(), errc::invalid_argument,
          "bias_corrected_omega: lambda_hat must be positive");
  omega_estimate out;
  out.omega_naive = omega_naive;
  out.shrink_correction.resize(k);
  out.clamped.assign(static_cast<std::size_t>(k), 0);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double floor = clamp_eps * lambda_hat[j];
    const double debiased = lambda_hat[j] - rho_hat;
    if (debiased < floor) {
      out.clamped[static_cast<std::size_t>(j)] = 1;
      out.shrink_correction[j] = lambda_hat[j] / floor;
    } else {
      out.shrink_correction[j] = lambda_hat[j] / debiased;
    }
  }
  out.omega_bc = omega_naive * out.shrink_correction.asDiagonal();
  return out;
}

} // namespace confadj
