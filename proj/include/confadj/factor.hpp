#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confadj/error.hpp"
#include "confadj/numeric.hpp"

namespace confadj {

// Truncated factor decomposition of the design-free block y2.
//   l_hat      p x k   loadings scaled by singular values of y2/sqrt(m)
//   lambda_hat k       spike strengths, (m/p) * eigenvalues of y2^T y2 / m
//   c2_hat     m x k   residual-frame scores with c2_hat^T c2_hat = m I
//   sigma2_hat p       per-feature residual variances (dof m - k)
//   rho_hat            mean residual variance
// where m = n_eff - d is the residual dimension.
struct factor_estimate {
  Eigen::MatrixXd l_hat;
  Eigen::VectorXd lambda_hat;
  Eigen::MatrixXd c2_hat;
  Eigen::VectorXd sigma2_hat;
  double rho_hat = 0.0;
  Eigen::Index k = 0;
  std::vector<std::string> warnings;
};

// Estimates the top-k factors from the m x m Gram matrix (never the p x p
// covariance; p may be 1e5+ while m ~ 1e2).
inline factor_estimate estimate_factors(const Eigen::MatrixXd& y2,
                                        Eigen::Index k) {
  const Eigen::Index p = y2.rows();
  const Eigen::Index m = y2.cols();
  require(p > 0 && m >= 2, errc::invalid_argument,
          "estimate_factors: y2 must be p x m with m >= 2");
  require(k >= 1, errc::invalid_argument, "estimate_factors: k must be >= 1");
  require(m - k >= 1, errc::invalid_argument,
          "estimate_factors: k leaves no residual degrees of freedom (k <= " +
              std::to_string(m - 1) + " required)");
  require_finite(y2, "y2");
  require(y2.squaredNorm() > 0, errc::degenerate_input,
          "estimate_factors: y2 is identically zero");

  factor_estimate out;
  out.k = k;
  if (m - k < 10)
    out.warnings.push_back("residual degrees of freedom below 10 (m - k = " +
                           std::to_string(m - k) +
                           "); variance estimates are noisy");

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(m, m);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(y2.transpose(), 1.0 / m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.compute(gram);
  require(es.info() == Eigen::Success, errc::singular_input,
          "estimate_factors: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues(); // ascending

  out.l_hat.resize(p, k);
  out.c2_hat.resize(m, k);
  out.lambda_hat.resize(k);
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  bool clamped_negative = false;
  for (Eigen::Index j = 0; j < k; ++j) {
    double nu = ev[m - 1 - j];
    if (nu < 0) {
      nu = 0;
      clamped_negative = true;
    }
    Eigen::VectorXd w = es.eigenvectors().col(m - 1 - j);
    Eigen::VectorXd l = (y2 * w) * inv_sqrt_m;
    // Sign convention: largest-magnitude loading positive.
    Eigen::Index imax;
    l.cwiseAbs().maxCoeff(&imax);
    if (l[imax] < 0) {
      l = -l;
      w = -w;
    }
    out.l_hat.col(j) = l;
    out.c2_hat.col(j) = w * std::sqrt(static_cast<double>(m));
    out.lambda_hat[j] = nu * static_cast<double>(m) / static_cast<double>(p);
  }
  if (clamped_negative)
    out.warnings.push_back(
        "negative Gram eigenvalue clamped to zero among the retained factors");
  // Multiplicity at the cut makes the retained rotation arbitrary.
  const double nu_last_kept = std::max(ev[m - k], 0.0);
  const double nu_first_dropped = ev[m - k - 1];
  if (nu_last_kept > 0 &&
      nu_last_kept - nu_first_dropped < 1e-10 * nu_last_kept)
    out.warnings.push_back(
        "eigenvalue tie at the retained rank k (gap below 1e-10 relative); "
        "the factor rotation within the tied block is arbitrary");

  // Residual variance: squared row norm minus the retained projection.
  out.sigma2_hat.resize(p);
  const double dof = static_cast<double>(m - k);
  for (Eigen::Index g = 0; g < p; ++g) {
    const double total = y2.row(g).squaredNorm();
    const double kept = static_cast<double>(m) * out.l_hat.row(g).squaredNorm();
    out.sigma2_hat[g] = std::max(total - kept, 0.0) / dof;
  }
  out.rho_hat = pairwise_mean(out.sigma2_hat);
  return out;
}

// Removes the additive noise floor from the empirical spike strengths.
// Values <= 0 pass through; the shrinkage-correction step clamps.
inline Eigen::VectorXd spike_debias(const Eigen::VectorXd& lambda_hat,
                                    double rho_hat) {
  require(rho_hat >= 0, errc::invalid_argument,
          "spike_debias: rho_hat must be >= 0");
  for (Eigen::Index i = 1; i < lambda_hat.size(); ++i)
    require(lambda_hat[i] <= lambda_hat[i - 1] + 1e-12,
            errc::invalid_argument,
            "spike_debias: lambda_hat must be non-increasing");
  return lambda_hat.array() - rho_hat;
}

} // namespace confadj
