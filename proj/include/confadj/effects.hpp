#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confadj/design.hpp"
#include "confadj/dist.hpp"
#include "confadj/error.hpp"
#include "confadj/factor.hpp"
#include "confadj/numeric.hpp"
#include "confadj/omega.hpp"

namespace confadj {

enum class effect_method {
  unadjusted,
  adjusted_uncorrected,
  adjusted_bias_corrected,
  oracle,
};

inline const char* method_name(effect_method m) {
  switch (m) {
    case effect_method::unadjusted: return "unadjusted";
    case effect_method::adjusted_uncorrected: return "adjusted_uncorrected";
    case effect_method::adjusted_bias_corrected:
      return "adjusted_bias_corrected";
    case effect_method::oracle: return "oracle";
  }
  return "unknown";
}

inline effect_method method_from_name(const std::string& name) {
  if (name == "unadjusted") return effect_method::unadjusted;
  if (name == "adjusted_uncorrected") return effect_method::adjusted_uncorrected;
  if (name == "adjusted_bias_corrected" || name == "bias_corrected")
    return effect_method::adjusted_bias_corrected;
  if (name == "oracle") return effect_method::oracle;
  throw error(errc::invalid_argument, "unknown effect method \"" + name +
                                          "\" (expected unadjusted, "
                                          "adjusted_uncorrected, "
                                          "adjusted_bias_corrected, oracle)");
}

// Per-feature estimates for one method; all matrices are p x d.
struct effect_table {
  effect_method method = effect_method::unadjusted;
  Eigen::MatrixXd beta_hat;
  Eigen::MatrixXd se;
  Eigen::MatrixXd t_stat;
  Eigen::MatrixXd p_value;
  Eigen::Index dof = 0;
  std::vector<std::uint8_t> degenerate; // per feature: zero residual variance
};

namespace detail {

// Shared assembly: beta = y1 - l * omega^T, per-covariate variance profile
// var_j = (x^T x)^{-1}_{jj} + (omega omega^T)_{jj} / n_eff, se/t/p filled in
// with the t reference at the given dof.  Empty l/omega mean no adjustment.
inline effect_table build_effect_table(
    const Eigen::MatrixXd& y1, const Eigen::MatrixXd& l,
    const Eigen::MatrixXd& omega, const Eigen::VectorXd& sigma2,
    const Eigen::MatrixXd& xtx, Eigen::Index n_eff, Eigen::Index dof,
    effect_method method) {
  const Eigen::Index p = y1.rows();
  const Eigen::Index d = y1.cols();
  require(dof >= 1, errc::invalid_argument,
          "effect inference needs at least one residual degree of freedom");
  effect_table out;
  out.method = method;
  out.dof = dof;
  out.degenerate.assign(static_cast<std::size_t>(p), 0);

  out.beta_hat = y1;
  if (omega.size() > 0) {
    require(l.rows() == p && l.cols() == omega.cols() && omega.rows() == d,
            errc::dimension_mismatch,
            "effect inference: loading/omega shapes disagree with y1");
    out.beta_hat.noalias() -= l * omega.transpose();
  }

  const Eigen::MatrixXd xtx_inv =
      xtx.llt().solve(Eigen::MatrixXd::Identity(d, d));
  Eigen::VectorXd var_profile = xtx_inv.diagonal();
  if (omega.size() > 0)
    var_profile +=
        (omega * omega.transpose()).diagonal() / static_cast<double>(n_eff);

  out.se.resize(p, d);
  out.t_stat.resize(p, d);
  out.p_value.resize(p, d);
  const double tdof = static_cast<double>(dof);
  for (Eigen::Index g = 0; g < p; ++g) {
    const double s2 = sigma2[g];
    if (s2 <= 0) {
      out.degenerate[static_cast<std::size_t>(g)] = 1;
      for (Eigen::Index j = 0; j < d; ++j) {
        const double b = out.beta_hat(g, j);
        out.se(g, j) = 0.0;
        out.t_stat(g, j) = b == 0.0 ? 0.0
                                    : (b > 0
                                           ? std::numeric_limits<double>::infinity()
                                           : -std::numeric_limits<double>::infinity());
        out.p_value(g, j) = b == 0.0 ? 1.0 : 0.0;
      }
      continue;
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      const double se = std::sqrt(s2 * var_profile[j]);
      const double t = out.beta_hat(g, j) / se;
      out.se(g, j) = se;
      out.t_stat(g, j) = t;
      out.p_value(g, j) = t_two_sided_p(t, tdof);
    }
  }
  return out;
}

} // namespace detail

// Bias-corrected estimator: beta_g = y1_g - omega_bc * l_hat_g, reference
// t_{n_eff - d - k}.
inline effect_table effects_bias_corrected(const partition& part,
                                           const factor_estimate& fac,
                                           const omega_estimate& om) {
  return detail::build_effect_table(
      part.y1, fac.l_hat, om.omega_bc, fac.sigma2_hat, part.xtx, part.n_eff,
      part.n_eff - part.d - fac.k, effect_method::adjusted_bias_corrected);
}

// Same pipeline but with the uncorrected (attenuated) omega estimate; the
// comparator whose miscalibration the bias correction repairs.
inline effect_table effects_adjusted_uncorrected(const partition& part,
                                                 const factor_estimate& fac,
                                                 const omega_estimate& om) {
  return detail::build_effect_table(
      part.y1, fac.l_hat, om.omega_naive, fac.sigma2_hat, part.xtx,
      part.n_eff, part.n_eff - part.d - fac.k,
      effect_method::adjusted_uncorrected);
}

// Plain per-feature OLS: no latent adjustment, residual variance from the
// design-free block, reference t_{n_eff - d}.
inline effect_table effects_unadjusted(const partition& part) {
  const Eigen::Index m = part.y2.cols();
  Eigen::VectorXd sigma2(part.y2.rows());
  for (Eigen::Index g = 0; g < part.y2.rows(); ++g)
    sigma2[g] = part.y2.row(g).squaredNorm() / static_cast<double>(m);
  return detail::build_effect_table(part.y1, Eigen::MatrixXd(),
                                    Eigen::MatrixXd(), sigma2, part.xtx,
                                    part.n_eff, m,
                                    effect_method::unadjusted);
}

inline effect_table effects_unadjusted(const observed_data& data) {
  return effects_unadjusted(rotate_and_partition(data));
}

// Adjusted estimator with zero latent factors: identical to the unadjusted
// fit (same residual variance and dof).  Used by the k=0 reduction path.
inline effect_table effects_adjusted_none(const partition& part) {
  effect_table t = effects_unadjusted(part);
  t.method = effect_method::adjusted_bias_corrected;
  return t;
}

// OLS with the confounders observed: standardizes c_true on ker(x^T) so the
// score covariance is the identity, regresses y2 on the standardized scores,
// and uses the true (standardized) omega in both the estimate and the
// variance.  c_true rows live in data's current sample frame; nuisance
// covariates are rotated out of both jointly.
inline effect_table effects_oracle(const observed_data& data,
                                   const Eigen::MatrixXd& c_true) {
  require(c_true.rows() == data.y.cols(), errc::dimension_mismatch,
          "effects_oracle: c_true rows must match the sample count");
  const Eigen::Index k = c_true.cols();
  require(k >= 1, errc::invalid_argument, "effects_oracle: c_true is empty");
  require_finite(c_true, "c_true");

  observed_data rotated = data;
  Eigen::MatrixXd c = c_true;
  if (data.z.size() > 0) {
    const Eigen::MatrixXd q = orthonormal_complement(data.z);
    rotated = remove_nuisance(data);
    c = q.transpose() * c_true;
  }
  const partition part = make_partition(rotated);
  const Eigen::Index m = part.y2.cols();
  require(m - k >= 1, errc::invalid_argument,
          "effects_oracle: no residual degrees of freedom");

  const Eigen::MatrixXd c2 = part.a_basis.transpose() * c; // m x k
  Eigen::MatrixXd psi = c2.transpose() * c2 / static_cast<double>(m);
  Eigen::MatrixXd psi_inv_sqrt;
  try {
    psi_inv_sqrt = symmetric_inv_sqrt(psi);
  } catch (const error&) {
    throw error(errc::singular_input,
                "effects_oracle: confounders are collinear with the design "
                "after projection");
  }
  const Eigen::MatrixXd c2s = c2 * psi_inv_sqrt; // c2s^T c2s = m I
  const Eigen::MatrixXd l_ols =
      part.y2 * c2s / static_cast<double>(m); // p x k
  const Eigen::MatrixXd omega =
      (part.xtx.llt().solve(part.x.transpose() * c)) * psi_inv_sqrt; // d x k

  Eigen::VectorXd sigma2(part.y2.rows());
  const double dof = static_cast<double>(m - k);
  for (Eigen::Index g = 0; g < part.y2.rows(); ++g) {
    const double total = part.y2.row(g).squaredNorm();
    const double kept =
        static_cast<double>(m) * l_ols.row(g).squaredNorm();
    sigma2[g] = std::max(total - kept, 0.0) / dof;
  }
  return detail::build_effect_table(part.y1, l_ols, omega, sigma2, part.xtx,
                                    part.n_eff, m - k,
                                    effect_method::oracle);
}

// Quadratic test of whether the design is associated with the latent
// factors at all.  Under no confounding, each diagonal entry of
//   w = (x^T x)^{1/2} omega_bc omega_bc^T (x^T x)^{1/2}
// is asymptotically chi-squared with k degrees of freedom.
struct confounding_test {
  Eigen::MatrixXd statistic;          // d x d
  Eigen::VectorXd per_covariate_chi2; // diag(statistic)
  Eigen::Index dof = 0;
  Eigen::VectorXd p_values; // per covariate, upper tail
};

inline confounding_test test_confounding(const omega_estimate& om,
                                         const Eigen::MatrixXd& xtx) {
  const Eigen::Index d = om.omega_bc.rows();
  const Eigen::Index k = om.omega_bc.cols();
  require(xtx.rows() == d && xtx.cols() == d, errc::dimension_mismatch,
          "test_confounding: xtx shape disagrees with omega");
  confounding_test out;
  const Eigen::MatrixXd root = symmetric_sqrt(xtx);
  out.statistic = root * om.omega_bc * om.omega_bc.transpose() * root;
  out.per_covariate_chi2 = out.statistic.diagonal();
  out.dof = k;
  out.p_values.resize(d);
  for (Eigen::Index j = 0; j < d; ++j)
    out.p_values[j] =
        chi2_sf(out.per_covariate_chi2[j], static_cast<double>(k));
  return out;
}

} // namespace confadj
