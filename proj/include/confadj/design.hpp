#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confadj/error.hpp"
#include "confadj/numeric.hpp"

namespace confadj {

// Response matrix plus designs.  y is features-by-samples (p x n); x holds
// the covariates under test (n x d); z holds nuisance covariates to be
// rotated out (n x r, r == 0 when absent).
struct observed_data {
  Eigen::MatrixXd y;
  Eigen::MatrixXd x;
  Eigen::MatrixXd z;
  std::vector<std::string> feature_ids;
  std::vector<std::string> sample_ids;
  std::vector<std::string> covariate_ids;
};

// Split of y into the design projection y1 and the design-free residual
// block y2 = y * a_basis, where a_basis spans ker(x^T).
struct partition {
  Eigen::MatrixXd y1;      // p x d
  Eigen::MatrixXd y2;      // p x (n_eff - d)
  Eigen::MatrixXd a_basis; // n_eff x (n_eff - d)
  Eigen::MatrixXd x;       // n_eff x d
  Eigen::MatrixXd xtx;     // d x d
  Eigen::Index n_eff = 0;
  Eigen::Index d = 0;
  std::vector<std::string> feature_ids;
  std::vector<std::string> covariate_ids;
};

inline constexpr double condition_limit = 1e12;

// Structural checks shared by all entry points; k_max is the number of
// latent factors the caller intends to fit.
inline void validate_observed(const observed_data& data, Eigen::Index k_max) {
  const Eigen::Index p = data.y.rows();
  const Eigen::Index n = data.y.cols();
  const Eigen::Index d = data.x.cols();
  const Eigen::Index r = data.z.size() > 0 ? data.z.cols() : 0;
  require(p > 0 && n > 0, errc::invalid_argument, "empty response matrix");
  require(data.x.rows() == n, errc::dimension_mismatch,
          "x has " + std::to_string(data.x.rows()) + " rows but y has " +
              std::to_string(n) + " samples");
  require(d >= 1, errc::invalid_argument, "x must have at least one column");
  if (r > 0)
    require(data.z.rows() == n, errc::dimension_mismatch,
            "z has " + std::to_string(data.z.rows()) + " rows but y has " +
                std::to_string(n) + " samples");
  require(n > d + r + k_max, errc::invalid_argument,
          "need n > d + r + k (" + std::to_string(n) + " samples vs d=" +
              std::to_string(d) + ", r=" + std::to_string(r) +
              ", k=" + std::to_string(k_max) + ")");
  require(p > n, errc::invalid_argument,
          "expected more features than samples (p=" + std::to_string(p) +
              ", n=" + std::to_string(n) + ")");
  if (!data.feature_ids.empty())
    require(static_cast<Eigen::Index>(data.feature_ids.size()) == p,
            errc::dimension_mismatch, "feature_ids length != p");
  if (!data.sample_ids.empty())
    require(static_cast<Eigen::Index>(data.sample_ids.size()) == n,
            errc::dimension_mismatch, "sample_ids length != n");
  require_finite(data.y, "y");
  require_finite(data.x, "x");
  if (r > 0) require_finite(data.z, "z");
}

// Orthonormal basis of ker(x^T): the trailing n-d columns of the Q factor
// of a Householder QR of x.  Any valid basis is acceptable downstream.
inline Eigen::MatrixXd orthonormal_complement(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  require(n > d && d >= 1, errc::invalid_argument,
          "orthonormal_complement: need more rows than columns");
  require_finite(x, "x");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(d);
  const double scale = r.cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < d; ++j)
    require(std::abs(r(j, j)) > 1e-12 * scale, errc::singular_input,
            "column " + std::to_string(j + 1) +
                " of the design is linearly dependent on earlier columns");
  Eigen::MatrixXd q = qr.householderQ();
  return q.rightCols(n - d);
}

// Rotates nuisance covariates out of the data: y -> y Q, x -> Q^T x for Q an
// orthonormal basis of ker(z^T).  With no z this is the identity.
inline observed_data remove_nuisance(const observed_data& data) {
  if (data.z.size() == 0) return data;
  validate_observed(data, 0);
  const Eigen::Index n = data.y.cols();
  const Eigen::Index r = data.z.cols();
  // x must survive the rotation: [z x] jointly full rank.
  Eigen::MatrixXd zx(n, r + data.x.cols());
  zx << data.z, data.x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> joint(zx);
  require(joint.rank() == zx.cols(), errc::singular_input,
          "x is absorbed by the nuisance space ([x z] is rank deficient)");
  const Eigen::MatrixXd q = orthonormal_complement(data.z);
  observed_data out;
  out.y.noalias() = data.y * q;
  out.x.noalias() = q.transpose() * data.x;
  out.feature_ids = data.feature_ids;
  out.covariate_ids = data.covariate_ids;
  // Rotated pseudo-samples no longer correspond to input samples.
  out.sample_ids.clear();
  return out;
}

namespace detail {

inline void check_design_conditioning(const Eigen::MatrixXd& xtx) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xtx);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  require(lo > 0 && hi / lo < condition_limit, errc::singular_input,
          "x^T x condition number exceeds 1e12 (design near collinear)");
}

} // namespace detail

// Builds the partition from nuisance-free data.
inline partition make_partition(const observed_data& data) {
  require(data.z.size() == 0, errc::invalid_argument,
          "nuisance covariates present; apply remove_nuisance first");
  validate_observed(data, 1);
  partition out;
  out.n_eff = data.y.cols();
  out.d = data.x.cols();
  out.x = data.x;
  out.xtx.noalias() = data.x.transpose() * data.x;
  detail::check_design_conditioning(out.xtx);
  out.a_basis = orthonormal_complement(data.x);
  out.y1.noalias() = data.y * data.x * out.xtx.llt().solve(
                                           Eigen::MatrixXd::Identity(
                                               out.d, out.d));
  out.y2.noalias() = data.y * out.a_basis;
  out.feature_ids = data.feature_ids;
  out.covariate_ids = data.covariate_ids;
  return out;
}

// remove_nuisance + make_partition with the two sample-side products fused
// into one pass over y; identical results up to floating-point association.
inline partition rotate_and_partition(const observed_data& data) {
  if (data.z.size() == 0) return make_partition(data);
  validate_observed(data, 1);
  const Eigen::Index n = data.y.cols();
  const Eigen::Index r = data.z.cols();
  Eigen::MatrixXd zx(n, r + data.x.cols());
  zx << data.z, data.x;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> joint(zx);
  require(joint.rank() == zx.cols(), errc::singular_input,
          "x is absorbed by the nuisance space ([x z] is rank deficient)");
  const Eigen::MatrixXd q = orthonormal_complement(data.z);
  partition out;
  out.n_eff = n - r;
  out.d = data.x.cols();
  out.x.noalias() = q.transpose() * data.x;
  out.xtx.noalias() = out.x.transpose() * out.x;
  detail::check_design_conditioning(out.xtx);
  out.a_basis = orthonormal_complement(out.x);
  Eigen::MatrixXd right(n, out.d + out.a_basis.cols());
  right.leftCols(out.d).noalias() =
      q * (out.x * out.xtx.llt().solve(
                       Eigen::MatrixXd::Identity(out.d, out.d)));
  right.rightCols(out.a_basis.cols()).noalias() = q * out.a_basis;
  Eigen::MatrixXd both;
  both.noalias() = data.y * right;
  out.y1 = both.leftCols(out.d);
  out.y2 = both.rightCols(out.a_basis.cols());
  out.feature_ids = data.feature_ids;
  out.covariate_ids = data.covariate_ids;
  return out;
}

} // namespace confadj
