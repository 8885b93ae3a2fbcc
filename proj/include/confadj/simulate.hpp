#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "confadj/design.hpp"
#include "confadj/dist.hpp"
#include "confadj/error.hpp"
#include "confadj/numeric.hpp"
#include "confadj/rng.hpp"

namespace confadj {

// Placement of the nonzero confounding components: the leading half of the
// eigenvalue ladder (omega1, strong factors), the trailing half (omega2,
// weak factors), no confounding, or a caller-supplied row.
enum class omega_scenario { omega1, omega2, none, custom };

inline const char* scenario_name(omega_scenario s) {
  switch (s) {
    case omega_scenario::omega1: return "omega1";
    case omega_scenario::omega2: return "omega2";
    case omega_scenario::none: return "null";
    case omega_scenario::custom: return "custom";
  }
  return "unknown";
}

inline omega_scenario scenario_from_name(const std::string& name) {
  if (name == "omega1") return omega_scenario::omega1;
  if (name == "omega2") return omega_scenario::omega2;
  if (name == "null" || name == "none") return omega_scenario::none;
  if (name == "custom") return omega_scenario::custom;
  throw error(errc::invalid_argument,
              "unknown omega scenario \"" + name +
                  "\" (expected omega1, omega2, null, custom)");
}

// Synthetic-data parameters.  p defaults to the desk scale; 1e5 reproduces
// the full-size regime at ~5x the cost.
struct simulation_config {
  int n = 100;
  int p = 20000;
  int k = 10;
  int d = 1; // two balanced groups
  double lambda_max_frac = 0.2;   // lambda_1 = n * lambda_max_frac
  double lambda_min = 1.0;        // lambda_k
  double beta_nonzero_prob = 0.05;
  double beta_sd = 0.4;
  double loading_sd = 0.5;
  double sigma2_mean = 1.0;
  double sigma2_var = 0.25;
  double noise_df = 4.0; // infinity selects gaussian noise
  double mediated_frac = 0.2;
  omega_scenario scenario = omega_scenario::omega2;
  std::vector<double> omega_custom; // used when scenario == custom
  std::uint64_t seed = 1;
};

// Ground truth retained for validation.  The standardized block lives in
// the nuisance-free frame (intercept rotated out): c has n-1 rows there.
struct standardized_truth {
  Eigen::MatrixXd l;          // p x k
  Eigen::MatrixXd c;          // (frame rows) x k
  Eigen::MatrixXd omega_ols;  // d x k
  Eigen::MatrixXd psi_hat;    // k x k, pre-rotation score covariance
  Eigen::VectorXd lambda_realized; // k, decreasing
};

struct simulation_truth {
  Eigen::MatrixXd b_true;    // p x d
  Eigen::MatrixXd l_bar;     // p x k, raw loadings
  Eigen::MatrixXd c_bar;     // n x k, raw confounders
  Eigen::VectorXd sigma2;    // p
  Eigen::MatrixXd omega_bar; // d x k, raw confounding row
  standardized_truth standardized;
  Eigen::VectorXd lambda; // target eigenvalue ladder
};

// Geometric ladder from n * lambda_max_frac down to lambda_min.
inline Eigen::VectorXd lambda_ladder(int n, int k, double lambda_max_frac,
                                     double lambda_min) {
  require(k >= 1, errc::invalid_argument, "lambda_ladder: k must be >= 1");
  require(lambda_max_frac > 0 && lambda_min > 0, errc::invalid_argument,
          "lambda_ladder: scale parameters must be positive");
  const double top = static_cast<double>(n) * lambda_max_frac;
  Eigen::VectorXd lambda(k);
  if (k == 1) {
    lambda[0] = top;
    return lambda;
  }
  require(top >= lambda_min, errc::invalid_argument,
          "lambda_ladder: n * lambda_max_frac must be >= lambda_min");
  for (int j = 0; j < k; ++j) {
    const double t = static_cast<double>(k - 1 - j) / static_cast<double>(k - 1);
    lambda[j] = std::pow(top, t) * std::pow(lambda_min, 1.0 - t);
  }
  return lambda;
}

// Squared confounding norm that makes the latent-mediated share of the
// design-variance equal mediated_frac, with the confounding spread over the
// trailing half of the ladder:
//   mediated_frac = |omega|^2 S / (beta_sd^2 + |omega|^2 S),
//   S = sum_{k > K/2} lambda_k / (n - 2).
inline double calibrate_omega_norm(const Eigen::VectorXd& lambda, int n,
                                   double mediated_frac, double beta_sd) {
  require(mediated_frac > 0 && mediated_frac < 1, errc::invalid_argument,
          "calibrate_omega_norm: mediated_frac must lie in (0,1)");
  require(n > 2, errc::invalid_argument, "calibrate_omega_norm: n must be > 2");
  const Eigen::Index k = lambda.size();
  require(k >= 1, errc::invalid_argument,
          "calibrate_omega_norm: empty eigenvalue ladder");
  double s = 0.0;
  for (Eigen::Index j = k / 2; j < k; ++j) s += lambda[j];
  s /= static_cast<double>(n - 2);
  require(s > 0, errc::invalid_argument,
          "calibrate_omega_norm: trailing eigenvalues sum to zero");
  return (mediated_frac / (1.0 - mediated_frac)) * beta_sd * beta_sd / s;
}

// Rescales (l_bar, c_bar, omega) so the projected score covariance is the
// identity and the loading Gram is diagonal decreasing: l = l_bar psi^{1/2} u,
// c = c_bar psi^{-1/2} u, omega = ((x^T x)^{-1} x^T c_bar) psi^{-1/2} u with
// psi = c_bar^T P_x^perp c_bar / (n - d) and u the diagonalizing rotation.
inline standardized_truth standardize_truth(const Eigen::MatrixXd& l_bar,
                                            const Eigen::MatrixXd& c_bar,
                                            const Eigen::MatrixXd& x) {
  const Eigen::Index p = l_bar.rows();
  const Eigen::Index k = l_bar.cols();
  const Eigen::Index n = c_bar.rows();
  const Eigen::Index d = x.cols();
  require(c_bar.cols() == k, errc::dimension_mismatch,
          "standardize_truth: l_bar and c_bar must agree on k");
  require(x.rows() == n, errc::dimension_mismatch,
          "standardize_truth: x and c_bar must agree on the sample count");
  const Eigen::Index m = n - d;
  require(m >= k, errc::invalid_argument,
          "standardize_truth: need n - d >= k");

  const Eigen::MatrixXd a = orthonormal_complement(x);
  const Eigen::MatrixXd c2 = a.transpose() * c_bar;
  const Eigen::MatrixXd psi = c2.transpose() * c2 / static_cast<double>(m);
  Eigen::MatrixXd psi_sqrt, psi_inv_sqrt;
  try {
    psi_sqrt = symmetric_sqrt(psi);
    psi_inv_sqrt = symmetric_inv_sqrt(psi);
  } catch (const error&) {
    throw error(errc::singular_input,
                "standardize_truth: projected score covariance is singular");
  }

  standardized_truth out;
  out.psi_hat = psi;
  out.l = l_bar * psi_sqrt;
  out.c = c_bar * psi_inv_sqrt;
  out.omega_ols =
      (x.transpose() * x).llt().solve(x.transpose() * c_bar) * psi_inv_sqrt;

  // Rotate to the identifiable basis: (m/p) l^T l diagonal, decreasing.
  Eigen::MatrixXd gram(k, k);
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(
      out.l.transpose(), static_cast<double>(m) / static_cast<double>(p));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  require(es.info() == Eigen::Success, errc::singular_input,
          "standardize_truth: loading Gram eigendecomposition failed");
  Eigen::MatrixXd u(k, k);
  out.lambda_realized.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    u.col(j) = es.eigenvectors().col(k - 1 - j);
    out.lambda_realized[j] = es.eigenvalues()[k - 1 - j];
  }
  out.l = out.l * u;
  out.c = out.c * u;
  out.omega_ols = out.omega_ols * u;
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index imax;
    out.l.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.l(imax, j) < 0) {
      out.l.col(j) = -out.l.col(j);
      out.c.col(j) = -out.c.col(j);
      out.omega_ols.col(j) = -out.omega_ols.col(j);
    }
  }
  return out;
}

namespace detail {

// Stream ids, one per independent random component.
enum sim_stream : std::uint32_t {
  stream_b_mask = 0,
  stream_b_value = 1,
  stream_l_mask = 2,
  stream_l_value = 3,
  stream_c_noise = 4,
  stream_sigma2 = 5,
  stream_noise = 6,
};

} // namespace detail

inline void validate_config(const simulation_config& cfg) {
  require(cfg.n >= 4 && cfg.n % 2 == 0, errc::invalid_argument,
          "simulation: n must be even (balanced groups) and >= 4");
  require(cfg.d == 1, errc::invalid_argument,
          "simulation: the generator produces a single two-group contrast "
          "(d must be 1)");
  require(cfg.k >= 1, errc::invalid_argument, "simulation: k must be >= 1");
  require(cfg.p > cfg.n, errc::invalid_argument,
          "simulation: need p > n");
  require(cfg.n >= cfg.k + 3, errc::invalid_argument,
          "simulation: need n >= k + 3 for residual degrees of freedom");
  require(cfg.beta_nonzero_prob >= 0 && cfg.beta_nonzero_prob <= 1,
          errc::invalid_argument,
          "simulation: beta_nonzero_prob must lie in [0,1]");
  require(cfg.beta_sd >= 0, errc::invalid_argument,
          "simulation: beta_sd must be >= 0");
  require(cfg.loading_sd > 0, errc::invalid_argument,
          "simulation: loading_sd must be positive");
  require(cfg.sigma2_mean > 0 && cfg.sigma2_var > 0, errc::invalid_argument,
          "simulation: sigma2 moments must be positive");
  require(cfg.mediated_frac > 0 && cfg.mediated_frac < 1,
          errc::invalid_argument,
          "simulation: mediated_frac must lie in (0,1)");
  require(std::isinf(cfg.noise_df) || cfg.noise_df > 2, errc::invalid_argument,
          "simulation: noise_df must exceed 2 (finite variance) or be inf");
  if (cfg.scenario == omega_scenario::omega1 ||
      cfg.scenario == omega_scenario::omega2)
    require(cfg.k % 2 == 0, errc::invalid_argument,
            "simulation: omega1/omega2 scenarios require even k");
  if (cfg.scenario == omega_scenario::custom)
    require(static_cast<int>(cfg.omega_custom.size()) == cfg.k,
            errc::invalid_argument,
            "simulation: custom scenario needs an omega entry per factor");
  const Eigen::VectorXd lambda =
      lambda_ladder(cfg.n, cfg.k, cfg.lambda_max_frac, cfg.lambda_min);
  const double m_dof = static_cast<double>(cfg.n - 1 - cfg.d);
  const double max_support =
      m_dof * cfg.loading_sd * cfg.loading_sd;
  require(lambda[0] <= max_support, errc::invalid_argument,
          "simulation: lambda_1 exceeds the loading sparsity budget "
          "(lambda_max_frac too large for loading_sd)");
}

// Draws one dataset.  Every variate is a fixed function of
// (seed, rep, component, slot), so replicates are independent and the result
// is identical regardless of evaluation order or thread count.
inline std::pair<observed_data, simulation_truth> generate_scenario(
    const simulation_config& cfg, std::uint64_t rep = 0) {
  validate_config(cfg);
  const Eigen::Index n = cfg.n;
  const Eigen::Index p = cfg.p;
  const Eigen::Index k = cfg.k;
  // Intercept plus contrast leave n - 2 free dimensions; loading sparsity is
  // set so the scaled Gram of the loadings targets the ladder exactly there.
  const double m_dof = static_cast<double>(cfg.n - 1 - cfg.d);

  simulation_truth truth;
  truth.lambda = lambda_ladder(cfg.n, cfg.k, cfg.lambda_max_frac,
                               cfg.lambda_min);

  // Confounding row: per-component scale chosen so the latent-mediated share
  // of the design variance over the active components hits mediated_frac.
  truth.omega_bar = Eigen::MatrixXd::Zero(1, k);
  switch (cfg.scenario) {
    case omega_scenario::omega1: {
      const double w = std::sqrt(calibrate_omega_norm(
          truth.lambda, cfg.n, cfg.mediated_frac, cfg.beta_sd));
      for (Eigen::Index j = 0; j < k / 2; ++j) truth.omega_bar(0, j) = w;
      break;
    }
    case omega_scenario::omega2: {
      const double w = std::sqrt(calibrate_omega_norm(
          truth.lambda, cfg.n, cfg.mediated_frac, cfg.beta_sd));
      for (Eigen::Index j = k / 2; j < k; ++j) truth.omega_bar(0, j) = w;
      break;
    }
    case omega_scenario::none:
      break;
    case omega_scenario::custom:
      for (Eigen::Index j = 0; j < k; ++j)
        truth.omega_bar(0, j) = cfg.omega_custom[static_cast<std::size_t>(j)];
      break;
  }

  observed_data data;
  data.x.resize(n, 1);
  for (Eigen::Index i = 0; i < n; ++i)
    data.x(i, 0) = i < n / 2 ? 0.0 : 1.0;
  data.z = Eigen::MatrixXd::Ones(n, 1);

  // Sparse effects: mask and value streams are separate so toggling the
  // nonzero probability does not reshuffle the values.
  const rng::stream b_mask(cfg.seed, detail::stream_b_mask, rep);
  const rng::stream b_value(cfg.seed, detail::stream_b_value, rep);
  truth.b_true.resize(p, 1);
  for (Eigen::Index g = 0; g < p; ++g) {
    const bool nonzero =
        b_mask.uniform(static_cast<std::uint64_t>(g)) < cfg.beta_nonzero_prob;
    truth.b_true(g, 0) =
        nonzero
            ? cfg.beta_sd * b_value.normal(2 * static_cast<std::uint64_t>(g))
            : 0.0;
  }

  // Sparse loadings: component j keeps a fraction lambda_j / (m_dof sd^2)
  // of features, making E[(m/p) l^T l]_jj equal lambda_j.
  const rng::stream l_mask(cfg.seed, detail::stream_l_mask, rep);
  const rng::stream l_value(cfg.seed, detail::stream_l_value, rep);
  Eigen::VectorXd keep_prob(k);
  for (Eigen::Index j = 0; j < k; ++j)
    keep_prob[j] =
        truth.lambda[j] / (m_dof * cfg.loading_sd * cfg.loading_sd);
  truth.l_bar = Eigen::MatrixXd::Zero(p, k);
  for (Eigen::Index g = 0; g < p; ++g)
    for (Eigen::Index j = 0; j < k; ++j) {
      const std::uint64_t cell =
          static_cast<std::uint64_t>(g) * static_cast<std::uint64_t>(k) +
          static_cast<std::uint64_t>(j);
      if (l_mask.uniform(cell) < keep_prob[j])
        truth.l_bar(g, j) = cfg.loading_sd * l_value.normal(2 * cell);
    }

  // Confounders: x omega_bar plus standard normal noise.
  const rng::stream c_noise(cfg.seed, detail::stream_c_noise, rep);
  truth.c_bar.resize(n, k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < k; ++j) {
      const std::uint64_t cell =
          static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(k) +
          static_cast<std::uint64_t>(j);
      truth.c_bar(i, j) =
          data.x(i, 0) * truth.omega_bar(0, j) + c_noise.normal(2 * cell);
    }

  // Residual variances: gamma with the requested mean and variance.  An
  // integer shape is drawn as a sum of exponentials (shape slots per
  // feature); otherwise one slot feeds the quantile function.
  const rng::stream s2(cfg.seed, detail::stream_sigma2, rep);
  const double shape = cfg.sigma2_mean * cfg.sigma2_mean / cfg.sigma2_var;
  const double rate = cfg.sigma2_mean / cfg.sigma2_var;
  const bool integer_shape =
      std::abs(shape - std::round(shape)) < 1e-9 && shape >= 1 && shape <= 64;
  const int shape_slots = integer_shape ? static_cast<int>(std::round(shape)) : 1;
  truth.sigma2.resize(p);
  for (Eigen::Index g = 0; g < p; ++g) {
    const std::uint64_t base =
        static_cast<std::uint64_t>(g) * static_cast<std::uint64_t>(shape_slots);
    if (integer_shape) {
      double sum = 0.0;
      for (int t = 0; t < shape_slots; ++t)
        sum += s2.exponential(base + static_cast<std::uint64_t>(t));
      truth.sigma2[g] = sum / rate;
    } else {
      truth.sigma2[g] = gamma_quantile(s2.uniform(base), shape, rate);
    }
  }

  // Noise: scaled t with noise_df degrees of freedom (variance sigma_g^2),
  // or gaussian when noise_df is infinite.
  const rng::stream noise(cfg.seed, detail::stream_noise, rep);
  const bool gaussian = std::isinf(cfg.noise_df);
  const double t_scale =
      gaussian ? 1.0 : std::sqrt((cfg.noise_df - 2.0) / cfg.noise_df);
  data.y.resize(p, n);
  for (Eigen::Index g = 0; g < p; ++g) {
    const double sg = std::sqrt(truth.sigma2[g]);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::uint64_t cell =
          static_cast<std::uint64_t>(g) * static_cast<std::uint64_t>(n) +
          static_cast<std::uint64_t>(i);
      double e;
      if (gaussian)
        e = sg * noise.normal(2 * cell);
      else if (cfg.noise_df == 4.0)
        e = sg * t_scale * t4_quantile(noise.uniform(cell));
      else
        e = sg * t_scale * t_quantile(noise.uniform(cell), cfg.noise_df);
      data.y(g, i) = e;
    }
  }
  data.y.noalias() += truth.b_true * data.x.transpose();
  data.y.noalias() += truth.l_bar * truth.c_bar.transpose();

  data.feature_ids.resize(static_cast<std::size_t>(p));
  for (Eigen::Index g = 0; g < p; ++g)
    data.feature_ids[static_cast<std::size_t>(g)] =
        "f" + std::to_string(g + 1);
  data.sample_ids.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    data.sample_ids[static_cast<std::size_t>(i)] = "s" + std::to_string(i + 1);
  data.covariate_ids = {"x1"};

  // Standardized truth lives in the intercept-free frame.
  const Eigen::MatrixXd q = orthonormal_complement(data.z);
  truth.standardized = standardize_truth(
      truth.l_bar, q.transpose() * truth.c_bar, q.transpose() * data.x);
  return {std::move(data), std::move(truth)};
}

} // namespace confadj
