#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "confadj/design.hpp"
#include "confadj/dist.hpp"
#include "confadj/numeric.hpp"
#include "confadj/simulate.hpp"

using namespace confadj;

TEST_CASE("eigenvalue ladder is geometric with pinned endpoints",
          "[simulate]") {
  const Eigen::VectorXd lam = lambda_ladder(100, 10, 0.2, 1.0);
  REQUIRE(lam[0] == Catch::Approx(20.0).epsilon(1e-12));
  REQUIRE(lam[9] == Catch::Approx(1.0).epsilon(1e-12));
  const double ratio = lam[1] / lam[0];
  for (int j = 1; j < 10; ++j)
    REQUIRE(lam[j] / lam[j - 1] == Catch::Approx(ratio).epsilon(1e-10));

  const Eigen::VectorXd single = lambda_ladder(50, 1, 0.1, 2.0);
  REQUIRE(single.size() == 1);
  REQUIRE(single[0] == 5.0);

  REQUIRE_THROWS_WITH(lambda_ladder(10, 3, 0.1, 5.0),
                      Catch::Matchers::ContainsSubstring(">= lambda_min"));
  REQUIRE_THROWS_AS(lambda_ladder(10, 0, 0.1, 0.5), error);
  REQUIRE_THROWS_AS(lambda_ladder(10, 3, -0.1, 0.5), error);
}

TEST_CASE("confounding norm calibration hits its pinned values",
          "[simulate]") {
  const Eigen::VectorXd lam = lambda_ladder(100, 10, 0.2, 1.0);
  const double v = calibrate_omega_norm(lam, 100, 0.2, 0.4);
  REQUIRE(v == Catch::Approx(0.3615657411168253).epsilon(1e-12));

  // Direct form: (f/(1-f)) beta_sd^2 / S with S the trailing-half spike
  // mass over n - 2.
  double s = 0.0;
  for (int j = 5; j < 10; ++j) s += lam[j];
  s /= 98.0;
  REQUIRE(v == Catch::Approx(0.25 * 0.16 / s).epsilon(1e-14));
  REQUIRE(std::sqrt(v / 5.0) ==
          Catch::Approx(0.26891104146792683).epsilon(1e-12));
  REQUIRE(std::sqrt(v) == Catch::Approx(0.60130336862254922).epsilon(1e-12));

  // Vanishes with the mediated share, grows with it.
  REQUIRE(calibrate_omega_norm(lam, 100, 1e-12, 0.4) < 1e-9);
  REQUIRE(calibrate_omega_norm(lam, 100, 0.5, 0.4) > v);

  REQUIRE_THROWS_AS(calibrate_omega_norm(lam, 100, 0.0, 0.4), error);
  REQUIRE_THROWS_AS(calibrate_omega_norm(lam, 100, 1.0, 0.4), error);
  REQUIRE_THROWS_AS(calibrate_omega_norm(lam, 2, 0.2, 0.4), error);
  REQUIRE_THROWS_AS(calibrate_omega_norm(Eigen::VectorXd(), 100, 0.2, 0.4),
                    error);
}

TEST_CASE("generated design uses balanced groups and an intercept",
          "[simulate]") {
  simulation_config cfg;
  cfg.p = 300;
  cfg.n = 20;
  cfg.k = 2;
  cfg.seed = 5;
  const auto [data, truth] = generate_scenario(cfg);
  REQUIRE(data.x.rows() == 20);
  for (int i = 0; i < 20; ++i)
    REQUIRE(data.x(i, 0) == (i < 10 ? 0.0 : 1.0));
  REQUIRE((data.z.array() == 1.0).all());
  REQUIRE(data.feature_ids.front() == "f1");
  REQUIRE(data.feature_ids.back() == "f300");
  REQUIRE(data.sample_ids.front() == "s1");
  REQUIRE(data.sample_ids.back() == "s20");
  REQUIRE(data.covariate_ids == std::vector<std::string>{"x1"});
  REQUIRE(truth.b_true.rows() == 300);
  REQUIRE(truth.lambda.size() == 2);
}

TEST_CASE("marginal moments of the generated pieces", "[simulate][slow]") {
  simulation_config cfg; // defaults: p = 20000, t4 noise, omega2
  cfg.seed = 17;
  const auto [data, truth] = generate_scenario(cfg);
  const int p = cfg.p;

  // Residual variances: gamma with mean 1, variance 0.25.
  const double s2_mean = truth.sigma2.mean();
  const double s2_var =
      (truth.sigma2.array() - s2_mean).square().sum() / (p - 1);
  REQUIRE(s2_mean == Catch::Approx(1.0).margin(0.011));
  REQUIRE(s2_var == Catch::Approx(0.25).margin(0.02));
  REQUIRE(truth.sigma2.minCoeff() > 0.0);

  // Sparse effects: mask frequency and value scale.
  int nonzero = 0;
  double bsumsq = 0.0;
  for (int g = 0; g < p; ++g)
    if (truth.b_true(g, 0) != 0.0) {
      ++nonzero;
      bsumsq += truth.b_true(g, 0) * truth.b_true(g, 0);
    }
  REQUIRE(static_cast<double>(nonzero) / p == Catch::Approx(0.05).margin(0.005));
  REQUIRE(std::sqrt(bsumsq / nonzero) == Catch::Approx(0.4).epsilon(0.1));

  // Heavy-tailed noise: tail mass far beyond the gaussian level.
  const Eigen::MatrixXd resid = data.y - truth.b_true * data.x.transpose() -
                                truth.l_bar * truth.c_bar.transpose();
  const double t_scale = std::sqrt(0.5); // (df-2)/df at df = 4
  int far = 0;
  for (int g = 0; g < p; ++g) {
    const double cut = 3.0 * std::sqrt(truth.sigma2[g]) * t_scale;
    for (int i = 0; i < cfg.n; ++i)
      if (std::abs(resid(g, i)) > cut) ++far;
  }
  const double tail = static_cast<double>(far) / (p * cfg.n);
  // P(|T_4| > 3) = 1 - x (3 - x^2) / 2 at x = 3 / sqrt(3^2 + 4).
  const double xx = 3.0 / std::sqrt(13.0);
  const double t4_tail = 1.0 - xx * (3.0 - xx * xx) / 2.0;
  REQUIRE(tail == Catch::Approx(t4_tail).margin(0.004));

  simulation_config gcfg = cfg;
  gcfg.noise_df = std::numeric_limits<double>::infinity();
  const auto [gdata, gtruth] = generate_scenario(gcfg);
  const Eigen::MatrixXd gresid = gdata.y -
                                 gtruth.b_true * gdata.x.transpose() -
                                 gtruth.l_bar * gtruth.c_bar.transpose();
  int gfar = 0;
  for (int g = 0; g < p; ++g) {
    const double cut = 3.0 * std::sqrt(gtruth.sigma2[g]);
    for (int i = 0; i < cfg.n; ++i)
      if (std::abs(gresid(g, i)) > cut) ++gfar;
  }
  REQUIRE(static_cast<double>(gfar) / (p * cfg.n) < 0.006);
}

TEST_CASE("loading sparsity targets the eigenvalue ladder", "[simulate][slow]") {
  simulation_config cfg;
  cfg.p = 10000;
  cfg.seed = 19;
  const double m_dof = cfg.n - 1 - cfg.d;
  Eigen::VectorXd mean_gram = Eigen::VectorXd::Zero(cfg.k);
  const int reps = 10;
  for (int r = 0; r < reps; ++r) {
    const auto [data, truth] =
        generate_scenario(cfg, static_cast<std::uint64_t>(r));
    mean_gram +=
        (truth.l_bar.transpose() * truth.l_bar).diagonal() * (m_dof / cfg.p);
  }
  mean_gram /= reps;
  const Eigen::VectorXd lam =
      lambda_ladder(cfg.n, cfg.k, cfg.lambda_max_frac, cfg.lambda_min);
  for (int j = 0; j < cfg.k; ++j)
    REQUIRE(mean_gram[j] == Catch::Approx(lam[j]).epsilon(0.15));
}

TEST_CASE("mediated design variance follows the strict calibration",
          "[simulate][slow]") {
  simulation_config cfg; // omega2 default
  cfg.seed = 23;
  const auto [data, truth] = generate_scenario(cfg);
  const Eigen::VectorXd med = truth.l_bar * truth.omega_bar.transpose();
  const double med_var = med.squaredNorm() / cfg.p;
  const double share = med_var / (0.4 * 0.4 + med_var);
  REQUIRE(share > 0.15);
  REQUIRE(share < 0.25);

  // The same per-component scale on the leading half mediates far more:
  // the calibration denominator is pinned to the trailing-half spike mass.
  simulation_config lead = cfg;
  lead.scenario = omega_scenario::omega1;
  const auto [ldata, ltruth] = generate_scenario(lead);
  const Eigen::VectorXd lmed = ltruth.l_bar * ltruth.omega_bar.transpose();
  const double lshare =
      lmed.squaredNorm() / cfg.p / (0.16 + lmed.squaredNorm() / cfg.p);
  REQUIRE(lshare > 0.4);

  // Active components carry the calibrated per-component weight.
  const double w = std::sqrt(calibrate_omega_norm(
      truth.lambda, cfg.n, cfg.mediated_frac, cfg.beta_sd));
  for (int j = 0; j < cfg.k; ++j) {
    REQUIRE(truth.omega_bar(0, j) == (j < cfg.k / 2 ? 0.0 : w));
    REQUIRE(ltruth.omega_bar(0, j) == (j < cfg.k / 2 ? w : 0.0));
  }
}

TEST_CASE("replicates are deterministic and streams are separable",
          "[simulate]") {
  simulation_config cfg;
  cfg.p = 250;
  cfg.n = 16;
  cfg.k = 2;
  cfg.seed = 29;
  cfg.scenario = omega_scenario::none;
  const auto [d1, t1] = generate_scenario(cfg, 3);
  const auto [d2, t2] = generate_scenario(cfg, 3);
  REQUIRE((d1.y.array() == d2.y.array()).all());
  REQUIRE((t1.b_true.array() == t2.b_true.array()).all());
  REQUIRE((t1.c_bar.array() == t2.c_bar.array()).all());
  REQUIRE((t1.sigma2.array() == t2.sigma2.array()).all());

  const auto [d3, t3] = generate_scenario(cfg, 4);
  REQUIRE((d1.y.array() != d3.y.array()).any());
  simulation_config other = cfg;
  other.seed = 30;
  const auto [d4, t4] = generate_scenario(other, 3);
  REQUIRE((d1.y.array() != d4.y.array()).any());

  // Raising the sparsity keeps the existing nonzeros and their values.
  simulation_config dense = cfg;
  dense.beta_nonzero_prob = 0.6;
  const auto [d5, t5] = generate_scenario(dense, 3);
  for (int g = 0; g < cfg.p; ++g)
    if (t1.b_true(g, 0) != 0.0) REQUIRE(t5.b_true(g, 0) == t1.b_true(g, 0));
}

TEST_CASE("standardized truth satisfies its defining identities",
          "[simulate]") {
  simulation_config cfg;
  cfg.p = 2000;
  cfg.seed = 31;
  const auto [data, truth] = generate_scenario(cfg);
  const standardized_truth& s = truth.standardized;
  const int m = cfg.n - 1 - cfg.d;

  // Scores are white on the design complement of the intercept-free frame.
  const Eigen::MatrixXd q = orthonormal_complement(data.z);
  const Eigen::MatrixXd x_rot = q.transpose() * data.x;
  const Eigen::MatrixXd a = orthonormal_complement(x_rot);
  const Eigen::MatrixXd c2 = a.transpose() * s.c;
  REQUIRE((c2.transpose() * c2 / m - Eigen::MatrixXd::Identity(cfg.k, cfg.k))
              .cwiseAbs()
              .maxCoeff() < 1e-8);

  // Loading Gram is diagonal with the realized spikes, decreasing.
  const Eigen::MatrixXd gram =
      s.l.transpose() * s.l * (static_cast<double>(m) / cfg.p);
  for (int i = 0; i < cfg.k; ++i) {
    REQUIRE(gram(i, i) == Catch::Approx(s.lambda_realized[i]).epsilon(1e-8));
    for (int j = 0; j < i; ++j) REQUIRE(std::abs(gram(i, j)) < 1e-8);
    if (i > 0) REQUIRE(s.lambda_realized[i] <= s.lambda_realized[i - 1]);
    REQUIRE(s.lambda_realized[i] > 0);
  }

  // The latent contribution is invariant under the re-parameterization.
  const Eigen::MatrixXd raw = truth.l_bar * (q.transpose() * truth.c_bar).transpose();
  REQUIRE((s.l * s.c.transpose() - raw).cwiseAbs().maxCoeff() <
          1e-8 * raw.cwiseAbs().maxCoeff());

  // Rescaling the raw confounders leaves the standardized scores alone.
  const Eigen::MatrixXd c_rot = q.transpose() * truth.c_bar;
  const standardized_truth scaled =
      standardize_truth(truth.l_bar, 3.0 * c_rot, x_rot);
  REQUIRE((scaled.c - s.c).cwiseAbs().maxCoeff() < 1e-8);
  REQUIRE((scaled.l - 3.0 * s.l).cwiseAbs().maxCoeff() <
          1e-8 * s.l.cwiseAbs().maxCoeff());
  REQUIRE((scaled.omega_ols - s.omega_ols).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("standardization rejects degenerate inputs", "[simulate]") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(10, 1);
  REQUIRE_THROWS_WITH(
      standardize_truth(Eigen::MatrixXd::Random(20, 2),
                        Eigen::MatrixXd::Random(10, 3), x),
      Catch::Matchers::ContainsSubstring("agree on k"));
  REQUIRE_THROWS_WITH(
      standardize_truth(Eigen::MatrixXd::Random(20, 2),
                        Eigen::MatrixXd::Random(9, 2), x),
      Catch::Matchers::ContainsSubstring("sample count"));
  Eigen::MatrixXd dup(10, 2);
  dup.col(0) = Eigen::VectorXd::Random(10);
  dup.col(1) = dup.col(0);
  REQUIRE_THROWS_WITH(standardize_truth(Eigen::MatrixXd::Random(20, 2), dup, x),
                      Catch::Matchers::ContainsSubstring("singular"));
}

TEST_CASE("configuration validation covers every constraint", "[simulate]") {
  const auto expect_error = [](void (*tweak)(simulation_config&),
                               const std::string& text) {
    simulation_config cfg;
    cfg.p = 300;
    cfg.n = 20;
    cfg.k = 4;
    tweak(cfg);
    REQUIRE_THROWS_WITH(generate_scenario(cfg),
                        Catch::Matchers::ContainsSubstring(text));
  };
  expect_error([](simulation_config& c) { c.n = 21; }, "even");
  expect_error([](simulation_config& c) { c.d = 2; }, "d must be 1");
  expect_error([](simulation_config& c) { c.k = 0; }, "k must be >= 1");
  expect_error([](simulation_config& c) { c.p = 20; }, "p > n");
  expect_error([](simulation_config& c) { c.k = 18; }, "k + 3");
  expect_error([](simulation_config& c) { c.beta_nonzero_prob = 1.5; },
               "beta_nonzero_prob");
  expect_error([](simulation_config& c) { c.beta_sd = -1.0; }, "beta_sd");
  expect_error([](simulation_config& c) { c.loading_sd = 0.0; }, "loading_sd");
  expect_error([](simulation_config& c) { c.sigma2_var = 0.0; }, "sigma2");
  expect_error([](simulation_config& c) { c.mediated_frac = 1.0; },
               "mediated_frac");
  expect_error([](simulation_config& c) { c.noise_df = 2.0; }, "noise_df");
  expect_error([](simulation_config& c) { c.k = 5; }, "even k");
  expect_error(
      [](simulation_config& c) {
        c.scenario = omega_scenario::custom;
        c.omega_custom = {0.1, 0.2};
      },
      "entry per factor");
  expect_error([](simulation_config& c) { c.lambda_max_frac = 0.5; },
               "sparsity budget");

  REQUIRE(scenario_from_name("omega1") == omega_scenario::omega1);
  REQUIRE(scenario_from_name("null") == omega_scenario::none);
  REQUIRE(scenario_from_name("none") == omega_scenario::none);
  REQUIRE_THROWS_AS(scenario_from_name("bogus"), error);
  REQUIRE(std::string(scenario_name(omega_scenario::omega2)) == "omega2");
}
