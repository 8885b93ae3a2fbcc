#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confadj/design.hpp"
#include "confadj/dist.hpp"
#include "confadj/error.hpp"
#include "confadj/experiment.hpp"
#include "confadj/factor.hpp"
#include "confadj/fdr.hpp"
#include "confadj/numeric.hpp"
#include "confadj/omega.hpp"
#include "confadj/rng.hpp"
#include "confadj/simulate.hpp"

namespace confadj {

struct check_result {
  std::string criterion; // "criterion N", or "note" for context lines
  bool pass = false;
  bool informational = false; // does not affect the suite verdict
  std::string detail;
};

struct suite_result {
  std::string suite;
  std::vector<check_result> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.informational && !c.pass) return false;
    return true;
  }
};

namespace detail {

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.4g", x);
  return buf;
}

inline void add_check(suite_result& out, std::string criterion, bool pass,
                      std::string detail, bool informational = false) {
  out.checks.push_back(
      {std::move(criterion), pass, informational, std::move(detail)});
}

inline double median(std::vector<double> v) {
  require(!v.empty(), errc::invalid_argument, "median of empty vector");
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

inline double mean_of(const std::vector<double>& v) {
  return pairwise_sum(v) / static_cast<double>(v.size());
}

inline double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (const double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

} // namespace detail

// Shrinkage concentration of the naive design-factor regression: with equal
// spikes lambda=5 and noise floor rho=1 the naive estimate contracts toward
// lambda/(lambda+rho) = 5/6 of the realized standardized target.  Equal
// spikes leave the factor basis rotation-degenerate, so the gate compares
// Frobenius norms; the rotation-stable projection coefficient is reported
// alongside.
inline suite_result run_suite_prop1(std::uint64_t seed = 1) {
  suite_result out{"prop1", {}};
  simulation_config sim;
  sim.n = 100;
  sim.p = 5000;
  sim.k = 3;
  sim.lambda_max_frac = 0.05; // ladder top = n/20 = 5
  sim.lambda_min = 5.0;       // equal spikes at 5
  sim.beta_nonzero_prob = 0.0;
  sim.sigma2_mean = 1.0; // rho = 1
  sim.scenario = omega_scenario::custom;
  sim.omega_custom = {0.5, 0.5, 0.5};
  sim.seed = seed;
  const int reps = 200;
  const double target = 5.0 / 6.0;

  double sum_norm_ratio = 0.0;
  double sum_proj = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto [data, truth] = generate_scenario(sim, static_cast<std::uint64_t>(r));
    const partition part = rotate_and_partition(data);
    const factor_estimate fac = estimate_factors(part.y2, sim.k);
    const Eigen::MatrixXd naive = naive_omega(part.y1, fac.l_hat);
    const Eigen::MatrixXd& ols = truth.standardized.omega_ols;
    sum_norm_ratio += naive.norm() / ols.norm();
    const Eigen::MatrixXd aligned =
        naive * procrustes_rotation(fac.l_hat, truth.standardized.l);
    sum_proj += (aligned.array() * ols.array()).sum() / ols.squaredNorm();
  }
  const double mean_ratio = sum_norm_ratio / reps;
  const double mean_proj = sum_proj / reps;

  detail::add_check(
      out, "criterion 1",
      std::abs(mean_ratio - target) <= 0.05 * target,
      "naive/target coefficient norm ratio over " + std::to_string(reps) +
          " reps = " + detail::fmt(mean_ratio) +
          ", shrinkage prediction lambda/(lambda+rho) = " +
          detail::fmt(target) + ", tolerance +-5%");
  detail::add_check(out, "note", true,
                    "rotation-stable projection of naive onto target = " +
                        detail::fmt(mean_proj) + " (same 5/6 prediction)",
                    true);
  return out;
}

// Loading recovery is asymptotically oracle: sqrt(m)*(l_hat - l)/sigma_g,
// pooled over features and replicates after basis alignment, should be
// standard normal in every coordinate.
inline suite_result run_suite_lemma1(std::uint64_t seed = 1) {
  suite_result out{"lemma1", {}};
  simulation_config sim;
  sim.n = 100;
  sim.p = 5000;
  sim.k = 3;
  sim.beta_nonzero_prob = 0.0;
  sim.scenario = omega_scenario::none;
  sim.seed = seed;
  const int reps = 5;
  const int feats_per_rep = 200;

  std::vector<std::vector<double>> z(static_cast<std::size_t>(sim.k));
  for (auto& v : z) v.reserve(static_cast<std::size_t>(reps * feats_per_rep));

  for (int r = 0; r < reps; ++r) {
    const auto [data, truth] = generate_scenario(sim, static_cast<std::uint64_t>(r));
    const partition part = rotate_and_partition(data);
    const factor_estimate fac = estimate_factors(part.y2, sim.k);
    const Eigen::MatrixXd aligned =
        fac.l_hat * procrustes_rotation(fac.l_hat, truth.standardized.l);
    const double scale = std::sqrt(static_cast<double>(part.y2.cols()));
    for (int g = 0; g < feats_per_rep; ++g) {
      const double sg = std::sqrt(fac.sigma2_hat[g]);
      require(sg > 0, errc::degenerate_input,
              "lemma1 suite: zero residual variance estimate");
      for (int j = 0; j < sim.k; ++j)
        z[static_cast<std::size_t>(j)].push_back(
            scale * (aligned(g, j) - truth.standardized.l(g, j)) / sg);
    }
  }

  for (int j = 0; j < sim.k; ++j) {
    const auto& zj = z[static_cast<std::size_t>(j)];
    const double mean = detail::mean_of(zj);
    const double sd = detail::sd_of(zj);
    const double ks = ks_distance(zj, [](double x) { return normal_cdf(x); });
    const bool pass =
        std::abs(mean) <= 0.05 && sd >= 0.9 && sd <= 1.1 && ks <= 0.05;
    detail::add_check(
        out, "criterion 2", pass,
        "coordinate " + std::to_string(j + 1) + " over " +
            std::to_string(zj.size()) + " pooled draws: mean = " +
            detail::fmt(mean) + " (|.| <= 0.05), sd = " + detail::fmt(sd) +
            " (in [0.9, 1.1]), KS vs N(0,1) = " + detail::fmt(ks) +
            " (<= 0.05)");
  }
  return out;
}

// Noise-floor recovery at full defaults: median |rho_hat - 1| over 50 reps.
inline suite_result run_suite_rho(std::uint64_t seed = 1) {
  suite_result out{"rho", {}};
  simulation_config sim;
  sim.seed = seed;
  const int reps = 50;
  std::vector<double> abs_err;
  abs_err.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const auto [data, truth] = generate_scenario(sim, static_cast<std::uint64_t>(r));
    const partition part = rotate_and_partition(data);
    const factor_estimate fac = estimate_factors(part.y2, sim.k);
    abs_err.push_back(std::abs(fac.rho_hat - sim.sigma2_mean));
  }
  const double med = detail::median(abs_err);
  detail::add_check(out, "criterion 3", med <= 0.01,
                    "median |rho_hat - rho| over " + std::to_string(reps) +
                        " reps = " + detail::fmt(med) +
                        " (bound 0.1/sqrt(n) = 0.01)");
  return out;
}

// 95% CI coverage of the bias-corrected effects, pooled over all features of
// 5 replicates (1e5 intervals) per confounding scenario.
inline suite_result run_suite_coverage(std::uint64_t seed = 1) {
  suite_result out{"coverage", {}};
  for (const auto scenario : {omega_scenario::omega1, omega_scenario::omega2}) {
    experiment_config cfg;
    cfg.sim.scenario = scenario;
    cfg.sim.seed = scenario == omega_scenario::omega1 ? seed : seed + 1;
    cfg.reps = 5;
    cfg.methods = {effect_method::adjusted_bias_corrected};
    cfg.nominal_levels = {0.1};
    cfg.ci_level = 0.95;
    const experiment_report rep = run_experiment(cfg);
    const double cov =
        rep.mean_metrics.at(effect_method::adjusted_bias_corrected)
            .coverage_all;
    detail::add_check(
        out, "criterion 4", cov >= 0.935 && cov <= 0.965,
        std::string(scenario_name(scenario)) + ": bias-corrected 95% CI " +
            "coverage over " + std::to_string(cfg.reps) + " reps x " +
            std::to_string(cfg.sim.p) + " features = " + detail::fmt(cov) +
            " (band [0.935, 0.965])");
  }
  return out;
}

// Comparative FDP study at nominal q = 0.1 (Storey), 20 replicates per
// scenario: the bias-corrected and oracle methods stay near nominal while
// the uncorrected comparator inflates; also the oracle-equivalence RMSE
// bound.
inline suite_result run_suite_fig1(std::uint64_t seed = 1, int k_fit = 0) {
  suite_result out{k_fit > 0 ? "koverspec" : "fig1", {}};
  const char* crit_fdp = k_fit > 0 ? "criterion 7" : "criterion 5";
  for (const auto scenario : {omega_scenario::omega1, omega_scenario::omega2}) {
    experiment_config cfg;
    cfg.sim.scenario = scenario;
    cfg.sim.seed = scenario == omega_scenario::omega1 ? seed : seed + 1;
    cfg.reps = 20;
    cfg.k_fit = k_fit;
    cfg.methods = {effect_method::unadjusted,
                   effect_method::adjusted_uncorrected,
                   effect_method::adjusted_bias_corrected,
                   effect_method::oracle};
    cfg.nominal_levels = {0.05, 0.1, 0.2};
    cfg.fdr = fdr_method::storey;
    const experiment_report rep = run_experiment(cfg);
    const std::size_t at10 = 1; // nominal_levels[1] == 0.1
    const std::string sc = scenario_name(scenario);

    const double fdp_bc =
        rep.mean_metrics.at(effect_method::adjusted_bias_corrected).fdp[at10];
    const double fdp_orc = rep.mean_metrics.at(effect_method::oracle).fdp[at10];
    const double fdp_unc =
        rep.mean_metrics.at(effect_method::adjusted_uncorrected).fdp[at10];
    const double fdp_raw =
        rep.mean_metrics.at(effect_method::unadjusted).fdp[at10];

    detail::add_check(out, crit_fdp, fdp_bc <= 0.15,
                      sc + ": bias-corrected mean FDP at q=0.1 = " +
                          detail::fmt(fdp_bc) + " (bound <= 0.15)");
    if (k_fit == 0) {
      detail::add_check(out, "criterion 5", fdp_orc <= 0.15,
                        sc + ": oracle mean FDP at q=0.1 = " +
                            detail::fmt(fdp_orc) + " (bound <= 0.15)");
      if (scenario == omega_scenario::omega2) {
        detail::add_check(out, "criterion 5", fdp_unc >= 0.20,
                          sc + ": uncorrected mean FDP at q=0.1 = " +
                              detail::fmt(fdp_unc) + " (required >= 0.20)");
      } else {
        const double floor = std::max(0.10, 1.5 * fdp_bc);
        detail::add_check(out, "criterion 5", fdp_unc >= floor,
                          sc + ": uncorrected mean FDP at q=0.1 = " +
                              detail::fmt(fdp_unc) + " (required >= " +
                              detail::fmt(floor) +
                              " = max(0.10, 1.5 x bias-corrected))");
      }

      const double rmse_bc =
          rep.mean_metrics.at(effect_method::adjusted_bias_corrected).rmse;
      const double rmse_orc = rep.mean_metrics.at(effect_method::oracle).rmse;
      detail::add_check(out, "criterion 8", rmse_bc <= 1.25 * rmse_orc,
                        sc + ": RMSE bias-corrected = " +
                            detail::fmt(rmse_bc) + " vs 1.25 x oracle = " +
                            detail::fmt(1.25 * rmse_orc));
      detail::add_check(out, "note", true,
                        sc + ": no-adjustment mean FDP at q=0.1 = " +
                            detail::fmt(fdp_raw) +
                            ", mean confounding-test p = " +
                            detail::fmt(rep.mean_confounding_p),
                        true);
    } else {
      detail::add_check(
          out, "note", true,
          sc + ": k_fit = " + std::to_string(k_fit) + " vs true k = " +
              std::to_string(cfg.sim.k) + "; uncorrected mean FDP = " +
              detail::fmt(fdp_unc) + ", oracle RMSE ratio = " +
              detail::fmt(rep.mean_metrics
                              .at(effect_method::adjusted_bias_corrected)
                              .rmse /
                          rep.mean_metrics.at(effect_method::oracle).rmse),
          true);
    }
  }
  return out;
}

inline suite_result run_suite_koverspec(std::uint64_t seed = 1) {
  return run_suite_fig1(seed, 12);
}

// Null calibration of the confounding statistic over 1000 replicates.  The
// gates reference the chi-square(k) limit; the exact finite-sample law at
// n=100 is the scaled-F (Hotelling) distribution, reported alongside.
inline suite_result run_suite_chi2null(std::uint64_t seed = 1) {
  suite_result out{"chi2null", {}};
  simulation_config sim;
  sim.scenario = omega_scenario::none;
  sim.seed = seed;
  const int reps = 1000;
  const double k = static_cast<double>(sim.k);

  std::vector<double> stats;
  stats.reserve(reps);
  double m_samples = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto [data, truth] = generate_scenario(sim, static_cast<std::uint64_t>(r));
    const partition part = rotate_and_partition(data);
    const factor_estimate fac = estimate_factors(part.y2, sim.k);
    const omega_estimate om = bias_corrected_omega(
        naive_omega(part.y1, fac.l_hat), fac.lambda_hat, fac.rho_hat);
    const confounding_test conf = test_confounding(om, part.xtx);
    stats.push_back(conf.per_covariate_chi2[0]);
    m_samples = static_cast<double>(part.y2.cols());
  }

  const double chi2_crit = chi2_quantile(0.95, k);
  int rej_chi2 = 0;
  for (const double s : stats) rej_chi2 += s > chi2_crit ? 1 : 0;
  const double rej_rate = static_cast<double>(rej_chi2) / reps;
  const double ks_chi2 =
      ks_distance(stats, [k](double x) { return chi2_cdf(x, k); });

  detail::add_check(out, "criterion 6",
                    rej_rate >= 0.03 && rej_rate <= 0.07,
                    "chi-square(" + detail::fmt(k) +
                        ") rejection rate at alpha=0.05 over 1000 reps = " +
                        detail::fmt(rej_rate) + " (band [0.03, 0.07])");
  detail::add_check(out, "criterion 6", ks_chi2 <= 0.05,
                    "KS distance of statistics to chi-square(" +
                        detail::fmt(k) + ") = " + detail::fmt(ks_chi2) +
                        " (bound <= 0.05)");

  // Exact finite-sample reference: with m spare dimensions the statistic is
  // Hotelling's T-squared, i.e. m*k/(m-k+1) times an F(k, m-k+1) variable,
  // which approaches chi-square(k) only as m grows.
  const double m = m_samples;
  const double f_scale = m * k / (m - k + 1.0);
  const double f_crit = f_scale * f_quantile(0.95, k, m - k + 1.0);
  int rej_f = 0;
  for (const double s : stats) rej_f += s > f_crit ? 1 : 0;
  const double rej_rate_f = static_cast<double>(rej_f) / reps;
  const double ks_f = ks_distance(stats, [&](double x) {
    return f_cdf(x / f_scale, k, m - k + 1.0);
  });
  const double mean_stat = detail::mean_of(stats);
  const double mean_exact = m * k / (m - k - 1.0);

  detail::add_check(
      out, "note", rej_rate_f >= 0.03 && rej_rate_f <= 0.07,
      "scaled-F reference (m=" + detail::fmt(m) +
          "): rejection rate = " + detail::fmt(rej_rate_f) +
          ", KS = " + detail::fmt(ks_f) + (ks_f <= 0.05 ? " (both in band)"
                                                        : " (KS out of band)"),
      true);
  detail::add_check(
      out, "note", true,
      "mean statistic = " + detail::fmt(mean_stat) + "; scaled-F mean = " +
          detail::fmt(mean_exact) + ", chi-square mean = " + detail::fmt(k) +
          "; the statistic matches its finite-sample law, which is visibly "
          "heavier-tailed than the chi-square limit at n=100",
      true);

  // Sample-size trend: the chi-square reference becomes accurate as the
  // spare dimension count grows, so the rejection rate should fall toward
  // 0.05 with n.
  {
    std::string trend;
    for (const int n_trend : {100, 240, 480}) {
      simulation_config tsim = sim;
      tsim.n = n_trend;
      tsim.p = 4000;
      const int treps = 250;
      const double tk = static_cast<double>(tsim.k);
      int rej = 0;
      for (int r = 0; r < treps; ++r) {
        const auto [data, truth] =
            generate_scenario(tsim, static_cast<std::uint64_t>(r));
        const partition part = rotate_and_partition(data);
        const factor_estimate fac = estimate_factors(part.y2, tsim.k);
        const omega_estimate om = bias_corrected_omega(
            naive_omega(part.y1, fac.l_hat), fac.lambda_hat, fac.rho_hat);
        const confounding_test conf = test_confounding(om, part.xtx);
        rej += conf.per_covariate_chi2[0] > chi2_quantile(0.95, tk) ? 1 : 0;
      }
      if (!trend.empty()) trend += ", ";
      trend += "n=" + std::to_string(n_trend) + ": " +
               detail::fmt(static_cast<double>(rej) / treps);
    }
    detail::add_check(out, "note", true,
                      "chi-square rejection trend over 250 reps at p=4000 (" +
                          trend + "); target 0.05 is approached from above",
                      true);
  }
  return out;
}

// Exhaustible oracles: step-up FDR against brute force, Gram-route factor
// extraction against a direct SVD, and partition geometry invariants.
inline suite_result run_suite_oracles(std::uint64_t seed = 1) {
  suite_result out{"oracles", {}};

  // Step-up q-values vs literal minimization over suffixes, exact equality.
  {
    rng::stream st(seed, 900);
    int failures = 0;
    const int cases = 1000;
    for (int c = 0; c < cases; ++c) {
      const std::uint64_t base = static_cast<std::uint64_t>(c) * 32;
      const int m = 1 + static_cast<int>(st.uniform(base) * 12.0);
      Eigen::VectorXd p(m);
      for (int i = 0; i < m; ++i) {
        double u = st.uniform(base + 1 + static_cast<std::uint64_t>(i));
        if (st.uniform(base + 16 + static_cast<std::uint64_t>(i)) < 0.3)
          u = std::round(u * 10.0) / 10.0; // force ties and 0/1 endpoints
        p[i] = u;
      }
      const fdr_result fast = bh_adjust(p);

      std::vector<int> order(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return p[a] < p[b]; });
      Eigen::VectorXd brute(m);
      for (int i = 0; i < m; ++i) {
        double q = 1.0;
        for (int j = i; j < m; ++j)
          q = std::min(q, static_cast<double>(m) *
                              p[order[static_cast<std::size_t>(j)]] /
                              static_cast<double>(j + 1));
        brute[order[static_cast<std::size_t>(i)]] = q;
      }
      if ((fast.q_values.array() != brute.array()).any()) ++failures;
    }
    detail::add_check(out, "criterion 9", failures == 0,
                      "step-up q-values equal brute-force suffix minimum on " +
                          std::to_string(cases) +
                          " random inputs (m <= 12), mismatches = " +
                          std::to_string(failures));
  }

  // Gram-route factor extraction vs direct SVD on tall-thin instances.
  {
    rng::stream st(seed, 901);
    double worst = 0.0;
    const int cases = 200;
    const int k = 3;
    for (int c = 0; c < cases; ++c) {
      const int p = 30 + c % 21;
      const int m = 12 + c % 9;
      const std::uint64_t base =
          static_cast<std::uint64_t>(c) * 8192;
      Eigen::MatrixXd y2(p, m);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < m; ++j)
          y2(i, j) = st.normal(
              2 * (base + static_cast<std::uint64_t>(i * m + j)));
      // Planted spikes with well-separated strengths keep the comparison
      // away from eigenvector rotation ambiguity.
      const double strength[] = {40.0, 25.0, 15.0};
      for (int j = 0; j < k; ++j) {
        Eigen::VectorXd u(p), v(m);
        const std::uint64_t ub = base + 4096 + static_cast<std::uint64_t>(j) * 512;
        for (int i = 0; i < p; ++i)
          u[i] = st.normal(2 * (ub + static_cast<std::uint64_t>(i)));
        for (int i = 0; i < m; ++i)
          v[i] = st.normal(2 * (ub + 256 + static_cast<std::uint64_t>(i)));
        y2 += (strength[j] / (u.norm() * v.norm())) * u * v.transpose();
      }

      const factor_estimate fac = estimate_factors(y2, k);

      Eigen::JacobiSVD<Eigen::MatrixXd> svd(
          y2, Eigen::ComputeThinU | Eigen::ComputeThinV);
      for (int j = 0; j < k; ++j) {
        const double sv = svd.singularValues()[j];
        const double lambda_direct =
            sv * sv / static_cast<double>(p);
        Eigen::VectorXd l_direct =
            svd.matrixU().col(j) * (sv / std::sqrt(static_cast<double>(m)));
        Eigen::Index at = 0;
        l_direct.cwiseAbs().maxCoeff(&at);
        if (l_direct[at] < 0) l_direct = -l_direct;
        worst = std::max(worst, std::abs(fac.lambda_hat[j] - lambda_direct) /
                                    std::max(1.0, lambda_direct));
        worst = std::max(worst, (fac.l_hat.col(j) - l_direct).norm() /
                                    l_direct.norm());
      }
    }
    detail::add_check(out, "criterion 9", worst <= 1e-8,
                      "Gram-route factors vs direct SVD on " +
                          std::to_string(cases) +
                          " instances (p <= 50): worst relative deviation = " +
                          detail::fmt(worst) + " (bound 1e-8)");
  }

  // Partition geometry: orthonormal spare basis, annihilated design,
  // exact reconstruction of the rotated data.
  {
    rng::stream st(seed, 902);
    double worst = 0.0;
    const int cases = 1000;
    for (int c = 0; c < cases; ++c) {
      const int n = 8 + c % 9;
      const int d = 1 + c % 2;
      const int r = (c / 2) % 2;
      const int p = n + 1 + c % 10;
      const std::uint64_t base = static_cast<std::uint64_t>(c) * 2048;
      observed_data data;
      data.y.resize(p, n);
      data.x.resize(n, d);
      data.z.resize(n, r);
      std::uint64_t slot = base;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < n; ++j) data.y(i, j) = st.normal(2 * slot++);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) data.x(i, j) = st.normal(2 * slot++);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j) data.z(i, j) = st.normal(2 * slot++);

      const partition part = rotate_and_partition(data);
      const Eigen::MatrixXd y_rot =
          r > 0 ? Eigen::MatrixXd(data.y * orthonormal_complement(data.z))
                : data.y;

      const Eigen::Index mm = part.a_basis.cols();
      worst = std::max(
          worst, (part.a_basis.transpose() * part.a_basis -
                  Eigen::MatrixXd::Identity(mm, mm))
                     .cwiseAbs()
                     .maxCoeff());
      worst = std::max(worst, (part.a_basis.transpose() * part.x)
                                      .cwiseAbs()
                                      .maxCoeff() /
                                  part.x.norm());
      const Eigen::MatrixXd recon = part.y1 * part.x.transpose() +
                                    part.y2 * part.a_basis.transpose();
      worst = std::max(worst, (recon - y_rot).norm() / y_rot.norm());
    }
    detail::add_check(out, "criterion 9", worst <= 1e-10,
                      "partition invariants (orthonormality, annihilation, "
                      "reconstruction) on " +
                          std::to_string(cases) +
                          " random instances: worst deviation = " +
                          detail::fmt(worst) + " (bound 1e-10)");
  }
  return out;
}

inline std::vector<std::string> validation_suite_names() {
  return {"prop1",    "lemma1",   "rho",     "coverage",
          "fig1",     "chi2null", "koverspec", "oracles"};
}

inline suite_result run_validation_suite(const std::string& name,
                                         std::uint64_t seed = 1) {
  if (name == "prop1") return run_suite_prop1(seed);
  if (name == "lemma1") return run_suite_lemma1(seed);
  if (name == "rho") return run_suite_rho(seed);
  if (name == "coverage") return run_suite_coverage(seed);
  if (name == "fig1") return run_suite_fig1(seed);
  if (name == "chi2null") return run_suite_chi2null(seed);
  if (name == "koverspec") return run_suite_koverspec(seed);
  if (name == "oracles") return run_suite_oracles(seed);
  throw error(errc::invalid_argument, "unknown validation suite '" + name +
                                          "' (known: prop1, lemma1, rho, "
                                          "coverage, fig1, chi2null, "
                                          "koverspec, oracles, all)");
}

inline void print_suite(const suite_result& s, std::ostream& os) {
  for (const auto& c : s.checks) {
    const char* verdict = c.informational ? "INFO" : (c.pass ? "PASS" : "FAIL");
    os << "[" << s.suite << "/" << c.criterion << "] " << verdict << " "
       << c.detail << "\n";
  }
  os << "[" << s.suite << "] suite " << (s.passed() ? "PASS" : "FAIL") << "\n";
}

} // namespace confadj
