#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "confadj/design.hpp"
#include "confadj/dist.hpp"
#include "confadj/effects.hpp"
#include "confadj/error.hpp"
#include "confadj/factor.hpp"
#include "confadj/fdr.hpp"
#include "confadj/omega.hpp"
#include "confadj/parallel.hpp"
#include "confadj/simulate.hpp"

namespace confadj {

// Rotation part of the orthogonal Procrustes solution aligning the columns
// of a onto b: argmin_R |a R - b|_F over semi-orthogonal R.  Used only to
// compare estimates against truth; never part of the estimators.
inline Eigen::MatrixXd procrustes_rotation(const Eigen::MatrixXd& a,
                                           const Eigen::MatrixXd& b) {
  require(a.rows() == b.rows(), errc::dimension_mismatch,
          "procrustes_rotation: row counts differ");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      a.transpose() * b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().transpose();
}

struct experiment_config {
  simulation_config sim;
  int reps = 20;
  int k_fit = 0; // 0: use sim.k
  std::vector<effect_method> methods = {
      effect_method::adjusted_bias_corrected,
      effect_method::adjusted_uncorrected, effect_method::unadjusted,
      effect_method::oracle};
  std::vector<double> nominal_levels = {0.05, 0.1, 0.2};
  fdr_method fdr = fdr_method::storey;
  double storey_lambda = 0.5;
  double clamp_eps = 0.05;
  double ci_level = 0.95;
  int threads = 1;
};

// Per-method summaries of one replicate.
struct method_metrics {
  std::vector<double> fdp;           // per nominal level
  std::vector<int> n_discoveries;    // per nominal level
  double coverage_all = 0.0;
  double coverage_null = 0.0;
  double coverage_nonnull = 0.0;
  double rmse = 0.0;
  double t_sd_null = 0.0; // sd of t statistics over true-null features
};

struct rep_result {
  bool failed = false;
  std::string error_message;
  Eigen::VectorXd lambda_hat;
  double rho_hat = 0.0;
  int n_clamped = 0;
  double confounding_stat = 0.0;
  double confounding_p = 1.0;
  double omega_err_naive = 0.0; // aligned Frobenius distance to truth
  double omega_err_bc = 0.0;
  std::map<effect_method, method_metrics> metrics;
};

struct experiment_report {
  experiment_config config;
  std::vector<rep_result> reps;
  int n_failed = 0;
  std::map<effect_method, method_metrics> mean_metrics;
  double mean_rho_hat = 0.0;
  double mean_confounding_p = 1.0;
  double mean_omega_err_naive = 0.0;
  double mean_omega_err_bc = 0.0;
};

namespace detail {

inline method_metrics summarize_table(const effect_table& table,
                                      const Eigen::MatrixXd& b_true,
                                      const experiment_config& cfg) {
  const Eigen::Index p = table.beta_hat.rows();
  method_metrics out;

  std::vector<Eigen::Index> truth_nonzero;
  for (Eigen::Index g = 0; g < p; ++g)
    if (b_true(g, 0) != 0.0) truth_nonzero.push_back(g);

  const fdr_result fdr =
      adjust_p_values(table.p_value.col(0), cfg.fdr, cfg.storey_lambda);
  for (const double level : cfg.nominal_levels) {
    std::vector<Eigen::Index> discoveries;
    for (Eigen::Index g = 0; g < p; ++g)
      if (fdr.q_values[g] <= level) discoveries.push_back(g);
    out.fdp.push_back(false_discovery_proportion(discoveries, truth_nonzero));
    out.n_discoveries.push_back(static_cast<int>(discoveries.size()));
  }

  const double tcrit =
      t_quantile(1.0 - (1.0 - cfg.ci_level) / 2.0,
                 static_cast<double>(table.dof));
  Eigen::Index covered_all = 0, covered_null = 0, covered_nonnull = 0;
  Eigen::Index n_null = 0;
  double sq_err = 0.0;
  double t_sum = 0.0, t_sumsq = 0.0;
  Eigen::Index t_count = 0;
  for (Eigen::Index g = 0; g < p; ++g) {
    const double err = table.beta_hat(g, 0) - b_true(g, 0);
    sq_err += err * err;
    const bool cover = std::abs(err) <= tcrit * table.se(g, 0);
    const bool is_null = b_true(g, 0) == 0.0;
    covered_all += cover;
    if (is_null) {
      ++n_null;
      covered_null += cover;
      const double t = table.t_stat(g, 0);
      if (std::isfinite(t)) {
        t_sum += t;
        t_sumsq += t * t;
        ++t_count;
      }
    } else {
      covered_nonnull += cover;
    }
  }
  out.coverage_all = static_cast<double>(covered_all) / static_cast<double>(p);
  out.coverage_null =
      n_null > 0 ? static_cast<double>(covered_null) / static_cast<double>(n_null)
                 : 1.0;
  out.coverage_nonnull =
      p - n_null > 0 ? static_cast<double>(covered_nonnull) /
                           static_cast<double>(p - n_null)
                     : 1.0;
  out.rmse = std::sqrt(sq_err / static_cast<double>(p));
  if (t_count > 1) {
    const double mean = t_sum / static_cast<double>(t_count);
    out.t_sd_null = std::sqrt((t_sumsq - static_cast<double>(t_count) * mean *
                                             mean) /
                              static_cast<double>(t_count - 1));
  }
  return out;
}

} // namespace detail

// Full pipeline on one generated replicate; also returns the effect tables
// when keep_tables is non-null (keyed by method) for per-rep serialization.
inline rep_result run_replicate(
    const experiment_config& cfg, std::uint64_t rep,
    std::map<effect_method, effect_table>* keep_tables = nullptr,
    Eigen::MatrixXd* keep_b_true = nullptr,
    std::vector<std::string>* keep_feature_ids = nullptr) {
  rep_result out;
  auto [data, truth] = generate_scenario(cfg.sim, rep);
  const partition part = rotate_and_partition(data);
  const Eigen::Index k_fit = cfg.k_fit > 0 ? cfg.k_fit : cfg.sim.k;
  const factor_estimate fac = estimate_factors(part.y2, k_fit);
  const omega_estimate om =
      bias_corrected_omega(naive_omega(part.y1, fac.l_hat), fac.lambda_hat,
                           fac.rho_hat, cfg.clamp_eps);
  const confounding_test conf = test_confounding(om, part.xtx);

  out.lambda_hat = fac.lambda_hat;
  out.rho_hat = fac.rho_hat;
  for (const auto c : om.clamped) out.n_clamped += c != 0;
  out.confounding_stat = conf.per_covariate_chi2[0];
  out.confounding_p = conf.p_values[0];

  const Eigen::MatrixXd align =
      procrustes_rotation(fac.l_hat, truth.standardized.l);
  out.omega_err_naive =
      (om.omega_naive * align - truth.standardized.omega_ols).norm();
  out.omega_err_bc =
      (om.omega_bc * align - truth.standardized.omega_ols).norm();

  for (const effect_method method : cfg.methods) {
    effect_table table;
    switch (method) {
      case effect_method::adjusted_bias_corrected:
        table = effects_bias_corrected(part, fac, om);
        break;
      case effect_method::adjusted_uncorrected:
        table = effects_adjusted_uncorrected(part, fac, om);
        break;
      case effect_method::unadjusted:
        table = effects_unadjusted(part);
        break;
      case effect_method::oracle:
        table = effects_oracle(data, truth.c_bar);
        break;
    }
    out.metrics[method] = detail::summarize_table(table, truth.b_true, cfg);
    if (keep_tables) (*keep_tables)[method] = std::move(table);
  }
  if (keep_b_true) *keep_b_true = truth.b_true;
  if (keep_feature_ids) *keep_feature_ids = data.feature_ids;
  return out;
}

// Receives each successful replicate's effect tables right after it runs;
// replicates never share a rep index, so sinks may write per-rep files
// without locking.
using replicate_sink = std::function<void(
    int rep, const std::map<effect_method, effect_table>& tables,
    const Eigen::MatrixXd& b_true,
    const std::vector<std::string>& feature_ids)>;

// Runs cfg.reps replicates (parallel across threads, deterministic output)
// and aggregates per-method means over the successful ones.  Errors in a
// replicate are recorded; more than 20% failures aborts.
inline experiment_report run_experiment(const experiment_config& cfg,
                                        const replicate_sink& sink = {}) {
  require(cfg.reps >= 1, errc::invalid_argument,
          "run_experiment: reps must be >= 1");
  validate_config(cfg.sim);
  experiment_report report;
  report.config = cfg;
  report.reps.resize(static_cast<std::size_t>(cfg.reps));

  parallel_for(static_cast<std::size_t>(cfg.reps), cfg.threads,
               [&](std::size_t r) {
                 try {
                   if (sink) {
                     std::map<effect_method, effect_table> tables;
                     Eigen::MatrixXd b_true;
                     std::vector<std::string> feature_ids;
                     report.reps[r] =
                         run_replicate(cfg, static_cast<std::uint64_t>(r),
                                       &tables, &b_true, &feature_ids);
                     sink(static_cast<int>(r), tables, b_true, feature_ids);
                   } else {
                     report.reps[r] =
                         run_replicate(cfg, static_cast<std::uint64_t>(r));
                   }
                 } catch (const std::exception& e) {
                   report.reps[r].failed = true;
                   report.reps[r].error_message = e.what();
                 }
               });

  std::string failed_list;
  for (std::size_t r = 0; r < report.reps.size(); ++r)
    if (report.reps[r].failed) {
      ++report.n_failed;
      if (!failed_list.empty()) failed_list += ", ";
      failed_list += std::to_string(r);
    }
  require(5 * report.n_failed <= cfg.reps, errc::degenerate_input,
          "run_experiment: more than 20% of replicates failed (reps " +
              failed_list + "); first error: " +
              [&]() -> std::string {
                for (const auto& r : report.reps)
                  if (r.failed) return r.error_message;
                return "";
              }());

  const int ok = cfg.reps - report.n_failed;
  if (ok == 0) return report;
  const double inv = 1.0 / static_cast<double>(ok);
  for (const effect_method method : cfg.methods) {
    method_metrics mean;
    mean.fdp.assign(cfg.nominal_levels.size(), 0.0);
    mean.n_discoveries.assign(cfg.nominal_levels.size(), 0);
    for (const auto& rep : report.reps) {
      if (rep.failed) continue;
      const auto& m = rep.metrics.at(method);
      for (std::size_t l = 0; l < mean.fdp.size(); ++l) {
        mean.fdp[l] += m.fdp[l] * inv;
        mean.n_discoveries[l] += m.n_discoveries[l];
      }
      mean.coverage_all += m.coverage_all * inv;
      mean.coverage_null += m.coverage_null * inv;
      mean.coverage_nonnull += m.coverage_nonnull * inv;
      mean.rmse += m.rmse * inv;
      mean.t_sd_null += m.t_sd_null * inv;
    }
    for (auto& nd : mean.n_discoveries)
      nd = static_cast<int>(std::lround(static_cast<double>(nd) * inv));
    report.mean_metrics[method] = std::move(mean);
  }
  report.mean_rho_hat = 0.0;
  report.mean_confounding_p = 0.0;
  report.mean_omega_err_naive = 0.0;
  report.mean_omega_err_bc = 0.0;
  for (const auto& rep : report.reps) {
    if (rep.failed) continue;
    report.mean_rho_hat += rep.rho_hat * inv;
    report.mean_confounding_p += rep.confounding_p * inv;
    report.mean_omega_err_naive += rep.omega_err_naive * inv;
    report.mean_omega_err_bc += rep.omega_err_bc * inv;
  }
  return report;
}

} // namespace confadj
