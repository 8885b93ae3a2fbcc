#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "confadj/error.hpp"
#include "confadj/experiment.hpp"
#include "confadj/pipeline.hpp"
#include "confadj/table.hpp"
#include "confadj/version.hpp"

namespace confadj {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ordered_json json_vector(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline ordered_json json_matrix(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

// JSON has no literal for infinity; noise_df = inf round-trips as "inf".
inline ordered_json json_maybe_inf(double x) {
  if (std::isinf(x)) return ordered_json("inf");
  return ordered_json(x);
}

inline ordered_json json_method_list(const std::vector<effect_method>& ms) {
  ordered_json a = ordered_json::array();
  for (const auto m : ms) a.push_back(method_name(m));
  return a;
}

inline ordered_json json_metrics(const method_metrics& mm,
                                 const std::vector<double>& levels) {
  ordered_json j;
  ordered_json fdp = ordered_json::array();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    fdp.push_back(
        ordered_json{{"nominal", levels[i]},
                     {"fdp", mm.fdp[i]},
                     {"n_discoveries", mm.n_discoveries[i]}});
  }
  j["fdp_by_level"] = std::move(fdp);
  j["coverage_all"] = mm.coverage_all;
  j["coverage_null"] = mm.coverage_null;
  j["coverage_nonnull"] = mm.coverage_nonnull;
  j["rmse"] = mm.rmse;
  j["t_sd_null"] = mm.t_sd_null;
  return j;
}

} // namespace detail

inline ordered_json json_simulation_config(const simulation_config& sim) {
  ordered_json j;
  j["n"] = sim.n;
  j["p"] = sim.p;
  j["k"] = sim.k;
  j["d"] = sim.d;
  j["lambda_max_frac"] = sim.lambda_max_frac;
  j["lambda_min"] = sim.lambda_min;
  j["beta_nonzero_prob"] = sim.beta_nonzero_prob;
  j["beta_sd"] = sim.beta_sd;
  j["loading_sd"] = sim.loading_sd;
  j["sigma2_mean"] = sim.sigma2_mean;
  j["sigma2_var"] = sim.sigma2_var;
  j["noise_df"] = detail::json_maybe_inf(sim.noise_df);
  j["mediated_frac"] = sim.mediated_frac;
  j["omega_scenario"] = scenario_name(sim.scenario);
  if (sim.scenario == omega_scenario::custom) {
    ordered_json oc = ordered_json::array();
    for (const double w : sim.omega_custom) oc.push_back(w);
    j["omega_custom"] = std::move(oc);
  }
  j["seed"] = sim.seed;
  return j;
}

inline ordered_json json_experiment_config(const experiment_config& cfg) {
  ordered_json j;
  j["simulation"] = json_simulation_config(cfg.sim);
  j["reps"] = cfg.reps;
  j["k_fit"] = cfg.k_fit > 0 ? cfg.k_fit : cfg.sim.k;
  j["methods"] = detail::json_method_list(cfg.methods);
  ordered_json levels = ordered_json::array();
  for (const double l : cfg.nominal_levels) levels.push_back(l);
  j["nominal_levels"] = std::move(levels);
  j["fdr_method"] = fdr_method_name(cfg.fdr);
  j["storey_lambda"] = cfg.storey_lambda;
  j["clamp_eps"] = cfg.clamp_eps;
  j["ci_level"] = cfg.ci_level;
  j["threads"] = cfg.threads;
  return j;
}

inline ordered_json json_experiment_report(const experiment_report& rep) {
  ordered_json j;
  j["schema_version"] = schema_version;
  j["tool_version"] = version_string;
  j["config"] = json_experiment_config(rep.config);
  j["n_reps"] = static_cast<int>(rep.reps.size());
  j["n_failed"] = rep.n_failed;

  ordered_json agg;
  agg["rho_hat"] = rep.mean_rho_hat;
  agg["confounding_p"] = rep.mean_confounding_p;
  agg["omega_err_naive"] = rep.mean_omega_err_naive;
  agg["omega_err_bc"] = rep.mean_omega_err_bc;
  ordered_json agg_methods;
  for (const auto& [method, mm] : rep.mean_metrics)
    agg_methods[method_name(method)] =
        detail::json_metrics(mm, rep.config.nominal_levels);
  agg["methods"] = std::move(agg_methods);
  j["aggregate"] = std::move(agg);

  ordered_json reps = ordered_json::array();
  for (std::size_t r = 0; r < rep.reps.size(); ++r) {
    const rep_result& rr = rep.reps[r];
    ordered_json jr;
    jr["rep"] = static_cast<int>(r);
    jr["failed"] = rr.failed;
    if (rr.failed) {
      jr["error"] = rr.error_message;
    } else {
      jr["lambda_hat"] = detail::json_vector(rr.lambda_hat);
      jr["rho_hat"] = rr.rho_hat;
      jr["n_clamped"] = rr.n_clamped;
      jr["confounding_stat"] = rr.confounding_stat;
      jr["confounding_p"] = rr.confounding_p;
      jr["omega_err_naive"] = rr.omega_err_naive;
      jr["omega_err_bc"] = rr.omega_err_bc;
      ordered_json jm;
      for (const auto& [method, mm] : rr.metrics)
        jm[method_name(method)] =
            detail::json_metrics(mm, rep.config.nominal_levels);
      jr["methods"] = std::move(jm);
    }
    reps.push_back(std::move(jr));
  }
  j["replicates"] = std::move(reps);
  return j;
}

inline ordered_json json_adjust_summary(const adjust_result& res,
                                        const adjust_options& opt) {
  ordered_json j;
  j["schema_version"] = schema_version;
  j["tool_version"] = version_string;
  j["command"] = "adjust";

  ordered_json dims;
  dims["p"] = static_cast<std::int64_t>(res.p);
  dims["n_input"] = static_cast<std::int64_t>(res.n_input);
  dims["n_eff"] = static_cast<std::int64_t>(res.n_eff);
  dims["d"] = static_cast<std::int64_t>(res.d);
  dims["k"] = static_cast<std::int64_t>(res.k);
  j["dimensions"] = std::move(dims);

  ordered_json settings;
  settings["fdr_method"] = fdr_method_name(opt.fdr);
  settings["storey_lambda"] = opt.storey_lambda;
  settings["clamp_eps"] = opt.clamp_eps;
  settings["methods"] = detail::json_method_list(opt.methods);
  j["settings"] = std::move(settings);

  ordered_json factors;
  factors["lambda_hat"] = detail::json_vector(res.fac.lambda_hat);
  factors["rho_hat"] = res.fac.rho_hat;
  j["factors"] = std::move(factors);

  ordered_json shrink;
  shrink["correction_factor"] = detail::json_vector(res.om.shrink_correction);
  ordered_json clamped = ordered_json::array();
  for (const auto c : res.om.clamped) clamped.push_back(c != 0);
  shrink["clamped"] = std::move(clamped);
  j["shrinkage"] = std::move(shrink);

  ordered_json conf;
  conf["dof"] = static_cast<std::int64_t>(res.conf.dof);
  conf["statistic"] = detail::json_matrix(res.conf.statistic);
  ordered_json per_cov = ordered_json::array();
  for (Eigen::Index jcol = 0; jcol < res.conf.per_covariate_chi2.size();
       ++jcol) {
    per_cov.push_back(
        ordered_json{{"covariate_id",
                      res.covariate_ids[static_cast<std::size_t>(jcol)]},
                     {"chi2", res.conf.per_covariate_chi2[jcol]},
                     {"p_value", res.conf.p_values[jcol]}});
  }
  conf["per_covariate"] = std::move(per_cov);
  j["confounding_test"] = std::move(conf);

  ordered_json pi0;
  for (const auto& [method, mo] : res.methods) {
    ordered_json v = ordered_json::array();
    for (const double x : mo.pi0) v.push_back(x);
    pi0[method_name(method)] = std::move(v);
  }
  j["pi0_hat"] = std::move(pi0);

  ordered_json warns = ordered_json::array();
  for (const auto& w : res.warnings) warns.push_back(w);
  j["warnings"] = std::move(warns);
  return j;
}

inline ordered_json json_error(const error& e) {
  return ordered_json{
      {"error", ordered_json{{"code", errc_name(e.code)},
                             {"message", std::string(e.what())}}}};
}

inline void write_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), errc::io_failure, "cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  require(out.good(), errc::io_failure, "write failed: " + path);
}

// Effect tables as one wide TSV: per method and covariate the columns
// beta_hat, se, t_stat, p_value, q_value.  Suffixes disambiguate when more
// than one method or covariate is present.
inline labeled_matrix effect_table_matrix(const adjust_result& res) {
  static const char* stats[] = {"beta_hat", "se", "t_stat", "p_value",
                                "q_value"};
  const Eigen::Index p = res.p;
  const Eigen::Index d = res.d;
  const auto n_methods = static_cast<Eigen::Index>(res.methods.size());

  labeled_matrix out;
  out.corner = "feature_id";
  out.row_ids = res.feature_ids;
  out.values.resize(p, 5 * d * n_methods);

  Eigen::Index col = 0;
  for (const auto& [method, mo] : res.methods) {
    for (Eigen::Index jcov = 0; jcov < d; ++jcov) {
      const Eigen::MatrixXd* blocks[] = {&mo.table.beta_hat, &mo.table.se,
                                         &mo.table.t_stat, &mo.table.p_value,
                                         &mo.q};
      for (int s = 0; s < 5; ++s) {
        std::string name = stats[s];
        if (n_methods > 1) name += "_" + std::string(method_name(method));
        if (d > 1)
          name += "_" + res.covariate_ids[static_cast<std::size_t>(jcov)];
        out.col_ids.push_back(std::move(name));
        out.values.col(col) = blocks[s]->col(jcov);
        ++col;
      }
    }
  }
  return out;
}

inline void write_effect_tables(const std::string& path,
                                const adjust_result& res) {
  write_matrix(path, effect_table_matrix(res));
}

// Per-feature results of one simulation replicate: planted truth first, then
// the same stat block as the adjust output for every requested method.
inline void write_replicate_tsv(
    const std::string& path, const experiment_config& cfg,
    const std::map<effect_method, effect_table>& tables,
    const Eigen::MatrixXd& b_true,
    const std::vector<std::string>& feature_ids) {
  static const char* stats[] = {"beta_hat", "se", "t_stat", "p_value",
                                "q_value"};
  const Eigen::Index p = b_true.rows();
  const Eigen::Index d = b_true.cols();
  const auto n_methods = static_cast<Eigen::Index>(cfg.methods.size());

  labeled_matrix out;
  out.corner = "feature_id";
  out.row_ids = feature_ids;
  out.values.resize(p, d + 5 * d * n_methods);

  const auto cov_suffix = [&](Eigen::Index j) {
    return d > 1 ? "_x" + std::to_string(j + 1) : std::string();
  };
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    out.col_ids.push_back("b_true" + cov_suffix(j));
    out.values.col(col++) = b_true.col(j);
  }
  for (const effect_method method : cfg.methods) {
    const effect_table& table = tables.at(method);
    for (Eigen::Index j = 0; j < d; ++j) {
      const fdr_result f =
          adjust_p_values(table.p_value.col(j), cfg.fdr, cfg.storey_lambda);
      const Eigen::MatrixXd* blocks[] = {&table.beta_hat, &table.se,
                                         &table.t_stat, &table.p_value,
                                         nullptr};
      for (int s = 0; s < 5; ++s) {
        std::string name = stats[s];
        if (n_methods > 1) name += "_" + std::string(method_name(method));
        name += cov_suffix(j);
        out.col_ids.push_back(std::move(name));
        out.values.col(col) = s < 4 ? blocks[s]->col(j) : f.q_values;
        ++col;
      }
    }
  }
  write_matrix(path, out);
}

// Flat key=value config parsing for the simulate command; '#' starts a
// comment, blank lines are skipped, keys mirror the CLI flag names.
namespace detail {

inline double parse_double_or_throw(const std::string& text,
                                    const std::string& where) {
  double v = 0.0;
  require(parse_double(text, &v), errc::parse_failure,
          where + ": cannot parse '" + text + "' as a number");
  return v;
}

inline std::vector<double> parse_double_list(const std::string& text,
                                             const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(parse_double_or_throw(item, "config key '" + key + "'"));
  require(!out.empty(), errc::parse_failure,
          "config key '" + key + "' has an empty list value");
  return out;
}

} // namespace detail

inline void apply_config_entry(experiment_config& cfg, const std::string& key,
                               const std::string& value) {
  const auto as_double = [&] {
    return detail::parse_double_or_throw(value, "config key '" + key + "'");
  };
  const auto as_int = [&] {
    const double x = as_double();
    require(x == std::floor(x), errc::parse_failure,
            "config key '" + key + "' expects an integer, got '" + value +
                "'");
    return static_cast<int>(x);
  };

  if (key == "n") cfg.sim.n = as_int();
  else if (key == "p") cfg.sim.p = as_int();
  else if (key == "k") cfg.sim.k = as_int();
  else if (key == "d") cfg.sim.d = as_int();
  else if (key == "lambda_max_frac") cfg.sim.lambda_max_frac = as_double();
  else if (key == "lambda_min") cfg.sim.lambda_min = as_double();
  else if (key == "beta_nonzero_prob") cfg.sim.beta_nonzero_prob = as_double();
  else if (key == "beta_sd") cfg.sim.beta_sd = as_double();
  else if (key == "loading_sd") cfg.sim.loading_sd = as_double();
  else if (key == "sigma2_mean") cfg.sim.sigma2_mean = as_double();
  else if (key == "sigma2_var") cfg.sim.sigma2_var = as_double();
  else if (key == "noise_df")
    cfg.sim.noise_df = (value == "inf" || value == "gaussian")
                           ? std::numeric_limits<double>::infinity()
                           : as_double();
  else if (key == "mediated_frac") cfg.sim.mediated_frac = as_double();
  else if (key == "omega_scenario") cfg.sim.scenario = scenario_from_name(value);
  else if (key == "omega_custom")
    cfg.sim.omega_custom = detail::parse_double_list(value, key);
  else if (key == "seed") cfg.sim.seed = static_cast<std::uint64_t>(as_int());
  else if (key == "reps") cfg.reps = as_int();
  else if (key == "k_fit") cfg.k_fit = as_int();
  else if (key == "methods") {
    cfg.methods.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
      cfg.methods.push_back(method_from_name(item));
    require(!cfg.methods.empty(), errc::parse_failure,
            "config key 'methods' has an empty list value");
  } else if (key == "nominal_levels")
    cfg.nominal_levels = detail::parse_double_list(value, key);
  else if (key == "fdr_method") cfg.fdr = fdr_method_from_name(value);
  else if (key == "storey_lambda") cfg.storey_lambda = as_double();
  else if (key == "clamp_eps") cfg.clamp_eps = as_double();
  else if (key == "ci_level") cfg.ci_level = as_double();
  else if (key == "threads") cfg.threads = as_int();
  else
    throw error(errc::parse_failure, "unknown config key '" + key + "'");
}

inline experiment_config read_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_failure, "cannot open config file: " + path);
  experiment_config cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    require(eq != std::string::npos && eq > 0, errc::parse_failure,
            path + ":" + std::to_string(line_no) +
                ": expected key=value, got '" + line + "'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(!key.empty(), errc::parse_failure,
            path + ":" + std::to_string(line_no) + ": empty key");
    require(!value.empty(), errc::parse_failure,
            path + ":" + std::to_string(line_no) + ": empty value for key '" +
                key + "'");
    try {
      apply_config_entry(cfg, key, value);
    } catch (const error& e) {
      throw error(e.code,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

} // namespace confadj
