#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "confadj/confadj.hpp"

namespace {

using confadj::errc;
using confadj::error;

// Reorders the rows of a covariate table to match the response's sample
// order; every response sample must be present.
Eigen::MatrixXd align_samples(const confadj::labeled_matrix& covariates,
                              const std::vector<std::string>& sample_ids,
                              const std::string& what) {
  std::unordered_map<std::string, Eigen::Index> position;
  position.reserve(covariates.row_ids.size());
  for (std::size_t i = 0; i < covariates.row_ids.size(); ++i)
    position.emplace(covariates.row_ids[i], static_cast<Eigen::Index>(i));
  confadj::require(covariates.row_ids.size() == sample_ids.size(),
                   errc::dimension_mismatch,
                   what + " lists " + std::to_string(covariates.row_ids.size()) +
                       " samples but y has " +
                       std::to_string(sample_ids.size()));
  Eigen::MatrixXd out(covariates.values.rows(), covariates.values.cols());
  for (std::size_t i = 0; i < sample_ids.size(); ++i) {
    const auto hit = position.find(sample_ids[i]);
    confadj::require(hit != position.end(), errc::invalid_argument,
                     what + " is missing sample id '" + sample_ids[i] +
                         "' present in y");
    out.row(static_cast<Eigen::Index>(i)) = covariates.values.row(hit->second);
  }
  return out;
}

std::vector<confadj::effect_method> parse_methods(const std::string& list) {
  std::vector<confadj::effect_method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    out.push_back(confadj::method_from_name(item));
  confadj::require(!out.empty(), errc::invalid_argument,
                   "--methods: empty list");
  return out;
}

int run_adjust_command(const std::string& y_path, const std::string& x_path,
                       const std::string& z_path, int k, bool transpose,
                       const std::string& fdr_name, double clamp_eps,
                       const std::string& methods_list,
                       const std::string& out_path,
                       const std::string& summary_path) {
  confadj::adjust_options opt;
  opt.k = k;
  opt.clamp_eps = clamp_eps;
  opt.fdr = confadj::fdr_method_from_name(fdr_name);
  opt.methods = parse_methods(methods_list);

  confadj::labeled_matrix y = confadj::read_matrix(y_path);
  if (transpose) y = y.transposed();
  const confadj::labeled_matrix x = confadj::read_matrix(x_path);

  confadj::observed_data data;
  data.y = std::move(y.values);
  data.feature_ids = std::move(y.row_ids);
  data.sample_ids = y.col_ids;
  data.covariate_ids = x.col_ids;
  data.x = align_samples(x, data.sample_ids, "x (" + x_path + ")");
  if (!z_path.empty()) {
    const confadj::labeled_matrix z = confadj::read_matrix(z_path);
    data.z = align_samples(z, data.sample_ids, "z (" + z_path + ")");
  }

  const confadj::adjust_result res = confadj::run_adjust(data, opt);
  confadj::write_effect_tables(out_path, res);
  confadj::write_json_file(summary_path,
                           confadj::json_adjust_summary(res, opt));
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int run_simulate_command(const std::string& config_path, int reps_override,
                         std::int64_t seed_override,
                         const std::string& out_dir) {
  confadj::experiment_config cfg =
      config_path.empty() ? confadj::experiment_config()
                          : confadj::read_experiment_config(config_path);
  if (reps_override > 0) cfg.reps = reps_override;
  if (seed_override >= 0)
    cfg.sim.seed = static_cast<std::uint64_t>(seed_override);

  std::filesystem::create_directories(out_dir);
  const auto rep_path = [&](int r) {
    char name[32];
    std::snprintf(name, sizeof(name), "rep_%03d.tsv", r);
    return (std::filesystem::path(out_dir) / name).string();
  };
  const confadj::experiment_report report = confadj::run_experiment(
      cfg, [&](int r, const std::map<confadj::effect_method,
                                     confadj::effect_table>& tables,
               const Eigen::MatrixXd& b_true,
               const std::vector<std::string>& feature_ids) {
        confadj::write_replicate_tsv(rep_path(r), cfg, tables, b_true,
                                     feature_ids);
      });
  confadj::write_json_file(
      (std::filesystem::path(out_dir) / "report.json").string(),
      confadj::json_experiment_report(report));
  if (report.n_failed > 0)
    std::cerr << "warning: " << report.n_failed
              << " replicate(s) failed; see report.json\n";
  return 0;
}

int run_validate_command(const std::string& suite, std::int64_t seed_flag) {
  const std::uint64_t seed =
      seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : 1;
  std::vector<std::string> names;
  if (suite == "all")
    names = confadj::validation_suite_names();
  else
    names.push_back(suite);

  bool all_pass = true;
  for (const auto& name : names) {
    const confadj::suite_result result =
        confadj::run_validation_suite(name, seed);
    confadj::print_suite(result, std::cout);
    all_pass = all_pass && result.passed();
  }
  if (names.size() > 1)
    std::cout << "[all] " << (all_pass ? "PASS" : "FAIL") << "\n";
  return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent-confounder adjustment for feature-by-sample matrices"};
  app.require_subcommand(1);

  // adjust
  auto* adjust = app.add_subcommand(
      "adjust", "fit effects with bias-corrected confounder adjustment");
  std::string y_path, x_path, z_path, out_path, summary_path;
  std::string fdr_name = "storey";
  std::string methods_list = "adjusted_bias_corrected";
  int k = 0;
  double clamp_eps = 0.05;
  int threads = 1;
  bool transpose = false;
  adjust->add_option("--y", y_path, "response matrix TSV/CSV, features x samples")
      ->required();
  adjust->add_option("--x", x_path, "covariate matrix, samples x covariates")
      ->required();
  adjust->add_option("--z", z_path, "nuisance covariates, samples x columns");
  adjust->add_option("--k", k, "number of latent factors")
      ->required()
      ->check(CLI::Validator(
          [](std::string& value) {
            int parsed = 0;
            const bool ok = CLI::detail::lexical_cast(value, parsed);
            return ok && parsed >= 1
                       ? std::string()
                       : std::string("k must be >= 1 (for plain least "
                                     "squares request --methods unadjusted, "
                                     "which ignores the factor fit)");
          },
          "K>=1"));
  adjust->add_option("--fdr-method", fdr_name, "bh or storey (default storey)")
      ->check(CLI::IsMember({"bh", "storey"}));
  adjust->add_option("--clamp-eps", clamp_eps,
                     "floor for the spike debias denominator, as a fraction "
                     "of lambda_hat (default 0.05)");
  adjust->add_option("--methods", methods_list,
                     "comma list of unadjusted, adjusted_uncorrected, "
                     "adjusted_bias_corrected");
  adjust->add_option("--out", out_path, "per-feature results TSV")->required();
  adjust->add_option("--summary", summary_path, "JSON run summary")
      ->required();
  adjust->add_option("--threads", threads, "worker cap (reserved)");
  adjust->add_flag("--transpose", transpose,
                   "y file is samples x features; transpose after reading");

  // simulate
  auto* simulate = app.add_subcommand(
      "simulate", "run the synthetic-data experiment and write a report");
  std::string config_path, out_dir;
  int reps_override = 0;
  std::int64_t seed_override = -1;
  simulate->add_option("--config", config_path,
                       "key=value config file (defaults when omitted)");
  simulate->add_option("--reps", reps_override, "override replicate count")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed_override, "override base seed")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--out", out_dir, "output directory")->required();

  // validate
  auto* validate = app.add_subcommand(
      "validate", "run a named calibration suite and print pass/fail checks");
  std::string suite;
  std::int64_t seed_flag = -1;
  validate
      ->add_option("--suite", suite,
                   "prop1, lemma1, rho, coverage, fig1, chi2null, koverspec, "
                   "oracles, or all")
      ->required()
      ->check(CLI::IsMember({"prop1", "lemma1", "rho", "coverage", "fig1",
                             "chi2null", "koverspec", "oracles", "all"}));
  validate->add_option("--seed", seed_flag, "suite base seed (default 1)")
      ->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (adjust->parsed())
      return run_adjust_command(y_path, x_path, z_path, k, transpose, fdr_name,
                                clamp_eps, methods_list, out_path,
                                summary_path);
    if (simulate->parsed())
      return run_simulate_command(config_path, reps_override, seed_override,
                                  out_dir);
    return run_validate_command(suite, seed_flag);
  } catch (const error& e) {
    std::cout << confadj::json_error(e).dump(2) << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cout << confadj::ordered_json{
                     {"error",
                      confadj::ordered_json{{"code", "internal"},
                                            {"message", e.what()}}}}
                     .dump(2)
              << std::endl;
    return 1;
  }
}
