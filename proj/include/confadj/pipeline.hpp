#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "confadj/design.hpp"
#include "confadj/effects.hpp"
#include "confadj/error.hpp"
#include "confadj/factor.hpp"
#include "confadj/fdr.hpp"
#include "confadj/omega.hpp"

namespace confadj {

struct adjust_options {
  Eigen::Index k = 10;
  double clamp_eps = 0.05;
  fdr_method fdr = fdr_method::storey;
  double storey_lambda = 0.5;
  std::vector<effect_method> methods = {
      effect_method::adjusted_bias_corrected};
};

// One requested method with its multiplicity adjustment: q and pi0 are per
// covariate (column-aligned with the effect table).
struct method_output {
  effect_table table;
  Eigen::MatrixXd q;        // p x d
  std::vector<double> pi0;  // d
};

struct adjust_result {
  Eigen::Index n_input = 0;
  Eigen::Index n_eff = 0;
  Eigen::Index p = 0;
  Eigen::Index d = 0;
  Eigen::Index k = 0;
  factor_estimate fac;
  omega_estimate om;
  confounding_test conf;
  std::vector<std::pair<effect_method, method_output>> methods;
  std::vector<std::string> feature_ids;
  std::vector<std::string> covariate_ids;
  std::vector<std::string> warnings;
};

// The whole adjustment pipeline on in-memory data; the CLI adjust command is
// a thin shell over this.
inline adjust_result run_adjust(const observed_data& data,
                                const adjust_options& opt) {
  require(opt.k >= 1, errc::invalid_argument,
          "run_adjust: k must be >= 1 (use the unadjusted method for plain "
          "least squares)");
  require(!opt.methods.empty(), errc::invalid_argument,
          "run_adjust: no methods requested");
  for (const auto m : opt.methods)
    require(m != effect_method::oracle, errc::invalid_argument,
            "run_adjust: the oracle method needs known confounders and is "
            "available only in simulation");
  validate_observed(data, opt.k);

  adjust_result out;
  out.n_input = data.y.cols();
  out.k = opt.k;

  const partition part = rotate_and_partition(data);
  out.n_eff = part.n_eff;
  out.p = part.y1.rows();
  out.d = part.d;
  out.feature_ids = part.feature_ids;
  out.covariate_ids = part.covariate_ids;

  out.fac = estimate_factors(part.y2, opt.k);
  out.warnings = out.fac.warnings;
  out.om = bias_corrected_omega(naive_omega(part.y1, out.fac.l_hat),
                                out.fac.lambda_hat, out.fac.rho_hat,
                                opt.clamp_eps);
  out.conf = test_confounding(out.om, part.xtx);

  for (const effect_method method : opt.methods) {
    method_output mo;
    switch (method) {
      case effect_method::adjusted_bias_corrected:
        mo.table = effects_bias_corrected(part, out.fac, out.om);
        break;
      case effect_method::adjusted_uncorrected:
        mo.table = effects_adjusted_uncorrected(part, out.fac, out.om);
        break;
      case effect_method::unadjusted:
        mo.table = effects_unadjusted(part);
        break;
      case effect_method::oracle:
        break; // rejected above
    }
    mo.q.resize(out.p, out.d);
    mo.pi0.resize(static_cast<std::size_t>(out.d));
    for (Eigen::Index j = 0; j < out.d; ++j) {
      const fdr_result f =
          adjust_p_values(mo.table.p_value.col(j), opt.fdr, opt.storey_lambda);
      mo.q.col(j) = f.q_values;
      mo.pi0[static_cast<std::size_t>(j)] = f.pi0_hat;
    }
    out.methods.emplace_back(method, std::move(mo));
  }
  return out;
}

} // namespace confadj
