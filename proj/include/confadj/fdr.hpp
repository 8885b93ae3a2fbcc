#pragma once

#include <algorithm>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "confadj/error.hpp"

namespace confadj {

enum class fdr_method { bh, storey };

inline const char* fdr_method_name(fdr_method m) {
  return m == fdr_method::bh ? "bh" : "storey";
}

inline fdr_method fdr_method_from_name(const std::string& name) {
  if (name == "bh") return fdr_method::bh;
  if (name == "storey") return fdr_method::storey;
  throw error(errc::invalid_argument,
              "unknown fdr method \"" + name + "\" (expected bh or storey)");
}

struct fdr_result {
  Eigen::VectorXd q_values;
  double pi0_hat = 1.0;
  fdr_method method = fdr_method::bh;
};

namespace detail {

inline void check_p_values(const Eigen::VectorXd& p) {
  require(p.size() > 0, errc::invalid_argument, "empty p-value vector");
  for (Eigen::Index i = 0; i < p.size(); ++i)
    require(std::isfinite(p[i]) && p[i] >= 0.0 && p[i] <= 1.0,
            errc::invalid_argument,
            "p-value at index " + std::to_string(i) + " is outside [0,1]");
}

} // namespace detail

// Step-up adjustment: q(i) = min_{j >= i} m * p(j) / j on the sorted scale
// (capped at 1), mapped back to input order.  Ties share a q via stable sort.
inline fdr_result bh_adjust(const Eigen::VectorXd& p) {
  detail::check_p_values(p);
  const Eigen::Index m = p.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return p[a] < p[b]; });
  fdr_result out;
  out.method = fdr_method::bh;
  out.pi0_hat = 1.0;
  out.q_values.resize(m);
  double running = 1.0;
  for (Eigen::Index r = m; r >= 1; --r) {
    const Eigen::Index idx = order[static_cast<std::size_t>(r - 1)];
    const double adj =
        static_cast<double>(m) * p[idx] / static_cast<double>(r);
    running = std::min(running, std::min(adj, 1.0));
    out.q_values[idx] = running;
  }
  return out;
}

// Storey q-values with a single-point null-fraction estimate:
// pi0 = #{p > lambda} / (m (1 - lambda)), clamped to (1/m, 1].
inline fdr_result storey_qvalue(const Eigen::VectorXd& p, double lambda = 0.5) {
  detail::check_p_values(p);
  require(lambda > 0 && lambda < 1, errc::invalid_argument,
          "storey_qvalue: lambda must lie in (0,1)");
  const Eigen::Index m = p.size();
  Eigen::Index above = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (p[i] > lambda) ++above;
  double pi0 = static_cast<double>(above) /
               (static_cast<double>(m) * (1.0 - lambda));
  pi0 = std::min(pi0, 1.0);
  pi0 = std::max(pi0, 1.0 / static_cast<double>(m));
  fdr_result out = bh_adjust(p);
  out.method = fdr_method::storey;
  out.pi0_hat = pi0;
  out.q_values = (out.q_values * pi0).cwiseMin(1.0);
  return out;
}

inline fdr_result adjust_p_values(const Eigen::VectorXd& p, fdr_method method,
                                  double storey_lambda = 0.5) {
  return method == fdr_method::bh ? bh_adjust(p)
                                  : storey_qvalue(p, storey_lambda);
}

// Realized false-discovery proportion: |discoveries \ truth| over
// max(|discoveries|, 1).
inline double false_discovery_proportion(
    const std::vector<Eigen::Index>& discoveries,
    const std::vector<Eigen::Index>& true_nonzero) {
  if (discoveries.empty()) return 0.0;
  std::unordered_set<Eigen::Index> truth(true_nonzero.begin(),
                                         true_nonzero.end());
  std::size_t false_count = 0;
  for (const auto i : discoveries)
    if (truth.find(i) == truth.end()) ++false_count;
  return static_cast<double>(false_count) /
         static_cast<double>(discoveries.size());
}

} // namespace confadj
