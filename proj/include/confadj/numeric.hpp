#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "confadj/error.hpp"

namespace confadj {

// Pairwise (cascade) summation: error grows O(log n) instead of O(n), and
// the reduction order is fixed, so results do not depend on thread schedule.
inline double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& x) {
  return pairwise_sum(x.data(), x.size());
}

inline double pairwise_sum(const Eigen::VectorXd& x) {
  return pairwise_sum(x.data(), static_cast<std::size_t>(x.size()));
}

template <typename V>
double pairwise_mean(const V& x) {
  const auto n = static_cast<std::size_t>(x.size());
  require(n > 0, errc::invalid_argument, "mean of empty vector");
  return pairwise_sum(x) / static_cast<double>(n);
}

// Symmetric PSD square root via eigendecomposition.
inline Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& m) {
  require(m.rows() == m.cols(), errc::dimension_mismatch,
          "symmetric_sqrt: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  require(es.info() == Eigen::Success, errc::singular_input,
          "symmetric_sqrt: eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    require(ev[i] > -1e-12 * scale, errc::singular_input,
            "symmetric_sqrt: matrix has a negative eigenvalue");
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// Inverse of the symmetric square root; errors when the matrix is singular
// relative to its largest eigenvalue.
inline Eigen::MatrixXd symmetric_inv_sqrt(const Eigen::MatrixXd& m,
                                          double rcond = 1e-12) {
  require(m.rows() == m.cols(), errc::dimension_mismatch,
          "symmetric_inv_sqrt: matrix must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  require(es.info() == Eigen::Success, errc::singular_input,
          "symmetric_inv_sqrt: eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  require(top > 0.0, errc::singular_input,
          "symmetric_inv_sqrt: matrix is not positive definite");
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    require(ev[i] > rcond * top, errc::singular_input,
            "symmetric_inv_sqrt: matrix is singular to working precision");
    ev[i] = 1.0 / std::sqrt(ev[i]);
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// Kolmogorov–Smirnov distance between a sample and a reference CDF.
inline double ks_distance(std::vector<double> sample,
                          const std::function<double(double)>& cdf) {
  require(!sample.empty(), errc::invalid_argument, "ks_distance: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max(d, std::abs((static_cast<double>(i) + 1.0) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }
  return d;
}

// First non-finite entry of a matrix, for error messages; returns true and
// fills (row, col) when one exists.
inline bool find_non_finite(const Eigen::MatrixXd& m, Eigen::Index* row,
                            Eigen::Index* col) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j))) {
        *row = i;
        *col = j;
        return true;
      }
  return false;
}

inline void require_finite(const Eigen::MatrixXd& m, const std::string& name) {
  Eigen::Index i, j;
  if (find_non_finite(m, &i, &j))
    throw error(errc::non_finite, name + " contains a non-finite value at (" +
                                      std::to_string(i + 1) + ", " +
                                      std::to_string(j + 1) + ") (1-based)");
}

} // namespace confadj
