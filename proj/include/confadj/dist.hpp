#pragma once

#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "confadj/error.hpp"

namespace confadj {

inline double t_sf(double x, double dof) {
  require(dof > 0, errc::invalid_argument, "t_sf: dof must be positive");
  if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
  boost::math::students_t d(dof);
  return boost::math::cdf(boost::math::complement(d, x));
}

// Two-sided p-value for a t statistic.
inline double t_two_sided_p(double t, double dof) {
  return 2.0 * t_sf(std::abs(t), dof);
}

inline double t_quantile(double prob, double dof) {
  require(dof > 0 && prob > 0 && prob < 1, errc::invalid_argument,
          "t_quantile: need dof > 0 and prob in (0,1)");
  boost::math::students_t d(dof);
  return boost::math::quantile(d, prob);
}

// Closed-form quantile of the t distribution with 4 degrees of freedom
// (no root finding; exact inverse of the df=4 CDF).
inline double t4_quantile(double u) {
  require(u > 0 && u < 1, errc::invalid_argument, "t4_quantile: u in (0,1)");
  const double a = 4.0 * u * (1.0 - u);
  const double sa = std::sqrt(a);
  const double c = std::cos(std::acos(sa) / 3.0);
  const double q = 2.0 * std::sqrt(c / sa - 1.0);
  return u < 0.5 ? -q : q;
}

inline double chi2_sf(double x, double dof) {
  require(dof > 0, errc::invalid_argument, "chi2_sf: dof must be positive");
  if (x <= 0) return 1.0;
  boost::math::chi_squared d(dof);
  return boost::math::cdf(boost::math::complement(d, x));
}

inline double chi2_cdf(double x, double dof) { return 1.0 - chi2_sf(x, dof); }

inline double chi2_quantile(double prob, double dof) {
  require(dof > 0 && prob > 0 && prob < 1, errc::invalid_argument,
          "chi2_quantile: need dof > 0 and prob in (0,1)");
  boost::math::chi_squared d(dof);
  return boost::math::quantile(d, prob);
}

inline double f_cdf(double x, double d1, double d2) {
  require(d1 > 0 && d2 > 0, errc::invalid_argument,
          "f_cdf: dof must be positive");
  if (x <= 0) return 0.0;
  boost::math::fisher_f d(d1, d2);
  return boost::math::cdf(d, x);
}

inline double f_sf(double x, double d1, double d2) {
  require(d1 > 0 && d2 > 0, errc::invalid_argument,
          "f_sf: dof must be positive");
  if (x <= 0) return 1.0;
  boost::math::fisher_f d(d1, d2);
  return boost::math::cdf(boost::math::complement(d, x));
}

inline double f_quantile(double prob, double d1, double d2) {
  require(d1 > 0 && d2 > 0 && prob > 0 && prob < 1, errc::invalid_argument,
          "f_quantile: need dof > 0 and prob in (0,1)");
  boost::math::fisher_f d(d1, d2);
  return boost::math::quantile(d, prob);
}

inline double normal_cdf(double x) {
  boost::math::normal d;
  return boost::math::cdf(d, x);
}

// Student-t quantile routed through the df=4 closed form when applicable.
inline double t_quantile_df(double u, double df) {
  if (df == 4.0) return t4_quantile(u);
  return t_quantile(u, df);
}

inline double gamma_quantile(double u, double shape, double rate) {
  require(shape > 0 && rate > 0 && u > 0 && u < 1, errc::invalid_argument,
          "gamma_quantile: need shape, rate > 0 and u in (0,1)");
  boost::math::gamma_distribution<double> d(shape, 1.0 / rate);
  return boost::math::quantile(d, u);
}

} // namespace confadj
