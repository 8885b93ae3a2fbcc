#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "confadj/design.hpp"
#include "confadj/rng.hpp"

using namespace confadj;

namespace {

observed_data make_observed(int p, int n, int d, int r, std::uint64_t seed) {
  observed_data data;
  data.y.resize(p, n);
  data.x.resize(n, d);
  data.z.resize(n, r);
  rng::stream st(seed, 0);
  std::uint64_t slot = 0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < n; ++j) data.y(i, j) = st.normal(2 * slot++);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) data.x(i, j) = st.normal(2 * slot++);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < r; ++j) data.z(i, j) = st.normal(2 * slot++);
  return data;
}

} // namespace

TEST_CASE("complement of the 2-vector of ones is the sign contrast",
          "[design]") {
  Eigen::MatrixXd x(2, 1);
  x << 1.0, 1.0;
  const Eigen::MatrixXd a = orthonormal_complement(x);
  REQUIRE(a.rows() == 2);
  REQUIRE(a.cols() == 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  REQUIRE(std::abs(std::abs(a(0, 0)) - inv_sqrt2) < 1e-14);
  REQUIRE(std::abs(a(0, 0) + a(1, 0)) < 1e-14); // orthogonal to ones
}

TEST_CASE("complement is orthonormal and annihilates the input", "[design]") {
  const observed_data data = make_observed(12, 9, 2, 0, 5);
  const Eigen::MatrixXd a = orthonormal_complement(data.x);
  REQUIRE(a.cols() == 7);
  REQUIRE((a.transpose() * a - Eigen::MatrixXd::Identity(7, 7)).norm() < 1e-12);
  REQUIRE((a.transpose() * data.x).norm() < 1e-12 * data.x.norm());

  Eigen::MatrixXd rank_deficient(4, 2);
  rank_deficient << 1, 2, 2, 4, 3, 6, 4, 8;
  REQUIRE_THROWS_WITH(orthonormal_complement(rank_deficient),
                      Catch::Matchers::ContainsSubstring("column 2"));
}

TEST_CASE("partition reconstructs the data exactly", "[design]") {
  const observed_data data = make_observed(15, 10, 2, 0, 7);
  const partition part = make_partition(data);
  REQUIRE(part.n_eff == 10);
  REQUIRE(part.d == 2);
  const Eigen::MatrixXd recon =
      part.y1 * part.x.transpose() + part.y2 * part.a_basis.transpose();
  REQUIRE((recon - data.y).norm() < 1e-10 * data.y.norm());
  // Orthogonal split preserves energy.
  const double px_energy = (part.y1 * part.x.transpose()).squaredNorm();
  REQUIRE(px_energy + part.y2.squaredNorm() ==
          Catch::Approx(data.y.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("constant features vanish after intercept removal", "[design]") {
  observed_data data = make_observed(8, 6, 1, 1, 11);
  data.z.setOnes(); // intercept as nuisance
  data.y.row(3).setConstant(4.2);
  const partition part = rotate_and_partition(data);
  // A constant row lives in span(1) and must be annihilated entirely.
  REQUIRE(part.y1.row(3).norm() + part.y2.row(3).norm() < 1e-10);
}

TEST_CASE("data inside the nuisance space rotates to zero", "[design]") {
  observed_data data = make_observed(9, 7, 1, 2, 13);
  rng::stream st(14, 1);
  Eigen::MatrixXd m(9, 2);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 2; ++j)
      m(i, j) = st.normal(2 * static_cast<std::uint64_t>(i * 2 + j));
  data.y = m * data.z.transpose();
  const observed_data rotated = remove_nuisance(data);
  REQUIRE(rotated.y.norm() < 1e-10 * data.y.norm());
  REQUIRE(rotated.y.cols() == 5);
  REQUIRE(rotated.sample_ids.empty());
}

TEST_CASE("fused rotation matches the two-step composition", "[design]") {
  const observed_data data = make_observed(20, 12, 2, 2, 17);
  const partition fused = rotate_and_partition(data);
  const partition composed = make_partition(remove_nuisance(data));
  REQUIRE(fused.n_eff == composed.n_eff);
  REQUIRE((fused.y1 - composed.y1).norm() < 1e-8 * composed.y1.norm());
  REQUIRE((fused.y2 - composed.y2).norm() < 1e-8 * composed.y2.norm());
  REQUIRE((fused.xtx - composed.xtx).norm() < 1e-8 * composed.xtx.norm());
}

TEST_CASE("jointly permuting samples leaves the partition outputs "
          "equivalent", "[design]") {
  const observed_data data = make_observed(14, 9, 1, 0, 19);
  observed_data permuted = data;
  std::vector<int> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::swap(perm[0], perm[5]);
  std::swap(perm[2], perm[7]);
  for (int j = 0; j < 9; ++j) {
    permuted.y.col(j) = data.y.col(perm[static_cast<std::size_t>(j)]);
    permuted.x.row(j) = data.x.row(perm[static_cast<std::size_t>(j)]);
  }
  const partition a = make_partition(data);
  const partition b = make_partition(permuted);
  // y1 is basis-free; y2 only through its Gram matrix.
  REQUIRE((a.y1 - b.y1).norm() < 1e-8 * a.y1.norm());
  const Eigen::MatrixXd ga = a.y2 * a.y2.transpose();
  const Eigen::MatrixXd gb = b.y2 * b.y2.transpose();
  REQUIRE((ga - gb).norm() < 1e-8 * ga.norm());
}

TEST_CASE("near-collinear designs are rejected", "[design]") {
  observed_data data = make_observed(10, 8, 2, 0, 23);
  data.x.col(1) = data.x.col(0) * (1.0 + 1e-14);
  REQUIRE_THROWS_WITH(make_partition(data),
                      Catch::Matchers::ContainsSubstring("condition"));
}

TEST_CASE("x absorbed by the nuisance space is an error", "[design]") {
  observed_data data = make_observed(10, 8, 1, 1, 29);
  data.x = data.z;
  REQUIRE_THROWS_WITH(remove_nuisance(data),
                      Catch::Matchers::ContainsSubstring("absorbed"));
}

TEST_CASE("validation rejects bad shapes and non-finite input", "[design]") {
  observed_data data = make_observed(10, 8, 1, 0, 31);

  observed_data wide = data;
  wide.y = data.y.transpose(); // now p < n
  wide.x.resize(10, 1);
  wide.x.setOnes();
  wide.x(1, 0) = 0.0;
  REQUIRE_THROWS_WITH(validate_observed(wide, 1),
                      Catch::Matchers::ContainsSubstring("more features"));

  observed_data mismatched = data;
  mismatched.x = Eigen::MatrixXd::Ones(7, 1);
  REQUIRE_THROWS_WITH(validate_observed(mismatched, 1),
                      Catch::Matchers::ContainsSubstring("7 rows"));

  observed_data toosmall = make_observed(10, 4, 1, 0, 37);
  REQUIRE_THROWS_WITH(validate_observed(toosmall, 3),
                      Catch::Matchers::ContainsSubstring("n > d + r + k"));

  observed_data nonfinite = data;
  nonfinite.y(2, 3) = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_WITH(validate_observed(nonfinite, 1),
                      Catch::Matchers::ContainsSubstring("(3, 4)")); // 1-based
}
