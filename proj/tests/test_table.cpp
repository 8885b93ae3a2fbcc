#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "confadj/rng.hpp"
#include "confadj/table.hpp"

using namespace confadj;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

} // namespace

TEST_CASE("two-by-two tsv parses with labels", "[table]") {
  const std::string path = temp_path("confadj_t22.tsv");
  write_text(path, "id\tc1\tc2\nr1\t1\t2\nr2\t3\t4\n");
  const labeled_matrix m = read_matrix(path);
  REQUIRE(m.values.rows() == 2);
  REQUIRE(m.values.cols() == 2);
  REQUIRE(m.values(0, 0) == 1.0);
  REQUIRE(m.values(0, 1) == 2.0);
  REQUIRE(m.values(1, 0) == 3.0);
  REQUIRE(m.values(1, 1) == 4.0);
  REQUIRE(m.row_ids == std::vector<std::string>{"r1", "r2"});
  REQUIRE(m.col_ids == std::vector<std::string>{"c1", "c2"});
  REQUIRE(m.corner == "id");
  std::filesystem::remove(path);
}

TEST_CASE("csv delimiter comes from the extension", "[table]") {
  const std::string path = temp_path("confadj_t22.csv");
  write_text(path, "id,c1,c2\nr1,1.5,-2e3\nr2,+3,0.25\n");
  const labeled_matrix m = read_matrix(path);
  REQUIRE(m.values(0, 1) == -2000.0);
  REQUIRE(m.values(1, 0) == 3.0);
  std::filesystem::remove(path);

  REQUIRE_THROWS_WITH(read_matrix(temp_path("confadj.dat")),
                      Catch::Matchers::ContainsSubstring("delimiter"));
}

TEST_CASE("non-numeric cell error names the cell", "[table]") {
  const std::string path = temp_path("confadj_na.tsv");
  write_text(path, "id\tc1\tc2\nr1\t1\tNA\n");
  REQUIRE_THROWS_WITH(read_matrix(path),
                      Catch::Matchers::ContainsSubstring("\"r1\"") &&
                          Catch::Matchers::ContainsSubstring("\"c2\"") &&
                          Catch::Matchers::ContainsSubstring("\"NA\""));
  std::filesystem::remove(path);
}

TEST_CASE("ragged row error names row and field counts", "[table]") {
  const std::string path = temp_path("confadj_ragged.tsv");
  write_text(path, "id\tc1\tc2\nr1\t1\t2\nr2\t3\n");
  REQUIRE_THROWS_WITH(read_matrix(path),
                      Catch::Matchers::ContainsSubstring("row 3") &&
                          Catch::Matchers::ContainsSubstring("2 fields") &&
                          Catch::Matchers::ContainsSubstring("expected 3"));
  std::filesystem::remove(path);
}

TEST_CASE("duplicate ids are rejected with positions", "[table]") {
  const std::string path = temp_path("confadj_dup.tsv");
  write_text(path, "id\tc1\tc2\nr1\t1\t2\nr1\t3\t4\n");
  REQUIRE_THROWS_WITH(read_matrix(path),
                      Catch::Matchers::ContainsSubstring("duplicate row id") &&
                          Catch::Matchers::ContainsSubstring("positions 1 and 2"));
  write_text(path, "id\tc1\tc1\nr1\t1\t2\n");
  REQUIRE_THROWS_WITH(read_matrix(path),
                      Catch::Matchers::ContainsSubstring("duplicate column id"));
  std::filesystem::remove(path);
}

TEST_CASE("missing file and empty table raise io/parse errors", "[table]") {
  REQUIRE_THROWS_AS(read_matrix(temp_path("confadj_nothere.tsv")), error);
  const std::string path = temp_path("confadj_empty.tsv");
  write_text(path, "id\tc1\n");
  REQUIRE_THROWS_WITH(read_matrix(path),
                      Catch::Matchers::ContainsSubstring("no data rows"));
  std::filesystem::remove(path);
}

TEST_CASE("windows line endings and blank lines are tolerated", "[table]") {
  const std::string path = temp_path("confadj_crlf.tsv");
  write_text(path, "id\tc1\r\nr1\t7\r\n\nr2\t8\r\n\n");
  const labeled_matrix m = read_matrix(path);
  REQUIRE(m.values(0, 0) == 7.0);
  REQUIRE(m.values(1, 0) == 8.0);
  std::filesystem::remove(path);
}

TEST_CASE("write then read is the identity, bit for bit", "[table]") {
  labeled_matrix m;
  m.corner = "feature_id";
  const int rows = 23, cols = 7;
  m.values.resize(rows, cols);
  rng::stream st(99, 0);
  for (int i = 0; i < rows; ++i) {
    m.row_ids.push_back("g" + std::to_string(i + 1));
    for (int j = 0; j < cols; ++j) {
      // Mix scales and signs; include exact zeros and denormal-adjacent
      // values where %.17g round-tripping is most fragile.
      const double u = st.uniform(static_cast<std::uint64_t>(i * cols + j));
      double v = (u - 0.5) * std::pow(10.0, (i + j) % 17 - 8);
      if ((i * cols + j) % 11 == 0) v = 0.0;
      if ((i * cols + j) % 13 == 0) v = -v;
      m.values(i, j) = v;
    }
  }
  for (int j = 0; j < cols; ++j) m.col_ids.push_back("s" + std::to_string(j));

  const std::string path = temp_path("confadj_roundtrip.tsv");
  write_matrix(path, m);
  const labeled_matrix back = read_matrix(path);
  REQUIRE(back.corner == m.corner);
  REQUIRE(back.row_ids == m.row_ids);
  REQUIRE(back.col_ids == m.col_ids);
  REQUIRE((back.values.array() == m.values.array()).all());

  // Writing the re-read table reproduces the file bytes exactly.
  const std::string path2 = temp_path("confadj_roundtrip2.tsv");
  write_matrix(path2, back);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  REQUIRE(sa.str() == sb.str());
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("transpose swaps labels and values", "[table]") {
  labeled_matrix m;
  m.corner = "id";
  m.values.resize(2, 3);
  m.values << 1, 2, 3, 4, 5, 6;
  m.row_ids = {"a", "b"};
  m.col_ids = {"x", "y", "z"};
  const labeled_matrix t = m.transposed();
  REQUIRE(t.values.rows() == 3);
  REQUIRE(t.row_ids == m.col_ids);
  REQUIRE(t.col_ids == m.row_ids);
  REQUIRE(t.values(2, 1) == 6.0);
}

TEST_CASE("write_matrix rejects mismatched labels", "[table]") {
  labeled_matrix m;
  m.values.resize(2, 2);
  m.values.setZero();
  m.row_ids = {"a"};
  m.col_ids = {"x", "y"};
  REQUIRE_THROWS_AS(write_matrix(temp_path("confadj_bad.tsv"), m), error);
}
