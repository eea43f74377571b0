#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "corrmine/matrix_io.hpp"
#include "corrmine/rng.hpp"

using corrmine::Matrix;

namespace {

// Temporary file path helper; files are removed by each test.
std::string temp_path(const std::string& name) {
    return std::string("io_test_") + name;
}

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
    corrmine::CounterRng rng(seed, 0);
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.next_normal();
    return m;
}

} // namespace

TEST_CASE("csv round trip preserves doubles exactly") {
    const Matrix m = random_matrix(7, 5, 21);
    std::stringstream ss;
    corrmine::write_csv_matrix(ss, m);
    const Matrix back = corrmine::read_csv_matrix(ss);
    REQUIRE(back.rows() == m.rows());
    REQUIRE(back.cols() == m.cols());
    REQUIRE((back.array() == m.array()).all());
}

TEST_CASE("csv reader tolerates a header row") {
    std::stringstream ss("a,b,c\n1,2,3\n4,5,6\n");
    const Matrix m = corrmine::read_csv_matrix(ss);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 3);
    REQUIRE(m(1, 2) == 6.0);
}

TEST_CASE("csv reader rejects ragged rows and junk") {
    std::stringstream ragged("1,2,3\n4,5\n");
    REQUIRE_THROWS(corrmine::read_csv_matrix(ragged));
    std::stringstream junk("1,2\n3,potato\n");
    REQUIRE_THROWS(corrmine::read_csv_matrix(junk));
    std::stringstream empty("");
    REQUIRE_THROWS(corrmine::read_csv_matrix(empty));
}

TEST_CASE("binary matrix round trip") {
    const Matrix m = random_matrix(9, 4, 22);
    std::stringstream ss;
    corrmine::write_cmx(ss, m);
    const Matrix back = corrmine::read_cmx(ss);
    REQUIRE(back.rows() == 9);
    REQUIRE(back.cols() == 4);
    REQUIRE((back.array() == m.array()).all());
}

TEST_CASE("binary reader rejects bad magic and truncation") {
    std::stringstream bad("NOPE.....................");
    REQUIRE_THROWS(corrmine::read_cmx(bad));
    const Matrix m = random_matrix(3, 3, 23);
    std::stringstream ss;
    corrmine::write_cmx(ss, m);
    std::string buf = ss.str();
    buf.resize(buf.size() - 5);
    std::stringstream cut(buf);
    REQUIRE_THROWS(corrmine::read_cmx(cut));
}

TEST_CASE("extension controls the automatic reader") {
    const Matrix m = random_matrix(4, 6, 24);
    const std::string p_csv = temp_path("auto.csv");
    const std::string p_cmx = temp_path("auto.cmx");
    corrmine::write_csv_matrix_file(p_csv, m);
    corrmine::write_cmx_file(p_cmx, m);
    const Matrix a = corrmine::read_matrix_auto(p_csv);
    const Matrix b = corrmine::read_matrix_auto(p_cmx);
    REQUIRE((a.array() == m.array()).all());
    REQUIRE((b.array() == m.array()).all());
    std::remove(p_csv.c_str());
    std::remove(p_cmx.c_str());
    REQUIRE_THROWS(corrmine::read_matrix_auto("definitely_missing_file.csv"));
}
