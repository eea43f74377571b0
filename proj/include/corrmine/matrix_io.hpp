#pragma once
// Data-matrix and square-matrix file formats.
//
// CSV: rows are samples, one line per row, comma-separated, optional
// single header line (detected: any unparsable first-line token).
// Binary "CMX1": magic bytes 'C''M''X''1', then u32 row count, u32
// column count, then row-major float64, all little-endian.

#include <bit>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace corrmine {

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

using Matrix = Eigen::MatrixXd;

namespace detail {

inline bool parse_double(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    if (end == begin) return false;
    while (*end) {
        if (!std::isspace(static_cast<unsigned char>(*end))) return false;
        ++end;
    }
    return true;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

} // namespace detail

inline Matrix read_csv_matrix(std::istream& in, const std::string& name = "<stream>") {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
        if (blank) continue;
        const auto toks = detail::split_csv_line(line);
        std::vector<double> vals(toks.size());
        bool ok = true;
        for (std::size_t j = 0; j < toks.size(); ++j)
            if (!detail::parse_double(toks[j], vals[j])) { ok = false; break; }
        if (!ok) {
            if (!header_checked && rows.empty()) { header_checked = true; continue; }
            throw std::runtime_error(name + ":" + std::to_string(lineno) + ": unparsable numeric field");
        }
        header_checked = true;
        if (!rows.empty() && vals.size() != rows.front().size())
            throw std::runtime_error(name + ":" + std::to_string(lineno) + ": ragged row (expected "
                                     + std::to_string(rows.front().size()) + " fields, got "
                                     + std::to_string(vals.size()) + ")");
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error(name + ": no numeric rows");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

inline Matrix read_csv_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_csv_matrix(in, path);
}

inline void write_csv_matrix(std::ostream& out, const Matrix& m) {
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

inline void write_csv_matrix_file(const std::string& path, const Matrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv_matrix(out, m);
}

inline void write_cmx(std::ostream& out, const Matrix& m) {
    const char magic[4] = {'C', 'M', 'X', '1'};
    out.write(magic, 4);
    const std::uint32_t n = static_cast<std::uint32_t>(m.rows());
    const std::uint32_t p = static_cast<std::uint32_t>(m.cols());
    out.write(reinterpret_cast<const char*>(&n), 4);
    out.write(reinterpret_cast<const char*>(&p), 4);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            const double v = m(i, j);
            out.write(reinterpret_cast<const char*>(&v), 8);
        }
    if (!out) throw std::runtime_error("binary matrix write failed");
}

inline void write_cmx_file(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    write_cmx(out, m);
}

inline Matrix read_cmx(std::istream& in, const std::string& name = "<stream>") {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "CMX1", 4) != 0)
        throw std::runtime_error(name + ": bad magic (expected CMX1)");
    std::uint32_t n = 0, p = 0;
    if (!in.read(reinterpret_cast<char*>(&n), 4) || !in.read(reinterpret_cast<char*>(&p), 4))
        throw std::runtime_error(name + ": truncated header");
    if (n == 0 || p == 0 || static_cast<std::uint64_t>(n) * p > (1ull << 32))
        throw std::runtime_error(name + ": implausible dimensions");
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t j = 0; j < p; ++j) {
            double v;
            if (!in.read(reinterpret_cast<char*>(&v), 8))
                throw std::runtime_error(name + ": truncated payload");
            m(i, j) = v;
        }
    return m;
}

inline Matrix read_cmx_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_cmx(in, path);
}

// Reads either format, keyed by a .cmx extension; everything else is CSV.
inline Matrix read_matrix_auto(const std::string& path) {
    if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".cmx") == 0)
        return read_cmx_file(path);
    return read_csv_matrix_file(path);
}

} // namespace corrmine
