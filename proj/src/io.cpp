#include "krydom/io.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace krydom::io {

namespace {

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open file for reading: " + path);
    return in;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Matrix read_matrix_market(const std::string& path) {
    std::ifstream in = open_in(path);

    std::string header;
    if (!std::getline(in, header)) throw InvalidArgument("empty matrix market file: " + path);
    std::istringstream hs(header);
    std::string banner, object, format, field, symmetry;
    hs >> banner >> object >> format >> field >> symmetry;
    if (lower(banner) != "%%matrixmarket" || lower(object) != "matrix") {
        throw InvalidArgument("not a matrix market file: " + path);
    }
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (field != "real" && field != "integer" && field != "double") {
        throw InvalidArgument("unsupported matrix market field '" + field + "': " + path);
    }
    if (symmetry != "general" && symmetry != "symmetric") {
        throw InvalidArgument("unsupported matrix market symmetry '" + symmetry + "': " + path);
    }

    std::string line;
    auto next_data_line = [&](std::string& out) {
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            if (line[0] == '%') continue;
            out = line;
            return true;
        }
        return false;
    };

    std::string sizeLine;
    if (!next_data_line(sizeLine)) throw InvalidArgument("missing size line: " + path);
    std::istringstream ss(sizeLine);

    if (format == "array") {
        Index m = 0, n = 0;
        ss >> m >> n;
        if (m < 1 || n < 1) throw InvalidArgument("bad dimensions in " + path);
        Matrix A(m, n);
        // column-major entry order
        for (Index j = 0; j < n; ++j) {
            const Index iStart = (symmetry == "symmetric") ? j : 0;
            for (Index i = iStart; i < m; ++i) {
                std::string tok;
                if (!(in >> tok)) throw InvalidArgument("truncated array data: " + path);
                A(i, j) = std::strtod(tok.c_str(), nullptr);
                if (symmetry == "symmetric") A(j, i) = A(i, j);
            }
        }
        return A;
    }

    if (format == "coordinate") {
        Index m = 0, n = 0;
        long long nnz = 0;
        ss >> m >> n >> nnz;
        if (m < 1 || n < 1 || nnz < 0) throw InvalidArgument("bad dimensions in " + path);
        Matrix A = Matrix::Zero(m, n);
        for (long long e = 0; e < nnz; ++e) {
            Index i = 0, j = 0;
            std::string tok;
            if (!(in >> i >> j >> tok)) throw InvalidArgument("truncated coordinate data: " + path);
            if (i < 1 || i > m || j < 1 || j > n) throw InvalidArgument("entry out of range: " + path);
            const double v = std::strtod(tok.c_str(), nullptr);
            A(i - 1, j - 1) = v;
            if (symmetry == "symmetric") A(j - 1, i - 1) = v;
        }
        return A;
    }

    throw InvalidArgument("unsupported matrix market format '" + format + "': " + path);
}

void write_matrix_market(const Matrix& A, const std::string& path, MatrixMarketFormat format) {
    require_finite(A, "write_matrix_market");
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot open file for writing: " + path);

    if (format == MatrixMarketFormat::Array) {
        out << "%%MatrixMarket matrix array real general\n";
        out << A.rows() << " " << A.cols() << "\n";
        for (Index j = 0; j < A.cols(); ++j) {
            for (Index i = 0; i < A.rows(); ++i) {
                out << format_double(A(i, j)) << "\n";
            }
        }
    } else {
        Index nnz = 0;
        for (Index j = 0; j < A.cols(); ++j)
            for (Index i = 0; i < A.rows(); ++i)
                if (A(i, j) != 0.0) ++nnz;
        out << "%%MatrixMarket matrix coordinate real general\n";
        out << A.rows() << " " << A.cols() << " " << nnz << "\n";
        for (Index j = 0; j < A.cols(); ++j) {
            for (Index i = 0; i < A.rows(); ++i) {
                if (A(i, j) != 0.0) {
                    out << (i + 1) << " " << (j + 1) << " " << format_double(A(i, j)) << "\n";
                }
            }
        }
    }
    if (!out) throw InvalidArgument("write failed: " + path);
}

Matrix read_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            row.push_back(std::strtod(cell.c_str(), nullptr));
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw InvalidArgument("ragged csv rows in " + path);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidArgument("empty csv file: " + path);
    Matrix A(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j) A(i, j) = rows[i][j];
    return A;
}

}  // namespace krydom::io
