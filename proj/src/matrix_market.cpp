#include "sdyn/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sdyn {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::string fmt17(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

SquareMat read_matrix_market(std::istream& in, const std::string& what) {
    std::string line;
    if (!std::getline(in, line))
        throw MatrixMarketError(what + ": empty file");

    std::istringstream header(line);
    std::string banner, object, format, field, symmetry;
    header >> banner >> object >> format >> field >> symmetry;
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw MatrixMarketError(what + ": malformed MatrixMarket header");
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (format != "coordinate" && format != "array")
        throw MatrixMarketError(what + ": unsupported format '" + format + "'");
    if (field != "real")
        throw MatrixMarketError(what + ": only real matrices are supported, got '" +
                                field + "'");
    if (symmetry != "general" && symmetry != "symmetric")
        throw MatrixMarketError(what + ": unsupported symmetry '" + symmetry + "'");
    const bool symmetric = symmetry == "symmetric";

    // skip comments and blank lines
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '%') break;
    }
    std::istringstream size_line(line);

    if (format == "array") {
        long rows = 0, cols = 0;
        if (!(size_line >> rows >> cols))
            throw MatrixMarketError(what + ": malformed size line");
        if (rows != cols)
            throw MatrixMarketError(what + ": expected a square matrix");
        Mat m(rows, cols);
        // array format is column-major; symmetric files carry the lower triangle
        for (long j = 0; j < cols; ++j) {
            for (long i = symmetric ? j : 0; i < rows; ++i) {
                double v;
                if (!(in >> v))
                    throw MatrixMarketError(what + ": not enough array entries");
                m(i, j) = v;
                if (symmetric) m(j, i) = v;
            }
        }
        return SquareMat(std::move(m));
    }

    long rows = 0, cols = 0, nnz = 0;
    if (!(size_line >> rows >> cols >> nnz))
        throw MatrixMarketError(what + ": malformed size line");
    if (rows != cols)
        throw MatrixMarketError(what + ": expected a square matrix");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(symmetric ? 2 * nnz : nnz);
    for (long k = 0; k < nnz; ++k) {
        long i, j;
        double v;
        if (!(in >> i >> j >> v))
            throw MatrixMarketError(what + ": not enough coordinate entries");
        if (i < 1 || i > rows || j < 1 || j > cols)
            throw MatrixMarketError(what + ": entry index out of range");
        trip.emplace_back(i - 1, j - 1, v);
        if (symmetric && i != j) trip.emplace_back(j - 1, i - 1, v);
    }
    SpMat m(rows, cols);
    m.setFromTriplets(trip.begin(), trip.end());
    return SquareMat(std::move(m));
}

SquareMat load_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MatrixMarketError("cannot open " + path);
    return read_matrix_market(in, path);
}

void write_matrix_market(const SquareMat& m, std::ostream& out) {
    if (m.storage() == Storage::dense) {
        const Mat& d = m.dense();
        out << "%%MatrixMarket matrix array real general\n";
        out << d.rows() << " " << d.cols() << "\n";
        for (Eigen::Index j = 0; j < d.cols(); ++j)
            for (Eigen::Index i = 0; i < d.rows(); ++i)
                out << fmt17(d(i, j)) << "\n";
        return;
    }
    const SpMat& s = m.sparse();
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << s.rows() << " " << s.cols() << " " << s.nonZeros() << "\n";
    for (int k = 0; k < s.outerSize(); ++k)
        for (SpMat::InnerIterator it(s, k); it; ++it)
            out << (it.row() + 1) << " " << (it.col() + 1) << " " << fmt17(it.value())
                << "\n";
}

void save_matrix_market(const SquareMat& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MatrixMarketError("cannot open " + path + " for writing");
    write_matrix_market(m, out);
}

}  // namespace sdyn
