#pragma once

/**
 * @file matrix_market.hpp
 * @brief Matrix Market (NIST) reader and writer for real matrices in
 *        coordinate (sparse) and array (dense) format, general or symmetric.
 *
 * Values are written with 17 significant digits so write/read round-trips
 * reproduce doubles exactly.
 */

#include "sdyn/linalg.hpp"

#include <iosfwd>
#include <string>

namespace sdyn {

struct MatrixMarketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Read a Matrix Market file; symmetric files are expanded to full storage.
/// Coordinate files load as sparse, array files as dense.
SquareMat load_matrix_market(const std::string& path);
SquareMat read_matrix_market(std::istream& in, const std::string& what = "<stream>");

/// Write coordinate format for sparse storage, array format for dense.
void save_matrix_market(const SquareMat& m, const std::string& path);
void write_matrix_market(const SquareMat& m, std::ostream& out);

}  // namespace sdyn
