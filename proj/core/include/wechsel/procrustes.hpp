#pragma once

#include <cstddef>
#include <vector>

#include "wechsel/matrix.hpp"
#include "wechsel/vectors_io.hpp"

namespace wechsel {

struct SvdResult {
    MatD u;                     // n x r, orthonormal columns
    std::vector<double> sigma;  // r, non-negative, descending
    MatD v;                     // m x r, orthonormal columns
    int sweeps = 0;
};

// Thin SVD by one-sided cyclic Jacobi (r = min(n, m)). Converges when every
// off-diagonal rotation in a sweep falls below `tol` relative; throws
// ConvergenceError past `max_sweeps`.
SvdResult svd(const MatD& a, int max_sweeps = 100, double tol = 1e-12);

// Row-acting rotation: y = x * R.
struct OrthogonalMap {
    MatD rotation;

    std::size_t dim() const { return rotation.rows(); }
};

struct ProcrustesFit {
    OrthogonalMap map;
    bool underdetermined = false;  // fewer pairs than dimensions
    bool rank_deficient = false;   // cross-covariance not full rank; R not unique
};

// Closed-form orthogonal Procrustes: R = U V^T from SVD(X^T Y), minimizing
// ||X R - Y||_F. Rows of X and Y are paired observations.
ProcrustesFit fit_procrustes(const MatD& x, const MatD& y);

struct DictionaryMatrices {
    MatD x;  // unit-normalized target vectors
    MatD y;  // unit-normalized source vectors
    std::size_t used = 0;
    std::size_t skipped_oov = 0;
    std::size_t skipped_zero_norm = 0;
};

// Harvest rows for fit_procrustes from dictionary pairs present in both
// vocabularies. Duplicate pairs contribute duplicate rows. With `casefold`,
// lookups fall back to an ASCII-lowercased index (first occurrence wins).
DictionaryMatrices build_dictionary_matrices(const WordVectors& src, const WordVectors& tgt,
                                             const BilingualDictionary& dict,
                                             bool casefold = false);

// Rotate every word vector: row -> row * R. float64 math, float32 storage.
WordVectors apply_map(const WordVectors& vectors, const OrthogonalMap& map);

// In-place variant for any float matrix with matching column count.
void apply_map_rows(MatF& rows, const OrthogonalMap& map);

}  // namespace wechsel
