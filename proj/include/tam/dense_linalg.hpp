#pragma once

#include <vector>

#include "tam/matrix.hpp"

namespace tam {

struct ThinQr {
  Matrix q;             // n x k, orthonormal columns
  Matrix r;             // k x k upper triangular, nonnegative diagonal
  bool rank_deficient;  // some |r_jj| < 1e-12 * ||A||_F
};

// Householder thin QR with the nonnegative-diagonal sign convention (fixes
// the orthonormal basis deterministically). Requires rows >= cols.
// Rank deficiency sets the flag; it is not an error here.
ThinQr thin_qr(const Matrix& a);

struct SmallSvd {
  Matrix u;               // rows x m
  std::vector<double> s;  // m, descending, >= 0
  Matrix v;               // cols x m
};

// Full thin SVD (m = min(rows, cols)) by one-sided Jacobi. Deterministic
// conventions: singular values descending; each left singular vector has its
// largest-magnitude entry positive (first index on ties); null directions are
// completed from identity columns, so the SVD of a zero matrix is
// (I[:, :m], 0, I).
SmallSvd small_svd(const Matrix& a);

double spectral_norm(const Matrix& a);
double sigma_min(const Matrix& a);

struct SymEig {
  std::vector<double> values;  // descending
  Matrix vectors;              // columns are eigenvectors
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymEig sym_eig(const Matrix& a);
// Eigenvalues only (same algorithm, skips accumulating vectors).
std::vector<double> sym_eigvals(const Matrix& a);

// Solves G x = b for symmetric positive definite G via Cholesky.
// Throws InternalError if G is not numerically positive definite.
std::vector<double> spd_solve(const Matrix& g, const std::vector<double>& b);

}  // namespace tam
