#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tam/errors.hpp"
#include "tam/matrix.hpp"
#include "tam/rng.hpp"

namespace tam {

// Compressed sparse rows. Column indices are sorted within each row;
// absent entries are structural zeros.
struct CsrMatrix {
  int rows = 0, cols = 0;
  std::vector<int64_t> rowptr;  // rows + 1
  std::vector<int32_t> colidx;
  std::vector<double> values;

  int64_t nnz() const { return static_cast<int64_t>(values.size()); }
  double at(int i, int j) const;

  // y = A x
  void multiply(const double* x, double* y) const;
  CsrMatrix transposed() const;
  Matrix dense() const;
};

struct TruncatedSvd {
  Matrix u;               // n x k
  std::vector<double> s;  // k, descending
  Matrix v;               // n x k
  int sweeps = 0;
  double residual = 0.0;  // ||A^T u_i - s_i v_i|| over the k kept triplets
};

// Top-k singular triplets of a sparse matrix by randomized block power
// iteration (block size 2k, re-orthonormalized after each of the two
// half-multiplies per sweep; cost O(k nnz) per sweep). The starting block
// contains the normalized all-ones vector plus seeded Gaussian columns, so
// matrices whose top singular vector is flat converge immediately.
// Convergence: the Ritz triplets from the A-side satisfy A v_i = s_i u_i by
// construction, so the residual is measured on the transposed side and must
// reach tol * s[0]. Throws ConvergenceError after max_iter sweeps; the best
// iterate is still available through the exception payload.
TruncatedSvd truncated_svd_sparse(const CsrMatrix& a, int k, double tol,
                                  int max_iter, Rng& rng);

// ConvergenceError carrying the best iterate seen.
class SvdConvergenceError : public ConvergenceError {
 public:
  SvdConvergenceError(const std::string& msg, TruncatedSvd best)
      : ConvergenceError(msg), best_(std::move(best)) {}
  const TruncatedSvd& best() const { return best_; }

 private:
  TruncatedSvd best_;
};

}  // namespace tam
