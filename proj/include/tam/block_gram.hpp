#pragma once

#include <cstdint>
#include <vector>

#include "tam/dense_linalg.hpp"
#include "tam/matrix.hpp"

// Shared per-column machinery: the spectrum decision made here drives both
// the solver loop and the error-term diagnostics, so the arithmetic must be
// identical in both places.
namespace tam {

inline void gather_rows_into(const Matrix& w, const int32_t* idx, int count, Matrix& out) {
  for (int r = 0; r < count; ++r) {
    const double* src = w.row(idx[r]);
    double* dst = out.row(r);
    for (int c = 0; c < w.cols(); ++c) dst[c] = src[c];
  }
}

inline Matrix gather_rows(const Matrix& w, const int32_t* idx, int count) {
  Matrix block(count, w.cols());
  gather_rows_into(w, idx, count, block);
  return block;
}

// B^T B for a gathered d x k block.
inline void neighbor_gram_into(const Matrix& block, Matrix& g) {
  const int d = block.rows(), k = block.cols();
  for (int a = 0; a < k; ++a)
    for (int b = a; b < k; ++b) {
      double s = 0.0;
      for (int r = 0; r < d; ++r) s += block(r, a) * block(r, b);
      g(a, b) = g(b, a) = s;
    }
}

inline Matrix neighbor_gram(const Matrix& block) {
  Matrix g(block.cols(), block.cols());
  neighbor_gram_into(block, g);
  return g;
}

// Eigenvalues of (n/d) G, descending: the normalized Gramian spectrum tested
// against [beta, 2 - beta].
inline std::vector<double> normalized_spectrum(const Matrix& gram, int n, int d) {
  const double scale = static_cast<double>(n) / d;
  Matrix g = gram;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j) g(i, j) *= scale;
  return sym_eigvals(g);
}

inline bool spectrum_in_band(const std::vector<double>& lam, double beta) {
  for (double l : lam)
    if (l < beta || l > 2.0 - beta) return false;
  return true;
}

}  // namespace tam
