#pragma once

#include <vector>

#include "tam/matrix.hpp"

namespace tam {

// Incoherence budget mu0 for rank-k factors in dimension n: target row
// norm is sqrt(mu0 k / n), truncation threshold twice that.
struct IncoherenceParams {
  double mu0;
  int k;
  int n;

  IncoherenceParams(double mu0_, int k_, int n_);
  double target_sq() const { return mu0 * k / static_cast<double>(n); }
};

// Row rescaling: a row of squared length >= 4 mu0 k / n is rescaled to
// length sqrt(mu0 k / n) (boundary included); shorter rows pass through.
void truncate_row_inplace(double* u, int k, const IncoherenceParams& p);
std::vector<double> truncate_row(const std::vector<double>& u, const IncoherenceParams& p);
Matrix truncate_rows(const Matrix& u, const IncoherenceParams& p);

// Spectrum clamping for a d x k block sampled from an n-dimensional factor:
// singular values are normalized by sqrt(d/n), clamped into
// [sqrt(a), sqrt(2-a)], and the block is rebuilt with the same singular
// vectors. Null directions get the lifted value; their vectors follow
// small_svd's deterministic completion.
Matrix clamp_spectrum(const Matrix& a, double alpha, int n);

// Row truncation followed by re-orthonormalization (thin QR). Throws
// DegenerateTruncationError when truncation destroys numerical rank.
Matrix truncate_and_orthonormalize(const Matrix& ubar, const IncoherenceParams& p);

}  // namespace tam
