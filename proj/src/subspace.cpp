#include "tam/subspace.hpp"

#include <algorithm>
#include <cmath>

#include "tam/dense_linalg.hpp"
#include "tam/errors.hpp"

namespace tam {
namespace {

Matrix orthonormal_basis(const Matrix& x, bool assume_orthonormal) {
  if (assume_orthonormal || is_orthonormal(x)) return x;
  ThinQr qr = thin_qr(x);
  if (qr.rank_deficient)
    throw InvalidSubspaceError("subspace_dist: input does not span a full-rank subspace");
  return qr.q;
}

}  // namespace

double subspace_dist(const Matrix& x, const Matrix& y, bool assume_orthonormal) {
  if (x.rows() != y.rows() || x.cols() != y.cols())
    throw InvalidParameterError("subspace_dist: shape mismatch");
  Matrix xh = orthonormal_basis(x, assume_orthonormal);
  Matrix yh = orthonormal_basis(y, assume_orthonormal);
  Matrix g = gram(xh, yh);
  const double smin = std::min(1.0, sigma_min(g));
  const double dist = std::sqrt(std::max(0.0, 1.0 - smin * smin));
  if (dist >= 1e-6) return dist;
  // Near-identical subspaces: 1 - smin^2 cancels to round-off. The residual
  // form ||Yhat - Xhat (Xhat^T Yhat)||_2 equals the same distance and stays
  // accurate down to machine zero (still O(n k^2), no complement needed).
  const int n = xh.rows(), k = xh.cols();
  Matrix resid(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) {
      double s = yh(i, j);
      for (int l = 0; l < k; ++l) s -= xh(i, l) * g(l, j);
      resid(i, j) = s;
    }
  return spectral_norm(resid);
}

Matrix align_rotation(const Matrix& ustar, const Matrix& ut) {
  if (ustar.rows() != ut.rows() || ustar.cols() != ut.cols())
    throw InvalidParameterError("align_rotation: shape mismatch");
  SmallSvd svd = small_svd(gram(ustar, ut));
  return matmul(svd.v, transpose(svd.u));
}

}  // namespace tam
