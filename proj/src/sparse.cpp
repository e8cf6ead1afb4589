#include "tam/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tam/dense_linalg.hpp"
#include "tam/kernels.hpp"

namespace tam {

double CsrMatrix::at(int i, int j) const {
  const int32_t* beg = colidx.data() + rowptr[i];
  const int32_t* end = colidx.data() + rowptr[i + 1];
  const int32_t* it = std::lower_bound(beg, end, j);
  if (it != end && *it == j) return values[it - colidx.data()];
  return 0.0;
}

void CsrMatrix::multiply(const double* x, double* y) const {
  kernels::spmv(rowptr.data(), colidx.data(), values.data(), rows, x, y);
}

CsrMatrix CsrMatrix::transposed() const {
  CsrMatrix t;
  t.rows = cols;
  t.cols = rows;
  t.rowptr.assign(cols + 1, 0);
  for (int32_t c : colidx) ++t.rowptr[c + 1];
  for (int i = 0; i < cols; ++i) t.rowptr[i + 1] += t.rowptr[i];
  t.colidx.resize(colidx.size());
  t.values.resize(values.size());
  std::vector<int64_t> cursor(t.rowptr.begin(), t.rowptr.end() - 1);
  for (int r = 0; r < rows; ++r) {
    for (int64_t p = rowptr[r]; p < rowptr[r + 1]; ++p) {
      const int64_t q = cursor[colidx[p]]++;
      t.colidx[q] = r;
      t.values[q] = values[p];
    }
  }
  return t;
}

Matrix CsrMatrix::dense() const {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int64_t p = rowptr[r]; p < rowptr[r + 1]; ++p) m(r, colidx[p]) = values[p];
  return m;
}

namespace {

// Multiply each column of X (n x p) by A, producing rows(A) x p.
Matrix multiply_block(const CsrMatrix& a, const Matrix& x) {
  Matrix xt = transpose(x);
  Matrix yt(x.cols(), a.rows);
  for (int c = 0; c < x.cols(); ++c) a.multiply(xt.row(c), yt.row(c));
  return transpose(yt);
}

}  // namespace

TruncatedSvd truncated_svd_sparse(const CsrMatrix& a, int k, double tol,
                                  int max_iter, Rng& rng) {
  const int n = a.rows, m = a.cols;
  if (k < 1 || k >= std::min(n, m))
    throw InvalidParameterError("truncated_svd_sparse: need 1 <= k < min(rows, cols)");
  const int p = std::min(2 * k, std::min(n, m));

  CsrMatrix at = a.transposed();

  Matrix block(n, p);
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) block(i, 0) = inv;
  for (int i = 0; i < n; ++i)
    for (int j = 1; j < p; ++j) block(i, j) = rng.normal();
  Matrix u_blk = thin_qr(block).q;

  TruncatedSvd best;
  double best_res = std::numeric_limits<double>::infinity();

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    Matrix v_blk = thin_qr(multiply_block(at, u_blk)).q;
    ThinQr w = thin_qr(multiply_block(a, v_blk));
    u_blk = w.q;
    SmallSvd ritz = small_svd(w.r);  // p x p

    TruncatedSvd cand;
    cand.s.assign(ritz.s.begin(), ritz.s.begin() + k);
    cand.u = Matrix(n, k);
    cand.v = Matrix(m, k);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < k; ++j) {
        double s = 0.0;
        for (int l = 0; l < p; ++l) s += u_blk(i, l) * ritz.u(l, j);
        cand.u(i, j) = s;
      }
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) {
        double s = 0.0;
        for (int l = 0; l < p; ++l) s += v_blk(i, l) * ritz.v(l, j);
        cand.v(i, j) = s;
      }
    cand.sweeps = sweep;

    // A v_i = s_i u_i holds by construction; check the transposed side.
    Matrix atu = multiply_block(at, cand.u);
    double res_sq = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < k; ++j) {
        const double d = atu(i, j) - cand.s[j] * cand.v(i, j);
        res_sq += d * d;
      }
    cand.residual = std::sqrt(res_sq);

    if (cand.residual < best_res) {
      best_res = cand.residual;
      best = cand;
    }
    if (cand.residual <= tol * std::max(cand.s[0], 1e-300)) return cand;
  }
  throw SvdConvergenceError("truncated_svd_sparse: no convergence within max_iter sweeps",
                            std::move(best));
}

}  // namespace tam
