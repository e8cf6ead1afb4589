#include "tam/dense_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tam/errors.hpp"
#include "tam/kernels.hpp"

namespace tam {
namespace {

// Column-major scratch so Householder/Jacobi column ops run contiguously
// through the dot/axpy kernels.
struct ColMat {
  int rows = 0, cols = 0;
  std::vector<double> a;
  ColMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
  explicit ColMat(const Matrix& m) : ColMat(m.rows(), m.cols()) {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) col(j)[i] = m(i, j);
  }
  static ColMat identity(int r, int c) {
    ColMat m(r, c);
    for (int j = 0; j < c && j < r; ++j) m.col(j)[j] = 1.0;
    return m;
  }
  double* col(int j) { return a.data() + static_cast<size_t>(j) * rows; }
  const double* col(int j) const { return a.data() + static_cast<size_t>(j) * rows; }
  Matrix to_matrix() const {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = col(j)[i];
    return m;
  }
};

void rotate_cols(double* x, double* y, int len, double c, double s) {
  for (int i = 0; i < len; ++i) {
    const double xi = x[i], yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

}  // namespace

ThinQr thin_qr(const Matrix& input) {
  const int n = input.rows(), k = input.cols();
  if (n < k || k == 0) throw InvalidParameterError("thin_qr: need rows >= cols >= 1");
  const double anorm = frobenius_norm(input);

  ColMat w(input);          // becomes R in its upper triangle
  ColMat refl(n, k);        // Householder vectors, column j lives in rows j..n-1
  std::vector<double> tau(k, 0.0);

  for (int j = 0; j < k; ++j) {
    double* x = w.col(j) + j;
    const size_t len = static_cast<size_t>(n - j);
    const double normx = std::sqrt(kernels::sumsq(x, len));
    if (normx > 0.0) {
      const double alpha = x[0] >= 0.0 ? -normx : normx;
      double* v = refl.col(j) + j;
      std::copy(x, x + len, v);
      v[0] -= alpha;
      const double vsq = kernels::sumsq(v, len);
      tau[j] = vsq > 0.0 ? 2.0 / vsq : 0.0;
      for (int c = j; c < k; ++c) {
        double* xc = w.col(c) + j;
        const double proj = tau[j] * kernels::dot(v, xc, len);
        kernels::axpy(-proj, v, xc, len);
      }
    }
    for (int i = j + 1; i < n; ++i) w.col(j)[i] = 0.0;  // exact zeros below R
  }

  // Back-accumulate Q from the reflectors.
  ColMat q = ColMat::identity(n, k);
  for (int j = k - 1; j >= 0; --j) {
    if (tau[j] == 0.0) continue;
    const double* v = refl.col(j) + j;
    const size_t len = static_cast<size_t>(n - j);
    for (int c = 0; c < k; ++c) {
      double* qc = q.col(c) + j;
      const double proj = tau[j] * kernels::dot(v, qc, len);
      kernels::axpy(-proj, v, qc, len);
    }
  }

  ThinQr out;
  out.r = Matrix(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j) out.r(i, j) = w.col(j)[i];

  // Sign convention: nonnegative R diagonal.
  for (int j = 0; j < k; ++j) {
    if (out.r(j, j) < 0.0) {
      for (int c = j; c < k; ++c) out.r(j, c) = -out.r(j, c);
      kernels::scale(q.col(j), static_cast<size_t>(n), -1.0);
    }
  }
  out.q = q.to_matrix();
  out.rank_deficient = false;
  for (int j = 0; j < k; ++j)
    if (std::fabs(out.r(j, j)) <= 1e-12 * anorm) out.rank_deficient = true;
  return out;
}

namespace {

// Largest-magnitude entry of each left singular vector made positive (first
// index on ties); the matching right vector flips with it.
void apply_sign_convention(SmallSvd& svd) {
  const int r = svd.u.rows(), c = svd.v.rows();
  for (size_t o = 0; o < svd.s.size(); ++o) {
    int imax = 0;
    for (int i = 1; i < r; ++i)
      if (std::fabs(svd.u(i, o)) > std::fabs(svd.u(imax, o))) imax = i;
    if (svd.u(imax, o) < 0.0) {
      for (int i = 0; i < r; ++i) svd.u(i, o) = -svd.u(i, o);
      for (int i = 0; i < c; ++i) svd.v(i, o) = -svd.v(i, o);
    }
  }
}

SmallSvd small_svd_tall(const Matrix& a);

}  // namespace

SmallSvd small_svd(const Matrix& a) {
  const int r = a.rows(), c = a.cols();
  if (r == 0 || c == 0) throw InvalidParameterError("small_svd: empty matrix");
  SmallSvd out;
  if (r < c) {
    SmallSvd t = small_svd_tall(transpose(a));
    out = SmallSvd{std::move(t.v), std::move(t.s), std::move(t.u)};
  } else {
    out = small_svd_tall(a);
  }
  apply_sign_convention(out);
  return out;
}

namespace {

SmallSvd small_svd_tall(const Matrix& a) {
  const int r = a.rows(), c = a.cols();

  ColMat w(a);
  ColMat v = ColMat::identity(c, c);

  constexpr int kMaxSweeps = 64;
  constexpr double kOrthTol = 1e-15;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (int p = 0; p < c - 1; ++p) {
      for (int q = p + 1; q < c; ++q) {
        double* wp = w.col(p);
        double* wq = w.col(q);
        const double ap = kernels::sumsq(wp, r);
        const double aq = kernels::sumsq(wq, r);
        if (ap == 0.0 || aq == 0.0) continue;
        const double g = kernels::dot(wp, wq, r);
        if (std::fabs(g) <= kOrthTol * std::sqrt(ap) * std::sqrt(aq)) continue;
        const double zeta = (aq - ap) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        rotate_cols(wp, wq, r, cs, sn);
        rotate_cols(v.col(p), v.col(q), c, cs, sn);
        rotated = true;
      }
    }
    if (!rotated) break;
  }

  std::vector<double> sigma(c);
  for (int j = 0; j < c; ++j) sigma[j] = std::sqrt(kernels::sumsq(w.col(j), r));
  std::vector<int> order(c);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return sigma[i] > sigma[j]; });
  const double smax = sigma[order[0]];

  SmallSvd out;
  out.s.resize(c);
  out.u = Matrix(r, c);
  out.v = Matrix(c, c);
  ColMat u(r, c);
  std::vector<int> null_slots;
  for (int o = 0; o < c; ++o) {
    const int j = order[o];
    out.s[o] = sigma[j];
    for (int i = 0; i < c; ++i) out.v(i, o) = v.col(j)[i];
    if (sigma[j] > smax * 1e-14 && sigma[j] > 0.0) {
      const double inv = 1.0 / sigma[j];
      for (int i = 0; i < r; ++i) u.col(o)[i] = w.col(j)[i] * inv;
    } else {
      null_slots.push_back(o);
    }
  }

  // Complete null directions deterministically from identity columns: pick
  // the coordinate axis with the largest residual against the established
  // basis, Gram-Schmidt twice, normalize.
  // Columns for null slots not yet filled are all zero, so projecting a
  // candidate against every column but the current slot is a no-op for them.
  for (int slot : null_slots) {
    std::vector<double> best;
    double best_res = -1.0;
    for (int m = 0; m < r; ++m) {
      std::vector<double> cand(r, 0.0);
      cand[m] = 1.0;
      for (int o = 0; o < c; ++o) {
        if (o == slot) continue;
        const double proj = kernels::dot(u.col(o), cand.data(), r);
        kernels::axpy(-proj, u.col(o), cand.data(), r);
      }
      const double res = kernels::sumsq(cand.data(), r);
      if (res > best_res + 1e-12) {
        best_res = res;
        best = cand;
      }
    }
    // Second orthogonalization pass, then normalize.
    for (int o = 0; o < c; ++o) {
      if (o == slot) continue;
      const double proj = kernels::dot(u.col(o), best.data(), r);
      kernels::axpy(-proj, u.col(o), best.data(), r);
    }
    const double nrm = std::sqrt(kernels::sumsq(best.data(), r));
    for (int i = 0; i < r; ++i) u.col(slot)[i] = best[i] / nrm;
  }

  out.u = u.to_matrix();
  return out;
}

}  // namespace

double spectral_norm(const Matrix& a) { return small_svd(a).s.front(); }

double sigma_min(const Matrix& a) { return small_svd(a).s.back(); }

namespace {

SymEig sym_eig_impl(const Matrix& input, bool want_vectors) {
  const int n = input.rows();
  if (n != input.cols()) throw InvalidParameterError("sym_eig: not square");
  Matrix a = input;
  ColMat v = ColMat::identity(n, n);

  const double fro = frobenius_norm(input);
  const double stop = 1e-15 * (fro > 0 ? fro : 1.0);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(2.0 * off) <= stop) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;
        const double app = a(p, p), aqq = a(q, q);
        for (int r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = a(p, r) = cs * arp - sn * arq;
          a(r, q) = a(q, r) = sn * arp + cs * arq;
        }
        a(p, p) = cs * cs * app - 2.0 * cs * sn * apq + sn * sn * aqq;
        a(q, q) = sn * sn * app + 2.0 * cs * sn * apq + cs * cs * aqq;
        a(p, q) = a(q, p) = 0.0;
        if (want_vectors) rotate_cols(v.col(p), v.col(q), n, cs, sn);
      }
    }
  }

  SymEig out;
  out.values.resize(n);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i) > a(j, j); });
  for (int o = 0; o < n; ++o) out.values[o] = a(order[o], order[o]);
  if (want_vectors) {
    out.vectors = Matrix(n, n);
    for (int o = 0; o < n; ++o)
      for (int i = 0; i < n; ++i) out.vectors(i, o) = v.col(order[o])[i];
  }
  return out;
}

}  // namespace

SymEig sym_eig(const Matrix& a) { return sym_eig_impl(a, true); }

std::vector<double> sym_eigvals(const Matrix& a) { return sym_eig_impl(a, false).values; }

std::vector<double> spd_solve(const Matrix& g, const std::vector<double>& b) {
  const int n = g.rows();
  if (g.cols() != n || static_cast<int>(b.size()) != n)
    throw InvalidParameterError("spd_solve: shape mismatch");
  Matrix l(n, n);
  for (int j = 0; j < n; ++j) {
    double d = g(j, j);
    for (int m = 0; m < j; ++m) d -= l(j, m) * l(j, m);
    if (!(d > 0.0))
      throw InternalError("spd_solve: matrix not positive definite");
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = g(i, j);
      for (int m = 0; m < j; ++m) s -= l(i, m) * l(j, m);
      l(i, j) = s / l(j, j);
    }
  }
  std::vector<double> y(n), x(n);
  for (int i = 0; i < n; ++i) {
    double s = b[i];
    for (int m = 0; m < i; ++m) s -= l(i, m) * y[m];
    y[i] = s / l(i, i);
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = y[i];
    for (int m = i + 1; m < n; ++m) s -= l(m, i) * x[m];
    x[i] = s / l(i, i);
  }
  return x;
}

}  // namespace tam
