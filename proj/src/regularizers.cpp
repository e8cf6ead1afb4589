#include "tam/regularizers.hpp"

#include <algorithm>
#include <cmath>

#include "tam/dense_linalg.hpp"
#include "tam/errors.hpp"
#include "tam/kernels.hpp"

namespace tam {

IncoherenceParams::IncoherenceParams(double mu0_, int k_, int n_)
    : mu0(mu0_), k(k_), n(n_) {
  if (!(mu0 >= 1.0) || k < 1 || n < 1)
    throw InvalidParameterError("IncoherenceParams: need mu0 >= 1, k >= 1, n >= 1");
  if (mu0 * k > n)
    throw InvalidParameterError("IncoherenceParams: mu0*k > n makes the row bound vacuous");
}

void truncate_row_inplace(double* u, int k, const IncoherenceParams& p) {
  const double nsq = kernels::sumsq(u, static_cast<size_t>(k));
  const double tsq = p.target_sq();
  if (nsq >= 4.0 * tsq)
    kernels::scale(u, static_cast<size_t>(k), std::sqrt(tsq) / std::sqrt(nsq));
}

std::vector<double> truncate_row(const std::vector<double>& u, const IncoherenceParams& p) {
  std::vector<double> out = u;
  truncate_row_inplace(out.data(), static_cast<int>(out.size()), p);
  return out;
}

Matrix truncate_rows(const Matrix& u, const IncoherenceParams& p) {
  Matrix out = u;
  for (int i = 0; i < out.rows(); ++i)
    truncate_row_inplace(out.row(i), out.cols(), p);
  return out;
}

Matrix clamp_spectrum(const Matrix& a, double alpha, int n) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InvalidParameterError("clamp_spectrum: need a in (0, 1)");
  if (n < 1) throw InvalidParameterError("clamp_spectrum: need n >= 1");
  const int d = a.rows(), k = a.cols();
  const double scale = std::sqrt(static_cast<double>(d) / n);
  const double lo = std::sqrt(alpha), hi = std::sqrt(2.0 - alpha);

  SmallSvd svd = small_svd(a);
  const int m = static_cast<int>(svd.s.size());
  std::vector<double> clamped(m);
  for (int l = 0; l < m; ++l)
    clamped[l] = std::clamp(svd.s[l] / scale, lo, hi) * scale;

  Matrix out(d, k);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (int l = 0; l < m; ++l) s += svd.u(i, l) * clamped[l] * svd.v(j, l);
      out(i, j) = s;
    }
  return out;
}

Matrix truncate_and_orthonormalize(const Matrix& ubar, const IncoherenceParams& p) {
  ThinQr qr = thin_qr(truncate_rows(ubar, p));
  if (qr.rank_deficient)
    throw DegenerateTruncationError(
        "truncate_and_orthonormalize: row truncation destroyed numerical rank");
  return qr.q;
}

}  // namespace tam
