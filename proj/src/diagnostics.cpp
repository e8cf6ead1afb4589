#include "tam/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "tam/block_gram.hpp"
#include "tam/dense_linalg.hpp"
#include "tam/errors.hpp"
#include "tam/kernels.hpp"
#include "tam/subspace.hpp"

namespace tam {
namespace {

constexpr double kPi = 3.14159265358979323846;

// (n/d) B^T B for a gathered block.
Matrix normalized_gram(const Matrix& block, int n) {
  Matrix g = neighbor_gram(block);
  const double scale = static_cast<double>(n) / block.rows();
  for (int a = 0; a < g.rows(); ++a)
    for (int b = 0; b < g.cols(); ++b) g(a, b) *= scale;
  return g;
}

double identity_deviation(const Matrix& g) {
  std::vector<double> lam = sym_eigvals(g);
  double dev = 0.0;
  for (double l : lam) dev = std::max(dev, std::fabs(l - 1.0));
  return dev;
}

}  // namespace

double incoherence_of(const Matrix& w) {
  if (!is_orthonormal(w, 1e-8))
    throw InvalidParameterError("incoherence_of: input is not orthonormal");
  double mx = 0.0;
  for (int i = 0; i < w.rows(); ++i)
    mx = std::max(mx, kernels::sumsq(w.row(i), w.cols()));
  return mx * w.rows() / w.cols();
}

double subset_isometry_test(const Matrix& w, int d, double delta, int trials, Rng& rng) {
  const int n = w.rows();
  if (d < 1 || d > n) throw InvalidParameterError("subset_isometry_test: need 1 <= d <= n");
  if (trials < 1) throw InvalidParameterError("subset_isometry_test: need trials >= 1");
  if (!(delta > 0.0)) throw InvalidParameterError("subset_isometry_test: need delta > 0");

  std::vector<int32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    for (int l = 0; l < d; ++l) {
      const size_t r = l + rng.uniform_index(static_cast<size_t>(n - l));
      std::swap(perm[l], perm[r]);
    }
    Matrix block = gather_rows(w, perm.data(), d);
    if (identity_deviation(normalized_gram(block, n)) > delta) ++failures;
  }
  return static_cast<double>(failures) / trials;
}

BadSetReport bad_set(const Matrix& w, const BipartiteRegularGraph& graph, double beta,
                     double mu0, double zeta) {
  if (w.rows() != graph.n) throw InvalidParameterError("bad_set: factor rows != n");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidParameterError("bad_set: need beta in (0, 1)");
  BadSetReport rep;
  for (int j = 0; j < graph.n; ++j) {
    Matrix block = gather_rows(w, graph.right_neighbors(j), graph.d);
    if (identity_deviation(normalized_gram(block, graph.n)) > 1.0 - beta)
      rep.indices.push_back(j);
  }
  rep.fraction = static_cast<double>(rep.indices.size()) / graph.n;
  rep.baseline_bound = (1.0 + zeta) * gram_tail_bound(graph.d, 5.0 * mu0, 1.0 - beta, w.cols());
  return rep;
}

std::vector<int32_t> deviant_rows(const Matrix& ut, const Matrix& ustar, double tau) {
  if (ut.rows() != ustar.rows() || ut.cols() != ustar.cols())
    throw InvalidParameterError("deviant_rows: shape mismatch");
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidParameterError("deviant_rows: need tau in (0, 1)");
  const int n = ut.rows(), k = ut.cols();
  const double limit = tau / n;
  std::vector<int32_t> out;
  for (int i = 0; i < n; ++i) {
    const double a = kernels::sumsq(ut.row(i), k);
    const double c = kernels::sumsq(ustar.row(i), k);
    const double b = kernels::dot(ut.row(i), ustar.row(i), k);
    // ||x x^T - y y^T||_2 = (|a - c| + sqrt((a + c)^2 - 4 b^2)) / 2
    const double disc = std::max(0.0, (a + c) * (a + c) - 4.0 * b * b);
    const double norm2 = 0.5 * (std::fabs(a - c) + std::sqrt(disc));
    if (norm2 > limit) out.push_back(i);
  }
  return out;
}

double gram_tail_bound(int d, double mu, double a, int k) {
  if (d < 1 || !(mu > 0.0) || !(a > 0.0 && a <= 1.0) || k < 1)
    throw InvalidParameterError("gram_tail_bound: need d >= 1, mu > 0, a in (0, 1], k >= 1");
  const double expo = -(a * a / 2.0) * d / (mu * k + mu * k * a / 3.0);
  return 3.0 * k * std::sqrt(kPi * d) * std::exp(expo);
}

RateParams bad_set_rate_params(double beta, double delta, double mu0, int k, double gamma) {
  if (!(beta > 0.0 && delta > 0.0 && beta + delta < 1.0))
    throw InvalidParameterError("bad_set_rate_params: need beta, delta > 0 with beta + delta < 1");
  if (!(mu0 >= 1.0) || k < 1)
    throw InvalidParameterError("bad_set_rate_params: need mu0 >= 1, k >= 1");
  const double margin = 1.0 - beta - delta;
  RateParams p;
  p.alpha = margin / (12.0 * mu0 * k);
  const double denom = margin * margin / (24.0 * mu0 * k) - 3.0 * gamma * gamma * mu0 * k;
  if (!(denom > 0.0))
    throw InvalidParameterError("bad_set_rate_params: gamma too large for the decay regime");
  p.rho = 2.0 * k / denom;
  return p;
}

ErrorTermReport error_term(const Matrix& ut, const GroundTruth& truth,
                           const BipartiteRegularGraph& graph, double beta,
                           double epsilon) {
  const int n = graph.n, d = graph.d, k = ut.cols();
  if (ut.rows() != n || truth.n != n || truth.k != k)
    throw InvalidParameterError("error_term: shape mismatch");
  if (k > d) throw InvalidParameterError("error_term: need k <= d");

  const Matrix dmat = gram(ut, truth.Ustar);  // D = U^T U*
  const double over_dn = static_cast<double>(n) / d;

  ErrorTermReport rep;
  rep.f = Matrix(n, k);
  for (int j = 0; j < n; ++j) {
    const int32_t* nbr = graph.right_neighbors(j);
    Matrix block = gather_rows(ut, nbr, d);
    Matrix block_star = gather_rows(truth.Ustar, nbr, d);

    // Exactly the decision update_factor makes for this column.
    Matrix raw_gram = neighbor_gram(block);
    const bool bad = !spectrum_in_band(normalized_spectrum(raw_gram, n, d), beta);

    Matrix bhat(k, k), chat(k, k);
    if (!bad) {
      bhat = raw_gram;
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) bhat(a, b) *= over_dn;
      chat = gram(block, block_star);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) chat(a, b) *= over_dn;
    } else {
      // Bhat = Q clamp(lam) Q^T; Chat = (n/d) Q Sighat P^T Bstar, built from
      // the block SVD exactly as the clamped solve is.
      SmallSvd svd = small_svd(block);
      std::vector<double> lam_hat(k), sig_hat(k);
      const double block_scale = std::sqrt(static_cast<double>(d) / n);
      for (int l = 0; l < k; ++l) {
        const double lam_svd = svd.s[l] * svd.s[l] * over_dn;
        lam_hat[l] = std::clamp(lam_svd, beta, 2.0 - beta);
        sig_hat[l] = std::sqrt(lam_hat[l]) * block_scale;
      }
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          double s = 0.0;
          for (int l = 0; l < k; ++l) s += svd.v(a, l) * lam_hat[l] * svd.v(b, l);
          bhat(a, b) = s;
        }
      Matrix pt_bstar = gram(svd.u, block_star);  // k x k: P^T Bstar
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          double s = 0.0;
          for (int l = 0; l < k; ++l) s += svd.v(a, l) * sig_hat[l] * pt_bstar(l, b);
          chat(a, b) = s * over_dn;
        }
    }

    // Row_j(F)^T = Bhat^{-1} (Bhat D - Chat) Sigma* v_j*.
    std::vector<double> z(k);
    for (int l = 0; l < k; ++l) z[l] = truth.sigma[l] * truth.Vstar(j, l);
    std::vector<double> y(k, 0.0);
    for (int a = 0; a < k; ++a) {
      double s = 0.0;
      for (int b = 0; b < k; ++b) {
        double bd = 0.0;
        for (int l = 0; l < k; ++l) bd += bhat(a, l) * dmat(l, b);
        s += (bd - chat(a, b)) * z[b];
      }
      y[a] = s;
    }
    std::vector<double> x = spd_solve(bhat, y);
    std::copy(x.begin(), x.end(), rep.f.row(j));
  }

  rep.dist_u = subspace_dist(ut, truth.Ustar);
  rep.f_norm_over_sigma_k = frobenius_norm(rep.f) / truth.sigma.back();
  rep.decay_bound = std::max(rep.dist_u, epsilon / 2.0) / (5.0 * std::sqrt(10.0 * k));
  rep.satisfied = rep.f_norm_over_sigma_k <= rep.decay_bound;
  return rep;
}

BadSetBoundReport bad_set_bound_check(const Matrix& ut, const Matrix& ustar,
                                      const BipartiteRegularGraph& graph, double beta,
                                      double delta, double mu0, double zeta) {
  const int k = ut.cols();
  BadSetBoundReport rep;
  rep.gamma = subspace_dist(ut, ustar);
  rep.fraction = bad_set(ut, graph, beta, mu0, zeta).fraction;
  rep.bound_baseline = (1.0 + zeta) * gram_tail_bound(graph.d, 5.0 * mu0, 1.0 - beta, k);
  rep.baseline_holds = rep.fraction <= rep.bound_baseline;
  try {
    RateParams rp = bad_set_rate_params(beta, delta, mu0, k, rep.gamma);
    rep.rate_applicable = true;
    const double e1 = std::exp(1.0);
    const double decay =
        1.1 * e1 * std::pow(e1 * e1 * rp.rho * rep.gamma * rep.gamma / rp.alpha,
                            rp.alpha * graph.d);
    rep.bound_distance = decay + (1.0 + zeta) * gram_tail_bound(graph.d, mu0, delta, k);
    rep.distance_holds = rep.fraction <= rep.bound_distance;
    rep.bound_isometry = decay + zeta;
    rep.isometry_holds = rep.fraction <= rep.bound_isometry;
  } catch (const InvalidParameterError&) {
    rep.rate_applicable = false;
  }
  return rep;
}

DeviantRowsBound deviant_rows_bound_check(const Matrix& ut, const Matrix& ustar,
                                          double mu0, double tau) {
  const int n = ut.rows(), k = ut.cols();
  DeviantRowsBound rep;
  rep.gamma = subspace_dist(ut, ustar);
  Matrix aligned = matmul(ut, align_rotation(ustar, ut));
  rep.count = static_cast<int64_t>(deviant_rows(aligned, ustar, tau).size());
  const double coeff = tau * tau / (6.0 * mu0 * k) - 3.0 * rep.gamma * rep.gamma * mu0 * k;
  rep.lhs = coeff * rep.count;
  rep.rhs = 2.0 * k * rep.gamma * rep.gamma * n;
  rep.holds = rep.lhs <= rep.rhs + 1e-6 * n;
  return rep;
}

void write_index_dump(const std::vector<int32_t>& indices, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  for (int32_t i : indices) out << i << '\n';
}

}  // namespace tam
