// Test-side reference implementations. These stay independent of the library
// code paths they check: QR is re-derived by modified Gram-Schmidt, subspace
// distances by an explicit orthogonal complement, 3x3 eigenvalues by the
// characteristic polynomial.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tam/matrix.hpp"
#include "tam/rng.hpp"

namespace oracles {

struct QrPair {
  tam::Matrix q, r;
};

// Modified Gram-Schmidt with the nonnegative-diagonal convention.
inline QrPair mgs_qr(const tam::Matrix& a) {
  const int n = a.rows(), k = a.cols();
  QrPair out{tam::Matrix(n, k), tam::Matrix(k, k)};
  std::vector<std::vector<double>> v(k, std::vector<double>(n));
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) v[j][i] = a(i, j);
  for (int j = 0; j < k; ++j) {
    for (int p = 0; p < j; ++p) {
      double proj = 0.0;
      for (int i = 0; i < n; ++i) proj += out.q(i, p) * v[j][i];
      out.r(p, j) = proj;
      for (int i = 0; i < n; ++i) v[j][i] -= proj * out.q(i, p);
    }
    double nrm = 0.0;
    for (int i = 0; i < n; ++i) nrm += v[j][i] * v[j][i];
    nrm = std::sqrt(nrm);
    out.r(j, j) = nrm;
    if (nrm > 0.0)
      for (int i = 0; i < n; ++i) out.q(i, j) = v[j][i] / nrm;
  }
  return out;
}

// Eigenvalues of a symmetric 3x3 via the trigonometric solution of the
// characteristic cubic; descending.
inline std::vector<double> char_poly_eigvals_3x3(const tam::Matrix& a) {
  if (a.rows() != 3 || a.cols() != 3) throw std::invalid_argument("need 3x3");
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = (a(0, 0) + a(1, 1) + a(2, 2)) / 3.0;
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  std::vector<double> eig(3, q);
  if (p > 0.0) {
    tam::Matrix b(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = (a(i, j) - (i == j ? q : 0.0)) / p;
    const double detb = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
                        b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
                        b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    eig[0] = q + 2.0 * p * std::cos(phi);
    eig[2] = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    eig[1] = 3.0 * q - eig[0] - eig[2];
  }
  return eig;
}

inline tam::Matrix random_matrix(int n, int k, tam::Rng& rng) {
  tam::Matrix m(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = rng.normal();
  return m;
}

inline tam::Matrix random_orthonormal(int n, int k, tam::Rng& rng) {
  return mgs_qr(random_matrix(n, k, rng)).q;
}

// Full orthonormal basis of the complement of an orthonormal X (n x k):
// Gram-Schmidt of the identity against X, keeping the n-k survivors.
inline tam::Matrix explicit_complement(const tam::Matrix& x) {
  const int n = x.rows(), k = x.cols();
  std::vector<std::vector<double>> basis;
  for (int m = 0; m < n && static_cast<int>(basis.size()) < n - k; ++m) {
    std::vector<double> cand(n, 0.0);
    cand[m] = 1.0;
    for (int rep = 0; rep < 2; ++rep) {
      for (int j = 0; j < k; ++j) {
        double proj = 0.0;
        for (int i = 0; i < n; ++i) proj += x(i, j) * cand[i];
        for (int i = 0; i < n; ++i) cand[i] -= proj * x(i, j);
      }
      for (const auto& b : basis) {
        double proj = 0.0;
        for (int i = 0; i < n; ++i) proj += b[i] * cand[i];
        for (int i = 0; i < n; ++i) cand[i] -= proj * b[i];
      }
    }
    double nrm = 0.0;
    for (double c : cand) nrm += c * c;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) continue;  // axis already inside span(X, basis)
    for (double& c : cand) c /= nrm;
    basis.push_back(std::move(cand));
  }
  tam::Matrix comp(n, n - k);
  for (int j = 0; j < n - k; ++j)
    for (int i = 0; i < n; ++i) comp(i, j) = basis[j][i];
  return comp;
}

// Orthonormal pair (U, Y) with dist(U, Y) = sin(theta) exactly by
// construction: Y = U cos(theta) + W sin(theta) with W in the complement.
struct SubspacePair {
  tam::Matrix u, y;
};

// Orthonormal basis at exact subspace distance `dist` from a given
// orthonormal u, leaning into a random complement direction.
inline tam::Matrix perturb_at_distance(const tam::Matrix& u, double dist, tam::Rng& rng) {
  const int n = u.rows(), k = u.cols();
  tam::Matrix comp = explicit_complement(u);
  tam::Matrix mix = random_orthonormal(comp.cols(), k, rng);
  const double c = std::sqrt(1.0 - dist * dist);
  tam::Matrix y(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) {
      double w = 0.0;
      for (int l = 0; l < comp.cols(); ++l) w += comp(i, l) * mix(l, j);
      y(i, j) = c * u(i, j) + dist * w;
    }
  return y;
}

inline SubspacePair pair_at_distance(int n, int k, double dist, tam::Rng& rng) {
  tam::Matrix u = random_orthonormal(n, k, rng);
  tam::Matrix comp = explicit_complement(u);
  tam::Matrix w(n, k);  // first k complement directions, mixed a little
  tam::Matrix mix = random_orthonormal(comp.cols(), k, rng);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) {
      double s = 0.0;
      for (int l = 0; l < comp.cols(); ++l) s += comp(i, l) * mix(l, j);
      w(i, j) = s;
    }
  const double c = std::sqrt(1.0 - dist * dist);
  tam::Matrix y(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) y(i, j) = c * u(i, j) + dist * w(i, j);
  return {std::move(u), std::move(y)};
}

}  // namespace oracles
