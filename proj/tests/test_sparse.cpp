#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tam/dense_linalg.hpp"
#include "tam/graph.hpp"
#include "tam/sparse.hpp"

using namespace tam;

namespace {

// Sparse planted low-rank + small noise, with separated top singular values.
CsrMatrix planted_sparse(int n, int k, Rng& rng, Matrix* dense_out) {
  Matrix u = oracles::random_orthonormal(n, k, rng);
  Matrix v = oracles::random_orthonormal(n, k, rng);
  Matrix dense(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int l = 0; l < k; ++l) s += u(i, l) * (10.0 - 2.0 * l) * v(j, l);
      if (rng.uniform() < 0.05) s += 0.01 * rng.normal();
      dense(i, j) = s;
    }
  CsrMatrix a;
  a.rows = a.cols = n;
  a.rowptr.push_back(0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (dense(i, j) != 0.0) {
        a.colidx.push_back(j);
        a.values.push_back(dense(i, j));
      }
    a.rowptr.push_back(static_cast<int64_t>(a.colidx.size()));
  }
  if (dense_out) *dense_out = dense;
  return a;
}

}  // namespace

TEST_SUITE("sparse") {

TEST_CASE("csr accessors, multiply, transpose") {
  CsrMatrix a;
  a.rows = 2;
  a.cols = 3;
  a.rowptr = {0, 2, 3};
  a.colidx = {0, 2, 1};
  a.values = {1.0, 2.0, 3.0};
  CHECK(a.at(0, 0) == 1.0);
  CHECK(a.at(0, 1) == 0.0);
  CHECK(a.at(0, 2) == 2.0);
  CHECK(a.at(1, 1) == 3.0);

  double x[3] = {1.0, 1.0, 1.0};
  double y[2];
  a.multiply(x, y);
  CHECK(y[0] == doctest::Approx(3.0));
  CHECK(y[1] == doctest::Approx(3.0));

  CsrMatrix t = a.transposed();
  CHECK(t.at(0, 0) == 1.0);
  CHECK(t.at(2, 0) == 2.0);
  CHECK(t.at(1, 1) == 3.0);
  CHECK(t.nnz() == a.nnz());
}

TEST_CASE("truncated svd of a diagonal matrix") {
  CsrMatrix a;
  a.rows = a.cols = 6;
  a.rowptr.push_back(0);
  for (int i = 0; i < 6; ++i) {
    a.colidx.push_back(i);
    a.values.push_back(5.0 - i);  // 5, 4, 3, 2, 1, 0-ish
    a.rowptr.push_back(i + 1);
  }
  a.values[5] = 0.5;
  Rng rng(11);
  TruncatedSvd svd = truncated_svd_sparse(a, 2, 1e-10, 200, rng);
  CHECK(svd.s[0] == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(svd.s[1] == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("truncated svd matches the dense oracle") {
  Rng rng(12);
  Matrix dense;
  CsrMatrix a = planted_sparse(200, 3, rng, &dense);
  TruncatedSvd svd = truncated_svd_sparse(a, 3, 1e-9, 500, rng);
  SmallSvd ref = small_svd(dense);
  for (int l = 0; l < 3; ++l)
    CHECK(svd.s[l] == doctest::Approx(ref.s[l]).epsilon(1e-6));
  // Vectors compared by alignment (sign-free).
  for (int l = 0; l < 3; ++l) {
    double du = 0.0, dv = 0.0;
    for (int i = 0; i < 200; ++i) {
      du += svd.u(i, l) * ref.u(i, l);
      dv += svd.v(i, l) * ref.v(i, l);
    }
    CHECK(std::fabs(du) >= 1.0 - 1e-6);
    CHECK(std::fabs(dv) >= 1.0 - 1e-6);
  }
}

TEST_CASE("top pair of a scaled regular bi-adjacency is flat") {
  Rng rng(13);
  BipartiteRegularGraph g = sample_bipartite_regular(300, 5, rng);
  const double c = 2.5;
  EdgeValues vals = values_from_oracle(g, [&](int, int) { return c / 300.0; });
  CsrMatrix a = apply_sampling_operator(g, vals);
  TruncatedSvd svd = truncated_svd_sparse(a, 1, 1e-10, 200, rng);
  CHECK(svd.s[0] == doctest::Approx(c * g.d / 300.0).epsilon(1e-9));
  const double flat = 1.0 / std::sqrt(300.0);
  const double sign = svd.u(0, 0) < 0 ? -1.0 : 1.0;
  for (int i = 0; i < 300; ++i)
    CHECK(sign * svd.u(i, 0) == doctest::Approx(flat).epsilon(1e-9));
}

TEST_CASE("non-convergence carries the best iterate") {
  Rng rng(14);
  CsrMatrix a = planted_sparse(80, 2, rng, nullptr);
  try {
    truncated_svd_sparse(a, 2, 1e-16, 1, rng);  // one sweep cannot reach 1e-16
    FAIL("expected SvdConvergenceError");
  } catch (const SvdConvergenceError& e) {
    CHECK(e.best().u.rows() == 80);
    CHECK(e.best().s.size() == 2);
    CHECK(e.best().residual > 0.0);
  }
}

TEST_CASE("parameter validation") {
  CsrMatrix a;
  a.rows = a.cols = 4;
  a.rowptr = {0, 0, 0, 0, 0};
  Rng rng(15);
  CHECK_THROWS_AS(truncated_svd_sparse(a, 4, 1e-9, 10, rng), InvalidParameterError);
  CHECK_THROWS_AS(truncated_svd_sparse(a, 0, 1e-9, 10, rng), InvalidParameterError);
}

}  // TEST_SUITE
