#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "oracles.hpp"
#include "tam/dense_linalg.hpp"
#include "tam/diagnostics.hpp"
#include "tam/subspace.hpp"
#include "tam/tam.hpp"

using namespace tam;

TEST_SUITE("diagnostics") {

TEST_CASE("incoherence extremes and oracle") {
  const int n = 100;
  Matrix flat(n, 1);
  for (int i = 0; i < n; ++i) flat(i, 0) = 1.0 / 10.0;
  CHECK(incoherence_of(flat) == doctest::Approx(1.0));

  Matrix spike(n, 1);
  spike(0, 0) = 1.0;
  CHECK(incoherence_of(spike) == doctest::Approx(static_cast<double>(n)));

  Rng rng(61);
  Matrix w = oracles::random_orthonormal(1000, 3, rng);
  double mx = 0.0;
  for (int i = 0; i < 1000; ++i) {
    double nsq = 0.0;
    for (int j = 0; j < 3; ++j) nsq += w(i, j) * w(i, j);
    mx = std::max(mx, nsq);
  }
  CHECK(incoherence_of(w) == doctest::Approx(mx * 1000.0 / 3.0).epsilon(1e-12));

  Matrix not_orth(10, 2);
  not_orth(0, 0) = 1.0;
  not_orth(0, 1) = 1.0;
  CHECK_THROWS_AS(incoherence_of(not_orth), InvalidParameterError);
}

TEST_CASE("subset isometry test") {
  const int n = 100;
  Matrix flat(n, 1);
  for (int i = 0; i < n; ++i) flat(i, 0) = 0.1;
  Rng rng(62);
  CHECK(subset_isometry_test(flat, 10, 0.25, 500, rng) == 0.0);

  // Spike factor, d close to n: subsets containing the spike are compliant,
  // so the failure fraction is the hypergeometric miss probability 1 - d/n.
  const int m = 10, d = 9;
  Matrix spike(m, 1);
  spike(0, 0) = 1.0;
  const double expect = 1.0 - static_cast<double>(d) / m;
  const double ff = subset_isometry_test(spike, d, 0.2, 20000, rng);
  CHECK(std::fabs(ff - expect) <= 0.012);  // 4 sigma of the Monte Carlo noise

  CHECK_THROWS_AS(subset_isometry_test(flat, 10, 0.25, 0, rng), InvalidParameterError);
  CHECK_THROWS_AS(subset_isometry_test(flat, 101, 0.25, 10, rng), InvalidParameterError);

  // Generic k=2 factor on a small index set: Monte Carlo against exhaustive
  // enumeration of all C(8,3) = 56 subsets.
  Matrix w = oracles::random_orthonormal(8, 2, rng);
  const double delta = 0.6;
  int fail = 0, total = 0;
  for (int a = 0; a < 8; ++a)
    for (int b = a + 1; b < 8; ++b)
      for (int c = b + 1; c < 8; ++c) {
        Matrix g(2, 2);
        for (int p = 0; p < 2; ++p)
          for (int q = 0; q < 2; ++q)
            g(p, q) = (8.0 / 3.0) * (w(a, p) * w(a, q) + w(b, p) * w(b, q) + w(c, p) * w(c, q));
        std::vector<double> lam = sym_eigvals(g);
        const double dev = std::max(std::fabs(lam.front() - 1.0), std::fabs(lam.back() - 1.0));
        ++total;
        if (dev > delta) ++fail;
      }
  const double exact = static_cast<double>(fail) / total;
  const double mc = subset_isometry_test(w, 3, delta, 40000, rng);
  const double sd = std::sqrt(std::max(exact * (1.0 - exact), 1e-4) / 40000.0);
  CHECK(std::fabs(mc - exact) <= 5.0 * sd + 1e-9);
}

TEST_CASE("bad set extremes") {
  Rng rng(63);
  const int n = 100, d = 5;
  BipartiteRegularGraph g = sample_bipartite_regular(n, d, rng);
  Matrix flat(n, 1);
  for (int i = 0; i < n; ++i) flat(i, 0) = 0.1;
  CHECK(bad_set(flat, g, 0.5).indices.empty());

  // Spike factor with n/d <= 2 - beta: adjacent columns stay compliant, so
  // the bad set is exactly the non-neighbors of the spike row.
  const int n2 = 12, d2 = 8;
  BipartiteRegularGraph g2 = sample_bipartite_regular(n2, d2, rng);
  Matrix spike(n2, 1);
  spike(0, 0) = 1.0;
  BadSetReport rep = bad_set(spike, g2, 0.4);
  std::vector<int32_t> expect;
  for (int j = 0; j < n2; ++j) {
    const int32_t* nbr = g2.right_neighbors(j);
    if (!std::binary_search(nbr, nbr + d2, 0)) expect.push_back(j);
  }
  CHECK(rep.indices == expect);
}

TEST_CASE("bad set agrees with the in-loop decision exactly") {
  Rng rng(64);
  const int n = 200, k = 2, d = 6;
  BipartiteRegularGraph g = sample_bipartite_regular(n, d, rng);
  // A moderately spiky orthonormal factor so both outcomes occur.
  Matrix x = oracles::random_matrix(n, k, rng);
  for (int i = 0; i < n / 8; ++i)
    for (int j = 0; j < k; ++j) x(i, j) *= 8.0;
  Matrix w = oracles::mgs_qr(x).q;
  EdgeValues vals = values_from_oracle(g, [](int i, int j) { return std::cos(0.3 * i + j); });

  const double beta = 0.5;
  BadSetReport rep = bad_set(w, g, beta);
  FactorUpdate up = update_factor(w, g, vals, beta, Side::kRight);
  CHECK(rep.indices == up.bad_set);
  CHECK_FALSE(rep.indices.empty());
}

TEST_CASE("deviant rows: sign invariance and closed form") {
  Rng rng(65);
  const int n = 80, k = 3;
  Matrix u = oracles::random_orthonormal(n, k, rng);
  CHECK(deviant_rows(u, u, 0.5).empty());

  Matrix flipped = u;
  for (int j = 0; j < k; ++j) flipped(5, j) = -flipped(5, j);
  CHECK(deviant_rows(flipped, u, 0.5).empty());

  // Closed-form spectral norms match a dense eigen evaluation per row.
  Matrix pert = u;
  for (int i = 0; i < n; i += 3)
    for (int j = 0; j < k; ++j) pert(i, j) += 0.02 * rng.normal();
  const double tau = 0.37;
  std::vector<int32_t> got = deviant_rows(pert, u, tau);
  std::vector<int32_t> expect;
  for (int i = 0; i < n; ++i) {
    Matrix diff(k, k);
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        diff(a, b) = pert(i, a) * pert(i, b) - u(i, a) * u(i, b);
    std::vector<double> lam = sym_eigvals(diff);
    const double norm2 = std::max(std::fabs(lam.front()), std::fabs(lam.back()));
    if (norm2 > tau / n) expect.push_back(i);
  }
  CHECK(got == expect);
  CHECK_THROWS_AS(deviant_rows(u, u, 1.5), InvalidParameterError);
}

TEST_CASE("tail bound values and shape") {
  // Direct substitution at d=1, k=1, mu=1, a=1.
  CHECK(gram_tail_bound(1, 1.0, 1.0, 1) ==
        doctest::Approx(3.0 * std::sqrt(M_PI) * std::exp(-3.0 / 8.0)).epsilon(1e-12));
  // a -> 0 removes the exponential decay.
  CHECK(gram_tail_bound(9, 2.0, 1e-9, 2) ==
        doctest::Approx(6.0 * std::sqrt(9.0 * M_PI)).epsilon(1e-6));
  // Decreasing in d beyond the stationary point, positive everywhere.
  double prev = gram_tail_bound(50, 1.0, 0.5, 2);
  for (int d = 51; d <= 2000; d += 7) {
    const double cur = gram_tail_bound(d, 1.0, 0.5, 2);
    CHECK(cur > 0.0);
    CHECK(cur <= prev);
    prev = cur;
  }
  // Monotone decay in a for fixed d.
  CHECK(gram_tail_bound(40, 1.0, 0.6, 2) < gram_tail_bound(40, 1.0, 0.3, 2));
  CHECK_THROWS_AS(gram_tail_bound(0, 1.0, 0.5, 1), InvalidParameterError);
  // Baseline bad-set bound at d=100, mu0=1, beta=0.5, k=2, zeta=0.1.
  const double direct =
      1.1 * 3.0 * 2.0 * std::sqrt(M_PI * 100.0) *
      std::exp(-(0.25 / 2.0) * 100.0 / (5.0 * 2.0 + 5.0 * 2.0 * 0.5 / 3.0));
  CHECK(1.1 * gram_tail_bound(100, 5.0, 0.5, 2) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("rate parameters") {
  RateParams p = bad_set_rate_params(0.5, 0.1, 1.0, 1, 0.0);
  CHECK(p.alpha == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
  CHECK(p.rho == doctest::Approx(300.0).epsilon(1e-12));
  // gamma = 0 closed form: rho = 48 mu0 k^2 / (1 - beta - delta)^2.
  RateParams q = bad_set_rate_params(0.4, 0.2, 2.0, 3, 0.0);
  CHECK(q.rho == doctest::Approx(48.0 * 2.0 * 9.0 / (0.4 * 0.4)).epsilon(1e-12));
  // At the denominator root the parameters blow up: error.
  const double root = 0.4 / std::sqrt(72.0);  // (1-b-d)/(sqrt(72) mu0 k)
  CHECK_THROWS_AS(bad_set_rate_params(0.5, 0.1, 1.0, 1, root), InvalidParameterError);
  CHECK_THROWS_AS(bad_set_rate_params(0.6, 0.5, 1.0, 1, 0.0), InvalidParameterError);
}

TEST_CASE("error term vanishes at the fixed point") {
  GroundTruth gt = gen_flat(256, 2, {2.0, 1.0}, 66);
  Rng rng(66);
  BipartiteRegularGraph g = sample_bipartite_regular(256, 64, rng);
  ErrorTermReport rep = error_term(gt.Ustar, gt, g, 0.5, 1e-3);
  CHECK(rep.dist_u <= 1e-12);
  CHECK(rep.f_norm_over_sigma_k <= 1e-10);
  CHECK(rep.satisfied);
}

TEST_CASE("error term reproduces the update identity") {
  // Vtilde from update_factor must equal V* Sigma* U*^T U - F row by row,
  // including columns where the spectrum clamp fires.
  GroundTruth gt = gen_flat(150, 2, {2.0, 1.0}, 67);
  Rng rng(67);
  const int d = 6;  // small degree: some clamps fire
  BipartiteRegularGraph g = sample_bipartite_regular(150, d, rng);
  EdgeValues vals = values_from_oracle(g, [&gt](int i, int j) { return gt.entry(i, j); });

  Matrix ut = oracles::perturb_at_distance(gt.Ustar, 0.15, rng);

  FactorUpdate up = update_factor(ut, g, vals, 0.5, Side::kRight);
  ErrorTermReport rep = error_term(ut, gt, g, 0.5, 1e-3);

  // expect = V* Sigma* U*^T U - F
  Matrix expect(150, 2);
  Matrix dmat = gram(gt.Ustar, ut);  // U*^T U
  for (int j = 0; j < 150; ++j)
    for (int c = 0; c < 2; ++c) {
      double s = 0.0;
      for (int l = 0; l < 2; ++l) s += gt.Vstar(j, l) * gt.sigma[l] * dmat(l, c);
      expect(j, c) = s - rep.f(j, c);
    }
  for (int j = 0; j < 150; ++j)
    for (int c = 0; c < 2; ++c)
      CHECK(std::fabs(up.tilde(j, c) - expect(j, c)) <= 1e-8 * gt.sigma[0]);
}

TEST_CASE("bad set bound report") {
  GroundTruth gt = gen_flat(300, 2, {2.0, 1.0}, 68);
  Rng rng(68);
  BipartiteRegularGraph g = sample_bipartite_regular(300, 60, rng);
  BadSetBoundReport rep =
      bad_set_bound_check(gt.Ustar, gt.Ustar, g, 0.5, 0.1, std::max(1.0, gt.mu0_actual), 0.5);
  CHECK(rep.gamma <= 1e-12);
  CHECK(rep.fraction == 0.0);
  CHECK(rep.baseline_holds);
  CHECK(rep.rate_applicable);
  CHECK(rep.distance_holds);
  CHECK(rep.isometry_holds);
  // Baseline bound is the tail bound evaluated at (d, 5 mu0, 1 - beta).
  CHECK(rep.bound_baseline ==
        doctest::Approx(1.5 * gram_tail_bound(60, 5.0 * std::max(1.0, gt.mu0_actual), 0.5, 2)));

  // Out-of-range gamma: rate bounds not applicable.
  oracles::SubspacePair far = oracles::pair_at_distance(300, 2, 0.9, rng);
  BadSetBoundReport rep2 = bad_set_bound_check(far.y, far.u, g, 0.5, 0.1, 1.0, 0.5);
  CHECK_FALSE(rep2.rate_applicable);
}

TEST_CASE("deviant rows bound holds on aligned iterates") {
  Rng rng(69);
  GroundTruth gt = gen_flat(400, 2, {2.0, 1.0}, 70);
  for (double gamma : {0.02, 0.1, 0.25}) {
    Matrix ut = oracles::perturb_at_distance(gt.Ustar, gamma, rng);
    const double mu0 = std::max(1.0, gt.mu0_actual);
    DeviantRowsBound rep = deviant_rows_bound_check(ut, gt.Ustar, mu0, 0.5);
    CHECK(rep.gamma == doctest::Approx(gamma).epsilon(1e-9));
    CHECK(rep.holds);
  }
}

TEST_CASE("index dump format") {
  namespace fs = std::filesystem;
  const std::string path = (fs::temp_directory_path() / "tam_idx_test.txt").string();
  write_index_dump({3, 7, 11}, path);
  std::ifstream in(path);
  int a, b, c;
  in >> a >> b >> c;
  CHECK(a == 3);
  CHECK(b == 7);
  CHECK(c == 11);
  fs::remove(path);
}

}  // TEST_SUITE
