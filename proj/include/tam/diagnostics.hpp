#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tam/graph.hpp"
#include "tam/matrix.hpp"
#include "tam/rng.hpp"
#include "tam/synth.hpp"

namespace tam {

// (n/k) max_i ||w_i||^2 for an orthonormal factor; flat factors give 1,
// a standard basis column gives n. Throws on non-orthonormal input.
double incoherence_of(const Matrix& w);

// Monte Carlo probe of the probabilistic restricted-isometry property:
// fraction of uniform d-subsets S with ||(n/d) sum_{i in S} w_i w_i^T - I|| > delta.
double subset_isometry_test(const Matrix& w, int d, double delta, int trials, Rng& rng);

struct BadSetReport {
  int t = -1;                    // iteration label, -1 when standalone
  std::vector<int32_t> indices;  // ascending
  double fraction = 0.0;
  double baseline_bound = 0.0;   // (1 + zeta) f(d, 5 mu0, 1 - beta)
};

// Indices j whose normalized neighbor Gramian deviates from the identity by
// more than 1 - beta in spectral norm (computed by symmetric eigenvalues;
// equivalent to the per-column spectrum test inside update_factor).
BadSetReport bad_set(const Matrix& w, const BipartiteRegularGraph& graph, double beta,
                     double mu0 = 1.0, double zeta = 0.5);

// Rows whose outer products u_i u_i^T drifted more than tau/n (spectral norm,
// closed-form rank-2 evaluation) from the reference rows. Sign flips of
// individual rows do not register.
std::vector<int32_t> deviant_rows(const Matrix& ut, const Matrix& ustar, double tau);

// Bernstein-style tail bound 3 k sqrt(pi d) exp(-(a^2/2) d / (mu k + mu k a / 3)).
double gram_tail_bound(int d, double mu, double a, int k);

struct RateParams {
  double alpha = 0.0;
  double rho = 0.0;
};

// alpha = (1-beta-delta)/(12 mu0 k); rho = 2k / ((1-beta-delta)^2/(24 mu0 k)
// - 3 gamma^2 mu0 k). Throws when the denominator is not positive (gamma too
// large for the decay regime).
RateParams bad_set_rate_params(double beta, double delta, double mu0, int k, double gamma);

struct ErrorTermReport {
  double f_norm_over_sigma_k = 0.0;  // ||F / sigma_k||_F
  double decay_bound = 0.0;          // max{dist(U, U*), eps/2} / (5 sqrt(10 k))
  bool satisfied = false;
  double dist_u = 0.0;
  Matrix f;  // n x k error rows
};

// The least-squares error term of one V-update against the ground truth:
// row j is v_j^{*T} Sigma* (D^T Bhat^j - Chat^{jT}) (Bhat^j)^{-1} with
// D = U^T U*, using exactly the same spectrum decision per column as
// update_factor. Vtilde = V* Sigma* U*^T U - F holds row by row.
ErrorTermReport error_term(const Matrix& ut, const GroundTruth& truth,
                           const BipartiteRegularGraph& graph, double beta,
                           double epsilon);

struct BadSetBoundReport {
  double gamma = 0.0;
  double fraction = 0.0;        // |S_b| / n
  double bound_baseline = 0.0;  // incoherence-only bound
  bool baseline_holds = false;
  bool rate_applicable = false;  // gamma inside the decay regime
  double bound_distance = 0.0;   // decay term + tail at (mu0, delta)
  bool distance_holds = false;
  double bound_isometry = 0.0;   // decay term + zeta (subset-isometry regime)
  bool isometry_holds = false;
};

// Evaluates the three bad-set size bounds at the measured gamma.
BadSetBoundReport bad_set_bound_check(const Matrix& ut, const Matrix& ustar,
                                      const BipartiteRegularGraph& graph, double beta,
                                      double delta, double mu0, double zeta);

struct DeviantRowsBound {
  double gamma = 0.0;
  int64_t count = 0;   // |Q(tau)| in the aligned basis
  double lhs = 0.0;    // (tau^2/(6 mu0 k) - 3 gamma^2 mu0 k) * count
  double rhs = 0.0;    // 2 k gamma^2 n
  bool holds = false;  // lhs <= rhs + 1e-6 n
};

// Deterministic row-deviation bound. The inequality is stated in the basis
// where U*^T U is symmetric positive semidefinite, so U is aligned first
// (rowwise outer products are not basis-invariant).
DeviantRowsBound deviant_rows_bound_check(const Matrix& ut, const Matrix& ustar,
                                          double mu0, double tau);

// Newline-delimited index dump for bad-set reports.
void write_index_dump(const std::vector<int32_t>& indices, const std::string& path);

}  // namespace tam
