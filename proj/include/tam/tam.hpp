#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tam/graph.hpp"
#include "tam/matrix.hpp"
#include "tam/synth.hpp"

namespace tam {

struct TamConfig {
  int n = 0;  // matrix dimension (must match the schedule)
  int k = 0;  // target rank
  int d = 0;  // sampling degree, d >= k
  int N = 0;  // iteration count, N >= 1

  double beta = 0.5;    // Gramian spectrum threshold, in (0, 1 - delta)
  double delta = 0.1;   // isometry slack, in (0, 1)
  double epsilon = 1e-3;  // target relative error, in (0, 2/3)
  double mu0 = 1.0;     // incoherence budget for row truncation

  double svd_tol = 1e-9;   // initialization SVD residual tolerance
  int svd_max_iter = 500;  // initialization SVD sweep cap
  // Warm starts only need a usable subspace: with this set, an initialization
  // SVD that stalls (tiny spectral gap at small d) falls back to its best
  // iterate instead of raising ConvergenceError.
  bool svd_best_effort = false;
  // Vanilla-AM only: a solve is counted as ill-conditioned when the
  // normalized Gramian's least eigenvalue (expected value 1) falls below
  // this. The counter is observational; vanilla still inverts everything
  // short of numerical singularity.
  double illcond_threshold = 1e-6;
  uint64_t seed = 0;
  int threads = 1;
  bool record_iterates = false;  // keep U^t / V^t / Vtilde^t for diagnostics

  void validate() const;  // throws InvalidParameterError
};

// Per-iteration observability: T2 activations (bad sets), pseudo-inverse
// fallbacks (vanilla), subspace distances when ground truth is available,
// and the extremes of the normalized Gramian spectra.
struct IterationStats {
  int t = 0;
  int bad_count_v = 0, bad_count_u = 0;
  int illcond_v = 0, illcond_u = 0;
  double dist_u = -1.0, dist_v = -1.0;  // -1 when no ground truth
  double min_gram_sv = 0.0, max_gram_sv = 0.0;  // raw normalized spectra
  double min_solved_sv = 0.0;                   // spectra of matrices actually inverted
  double wall_ms = 0.0;
};

struct TamResult {
  Matrix U_final;        // U^{N-1}, orthonormal
  Matrix V_tilde_final;  // Vtilde^N (pre-orthonormalization)
  std::vector<IterationStats> trace;
  double init_dist_u = -1.0;  // dist(U^0, U*) when ground truth is available

  // Iterate history, populated when TamConfig::record_iterates is set.
  std::vector<Matrix> U_iterates;        // U^0 .. U^N
  std::vector<Matrix> V_iterates;        // V^1 .. V^N
  std::vector<Matrix> V_tilde_iterates;  // Vtilde^1 .. Vtilde^N

  double reconstruct_entry(int i, int j) const;
  Matrix materialize() const;  // U_final * V_tilde_final^T (small n only)
};

// Smallest iteration count guaranteeing the target relative error:
// N = 1 + ceil(log(2/epsilon) / log 4). Requires epsilon in (0, 2/3).
int derive_iteration_count(double epsilon);

// Warm start: top-k left singular vectors of (n/d) P_Omega0(M), row-truncated
// and re-orthonormalized.
Matrix initialize(const SampleSchedule& schedule, const TamConfig& config);

enum class Side { kLeft, kRight };
enum class SolveMode { kThresholded, kVanilla };

struct FactorUpdate {
  Matrix tilde;                  // n x k solved rows
  std::vector<int32_t> bad_set;  // indices where the spectrum check failed
  int illcond_count = 0;         // vanilla-only pseudo-inverse fallbacks
  double min_sv = 0.0, max_sv = 0.0;  // raw normalized Gramian spectrum range
  double min_solved_sv = 0.0;         // over matrices actually inverted
};

// One half-iteration: for every target index, gather the d x k neighbor
// block of W, test the normalized Gramian spectrum against [beta, 2-beta],
// and solve the k x k system (spectrum-clamped when the test fails, raw
// otherwise). Side::kRight walks right vertices against left rows (the
// V-update); Side::kLeft the mirror image.
FactorUpdate update_factor(const Matrix& w, const BipartiteRegularGraph& graph,
                           const EdgeValues& values, double beta, Side side,
                           SolveMode mode = SolveMode::kThresholded,
                           double illcond_threshold = 1e-6, int threads = 1);

// Full thresholded alternating minimization.
TamResult run_tam(const SampleSchedule& schedule, const TamConfig& config,
                  const GroundTruth* truth = nullptr);

// Baseline without spectrum clamping or row truncation; near-singular
// Gramians are solved by least-norm pseudo-inverse and counted.
TamResult run_vanilla_am(const SampleSchedule& schedule, const TamConfig& config,
                         const GroundTruth* truth = nullptr);

// Trace serialization (one CSV row per iteration).
void write_trace_csv(const std::vector<IterationStats>& trace, const std::string& path);

}  // namespace tam
