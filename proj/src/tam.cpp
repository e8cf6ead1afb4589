#include "tam/tam.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tam/block_gram.hpp"
#include "tam/dense_linalg.hpp"
#include "tam/errors.hpp"
#include "tam/kernels.hpp"
#include "tam/parallel.hpp"
#include "tam/regularizers.hpp"
#include "tam/subspace.hpp"

namespace tam {

void TamConfig::validate() const {
  if (n < 2 || k < 1 || k >= n)
    throw InvalidParameterError("TamConfig: need 1 <= k < n");
  if (d < k || d > n)
    throw InvalidParameterError("TamConfig: need k <= d <= n (the k x k systems are singular for d < k)");
  if (N < 1) throw InvalidParameterError("TamConfig: need N >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw InvalidParameterError("TamConfig: need delta in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0 - delta))
    throw InvalidParameterError("TamConfig: need beta in (0, 1 - delta)");
  if (!(epsilon > 0.0 && epsilon < 2.0 / 3.0))
    throw InvalidParameterError("TamConfig: need epsilon in (0, 2/3)");
  if (svd_max_iter < 1 || threads < 1)
    throw InvalidParameterError("TamConfig: need svd_max_iter >= 1, threads >= 1");
  IncoherenceParams probe(mu0, k, n);  // validates the incoherence budget
  (void)probe;
}

int derive_iteration_count(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 2.0 / 3.0))
    throw InvalidParameterError("derive_iteration_count: need epsilon in (0, 2/3)");
  return 1 + static_cast<int>(std::ceil(std::log(2.0 / epsilon) / std::log(4.0)));
}

namespace {

void check_schedule(const SampleSchedule& s, const TamConfig& c) {
  if (s.n != c.n || s.d != c.d || s.N != c.N)
    throw InvalidParameterError("schedule (n, d, N) does not match the configuration");
  if (static_cast<int>(s.graphs.size()) != 2 * s.N + 1 || s.values.size() != s.graphs.size())
    throw InvalidParameterError("schedule must hold 2N+1 graphs with values");
}

struct BlockSolve {
  std::vector<double> x;
  bool bad = false;
  bool illcond = false;
  double min_sv = 0.0, max_sv = 0.0;
  double solved_min_sv = 0.0;
};

// Reused across the columns one worker handles; the solver loop is
// allocation-free on the common path.
struct ColumnScratch {
  Matrix block, gram;
  ColumnScratch(int d, int k) : block(d, k), gram(k, k) {}
};

BlockSolve solve_target(const Matrix& w, int n, int d, const int32_t* neighbors,
                        const double* vals, double beta, SolveMode mode,
                        double illcond_threshold, ColumnScratch& scratch) {
  const int k = w.cols();
  Matrix& block = scratch.block;
  Matrix& gram = scratch.gram;
  gather_rows_into(w, neighbors, d, block);
  neighbor_gram_into(block, gram);
  // The spectrum decision comes from the k x k Gramian eigenvalues; the
  // d x k SVD is computed only when a clamp (or pseudo-inverse) needs it.
  std::vector<double> lam = normalized_spectrum(gram, n, d);

  BlockSolve out;
  out.min_sv = lam.back();
  out.max_sv = lam.front();
  out.bad = !spectrum_in_band(lam, beta);

  auto gram_solve = [&]() -> bool {
    std::vector<double> rhs(k, 0.0);
    for (int r = 0; r < d; ++r)
      kernels::axpy(vals[r], block.row(r), rhs.data(), static_cast<size_t>(k));
    try {
      out.x = spd_solve(gram, rhs);
      return true;
    } catch (const InternalError&) {
      return false;
    }
  };

  // x = Q diag(inv_s) P^T vals for the block SVD P S Q^T.
  auto svd_solve = [&](const SmallSvd& svd, const std::vector<double>& inv_s) {
    std::vector<double> y(k, 0.0);
    for (int r = 0; r < d; ++r)
      for (int l = 0; l < k; ++l) y[l] += svd.u(r, l) * vals[r];
    out.x.assign(k, 0.0);
    for (int i = 0; i < k; ++i)
      for (int l = 0; l < k; ++l) out.x[i] += svd.v(i, l) * inv_s[l] * y[l];
  };

  if (!out.bad) {
    if (!gram_solve())
      throw InternalError(
          "update_factor: Gramian passed the spectrum check but is not positive definite");
    out.solved_min_sv = out.min_sv;
  } else if (mode == SolveMode::kThresholded) {
    SmallSvd svd = small_svd(block);
    const double lo = std::sqrt(beta), hi = std::sqrt(2.0 - beta);
    const double block_scale = std::sqrt(static_cast<double>(d) / n);
    std::vector<double> inv_s(k);
    for (int l = 0; l < k; ++l) {
      const double normalized = svd.s[l] / block_scale;
      inv_s[l] = 1.0 / (std::clamp(normalized, lo, hi) * block_scale);
    }
    svd_solve(svd, inv_s);
    out.solved_min_sv = beta;  // exact by construction of the clamp
  } else {
    // Vanilla: direct solve whenever the Gramian is numerically invertible;
    // least-norm pseudo-inverse when it is singular. The counter records
    // every ill-conditioned system this path inverts.
    out.illcond = out.min_sv < illcond_threshold;
    out.solved_min_sv = out.min_sv;
    if (!gram_solve()) {
      SmallSvd svd = small_svd(block);
      const double cutoff = svd.s.front() * k * 1e-15;
      std::vector<double> inv_s(k);
      for (int l = 0; l < k; ++l) inv_s[l] = svd.s[l] > cutoff ? 1.0 / svd.s[l] : 0.0;
      svd_solve(svd, inv_s);
    }
  }
  return out;
}

}  // namespace

FactorUpdate update_factor(const Matrix& w, const BipartiteRegularGraph& graph,
                           const EdgeValues& values, double beta, Side side,
                           SolveMode mode, double illcond_threshold, int threads) {
  const int n = graph.n, d = graph.d, k = w.cols();
  if (w.rows() != n) throw InvalidParameterError("update_factor: factor rows != n");
  if (k > d) throw InvalidParameterError("update_factor: need k <= d");
  if (!(beta > 0.0 && beta < 1.0))
    throw InvalidParameterError("update_factor: need beta in (0, 1)");

  const int32_t* adj = side == Side::kRight ? graph.right_adj.data() : graph.left_adj.data();
  const std::vector<double>& vals = side == Side::kRight ? values.by_right : values.by_left;
  if (vals.size() != graph.left_adj.size())
    throw InconsistencyError("update_factor: values do not match the graph");

  FactorUpdate out;
  out.tilde = Matrix(n, k);
  std::vector<uint8_t> bad(n, 0), ill(n, 0);
  std::vector<double> mins(n), maxs(n), solved(n);

  parallel_for(0, n, threads, [&](int64_t lo, int64_t hi) {
    ColumnScratch scratch(d, k);
    for (int64_t j = lo; j < hi; ++j) {
      BlockSolve bs = solve_target(w, n, d, adj + j * d, vals.data() + j * d, beta,
                                   mode, illcond_threshold, scratch);
      std::copy(bs.x.begin(), bs.x.end(), out.tilde.row(static_cast<int>(j)));
      bad[j] = bs.bad ? 1 : 0;
      ill[j] = bs.illcond ? 1 : 0;
      mins[j] = bs.min_sv;
      maxs[j] = bs.max_sv;
      solved[j] = bs.solved_min_sv;
    }
  });

  for (int j = 0; j < n; ++j)
    if (bad[j]) out.bad_set.push_back(j);
  out.illcond_count = static_cast<int>(std::count(ill.begin(), ill.end(), uint8_t{1}));
  out.min_sv = *std::min_element(mins.begin(), mins.end());
  out.max_sv = *std::max_element(maxs.begin(), maxs.end());
  out.min_solved_sv = *std::min_element(solved.begin(), solved.end());
  return out;
}

namespace {

Matrix initial_basis(const SampleSchedule& schedule, const TamConfig& config) {
  config.validate();
  check_schedule(schedule, config);
  CsrMatrix a = apply_sampling_operator(schedule.graphs[0], schedule.values[0]);
  const double scale = static_cast<double>(config.n) / config.d;
  kernels::scale(a.values.data(), a.values.size(), scale);
  Rng rng(derive_seed(config.seed, "svd-init"));
  try {
    return truncated_svd_sparse(a, config.k, config.svd_tol, config.svd_max_iter, rng).u;
  } catch (const SvdConvergenceError& e) {
    if (!config.svd_best_effort) throw;
    return e.best().u;
  }
}

}  // namespace

Matrix initialize(const SampleSchedule& schedule, const TamConfig& config) {
  return truncate_and_orthonormalize(initial_basis(schedule, config),
                                     IncoherenceParams(config.mu0, config.k, config.n));
}

namespace {

TamResult run_alternating(const SampleSchedule& schedule, const TamConfig& config,
                          const GroundTruth* truth, SolveMode mode) {
  config.validate();
  check_schedule(schedule, config);
  if (truth && (truth->n != config.n || truth->k != config.k))
    throw InvalidParameterError("ground truth shape does not match the configuration");
  IncoherenceParams params(config.mu0, config.k, config.n);

  TamResult res;
  // The baseline skips the row-truncation half of the initialization as well:
  // its warm start is the raw top-k basis.
  Matrix u = mode == SolveMode::kThresholded
                 ? initialize(schedule, config)
                 : thin_qr(initial_basis(schedule, config)).q;
  if (truth) res.init_dist_u = subspace_dist(u, truth->Ustar, true);
  if (config.record_iterates) res.U_iterates.push_back(u);

  for (int t = 0; t < config.N; ++t) {
    const auto tick = std::chrono::steady_clock::now();
    IterationStats st;
    st.t = t;

    FactorUpdate vu = update_factor(u, schedule.graphs[t + 1], schedule.values[t + 1],
                                    config.beta, Side::kRight, mode,
                                    config.illcond_threshold, config.threads);
    st.bad_count_v = static_cast<int>(vu.bad_set.size());
    st.illcond_v = vu.illcond_count;
    if (t == config.N - 1) {
      res.U_final = u;
      res.V_tilde_final = vu.tilde;
    }
    if (config.record_iterates) res.V_tilde_iterates.push_back(vu.tilde);

    Matrix v = thin_qr(vu.tilde).q;
    if (mode == SolveMode::kThresholded) v = truncate_and_orthonormalize(v, params);
    if (truth) st.dist_v = subspace_dist(v, truth->Vstar, true);
    if (config.record_iterates) res.V_iterates.push_back(v);

    FactorUpdate uu = update_factor(v, schedule.graphs[config.N + t + 1],
                                    schedule.values[config.N + t + 1], config.beta,
                                    Side::kLeft, mode, config.illcond_threshold,
                                    config.threads);
    st.bad_count_u = static_cast<int>(uu.bad_set.size());
    st.illcond_u = uu.illcond_count;

    u = thin_qr(uu.tilde).q;
    if (mode == SolveMode::kThresholded) u = truncate_and_orthonormalize(u, params);
    if (truth) st.dist_u = subspace_dist(u, truth->Ustar, true);
    if (config.record_iterates) res.U_iterates.push_back(u);

    st.min_gram_sv = std::min(vu.min_sv, uu.min_sv);
    st.max_gram_sv = std::max(vu.max_sv, uu.max_sv);
    st.min_solved_sv = std::min(vu.min_solved_sv, uu.min_solved_sv);
    st.wall_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - tick).count();
    res.trace.push_back(st);
  }
  return res;
}

}  // namespace

TamResult run_tam(const SampleSchedule& schedule, const TamConfig& config,
                  const GroundTruth* truth) {
  return run_alternating(schedule, config, truth, SolveMode::kThresholded);
}

TamResult run_vanilla_am(const SampleSchedule& schedule, const TamConfig& config,
                         const GroundTruth* truth) {
  return run_alternating(schedule, config, truth, SolveMode::kVanilla);
}

double TamResult::reconstruct_entry(int i, int j) const {
  return kernels::dot(U_final.row(i), V_tilde_final.row(j),
                      static_cast<size_t>(U_final.cols()));
}

Matrix TamResult::materialize() const {
  Matrix m(U_final.rows(), V_tilde_final.rows());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = reconstruct_entry(i, j);
  return m;
}

void write_trace_csv(const std::vector<IterationStats>& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "t,bad_count_v,bad_count_u,illcond_v,illcond_u,dist_u,dist_v,"
         "min_gram_sv,max_gram_sv,min_solved_sv,wall_ms\n";
  char buf[256];
  for (const IterationStats& s : trace) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.6g\n",
                  s.t, s.bad_count_v, s.bad_count_u, s.illcond_v, s.illcond_u,
                  s.dist_u, s.dist_v, s.min_gram_sv, s.max_gram_sv, s.min_solved_sv,
                  s.wall_ms);
    out << buf;
  }
}

}  // namespace tam
