#include "tam/graph.hpp"

#include <algorithm>
#include <cmath>

#include "tam/errors.hpp"
#include "tam/kernels.hpp"
#include "tam/parallel.hpp"

namespace tam {
namespace {

// Sorted adjacency + mirror side from a projected matching. Returns false if
// the matching carries a parallel edge.
bool build_from_matching(int n, int d, const std::vector<int32_t>& match,
                         BipartiteRegularGraph& g) {
  g.n = n;
  g.d = d;
  g.left_adj.assign(static_cast<size_t>(n) * d, 0);
  for (int i = 0; i < n; ++i) {
    int32_t* blk = g.left_adj.data() + static_cast<size_t>(i) * d;
    for (int l = 0; l < d; ++l) blk[l] = match[static_cast<size_t>(i) * d + l] / d;
    std::sort(blk, blk + d);
    for (int l = 1; l < d; ++l)
      if (blk[l] == blk[l - 1]) return false;
  }
  g.right_adj.assign(static_cast<size_t>(n) * d, 0);
  std::vector<int> fill(n, 0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < d; ++l) {
      const int32_t j = g.left_adj[static_cast<size_t>(i) * d + l];
      g.right_adj[static_cast<size_t>(j) * d + fill[j]++] = i;
    }
  return true;  // right blocks are sorted: left indices were visited ascending
}

// Left replica slots that participate in a duplicate edge (all occurrences
// after the first, per duplicate group), in ascending slot order.
std::vector<int32_t> collision_slots(int n, int d, const std::vector<int32_t>& match) {
  std::vector<int32_t> bad;
  std::vector<std::pair<int32_t, int32_t>> targets(d);  // (right vertex, slot)
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < d; ++l) {
      const int32_t slot = static_cast<int32_t>(i) * d + l;
      targets[l] = {match[slot] / d, slot};
    }
    std::sort(targets.begin(), targets.begin() + d);
    for (int l = 1; l < d; ++l)
      if (targets[l].first == targets[l - 1].first) bad.push_back(targets[l].second);
  }
  std::sort(bad.begin(), bad.end());
  return bad;
}

BipartiteRegularGraph complete_bipartite(int n) {
  BipartiteRegularGraph g;
  g.n = n;
  g.d = n;
  g.left_adj.resize(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) g.left_adj[static_cast<size_t>(i) * n + l] = l;
  g.right_adj = g.left_adj;
  return g;
}

CsrMatrix adjacency_csr(const BipartiteRegularGraph& g) {
  CsrMatrix a;
  a.rows = a.cols = g.n;
  a.rowptr.resize(g.n + 1);
  for (int i = 0; i <= g.n; ++i) a.rowptr[i] = static_cast<int64_t>(i) * g.d;
  a.colidx = g.left_adj;
  a.values.assign(g.left_adj.size(), 1.0);
  return a;
}

double normalize(std::vector<double>& v) {
  const double nrm = std::sqrt(kernels::sumsq(v.data(), v.size()));
  if (nrm > 0.0) kernels::scale(v.data(), v.size(), 1.0 / nrm);
  return nrm;
}

void project_out(const std::vector<double>& dir, std::vector<double>& v) {
  const double proj = kernels::dot(dir.data(), v.data(), v.size());
  kernels::axpy(-proj, dir.data(), v.data(), v.size());
}

}  // namespace

BipartiteRegularGraph sample_bipartite_regular(int n, int d, Rng& rng,
                                               int max_retries, SimpleStrategy strategy) {
  if (n < 1 || d < 1 || d > n)
    throw InvalidParameterError("sample_bipartite_regular: need 1 <= d <= n");
  if (d == n) return complete_bipartite(n);  // the only simple d-regular option

  if (strategy == SimpleStrategy::kAuto)
    strategy = d <= 4 ? SimpleStrategy::kReject : SimpleStrategy::kRepair;

  const size_t replicas = static_cast<size_t>(n) * d;
  std::vector<int32_t> match(replicas);
  auto shuffle_matching = [&] {
    for (size_t r = 0; r < replicas; ++r) match[r] = static_cast<int32_t>(r);
    for (size_t r = replicas - 1; r > 0; --r)
      std::swap(match[r], match[rng.uniform_index(r + 1)]);
  };

  BipartiteRegularGraph g;
  if (strategy == SimpleStrategy::kReject) {
    for (int attempt = 0; attempt < max_retries; ++attempt) {
      shuffle_matching();
      if (build_from_matching(n, d, match, g)) return g;
    }
    throw SamplingFailureError("sample_bipartite_regular: retry budget exhausted (n=" +
                               std::to_string(n) + ", d=" + std::to_string(d) + ")");
  }

  shuffle_matching();
  for (int scan = 0; scan < max_retries; ++scan) {
    std::vector<int32_t> bad = collision_slots(n, d, match);
    if (bad.empty()) {
      if (!build_from_matching(n, d, match, g))
        throw InternalError("sample_bipartite_regular: collision scan missed a parallel edge");
      return g;
    }
    for (int32_t s : bad) {
      const size_t t = rng.uniform_index(replicas);
      std::swap(match[s], match[t]);
    }
  }
  throw SamplingFailureError("sample_bipartite_regular: switch budget exhausted (n=" +
                             std::to_string(n) + ", d=" + std::to_string(d) + ")");
}

EdgeValues values_from_oracle(const BipartiteRegularGraph& g,
                              const std::function<double(int, int)>& oracle) {
  EdgeValues v;
  v.by_left.resize(g.left_adj.size());
  v.by_right.resize(g.right_adj.size());
  for (int i = 0; i < g.n; ++i)
    for (int l = 0; l < g.d; ++l)
      v.by_left[static_cast<size_t>(i) * g.d + l] = oracle(i, g.left_neighbors(i)[l]);
  for (int j = 0; j < g.n; ++j)
    for (int l = 0; l < g.d; ++l)
      v.by_right[static_cast<size_t>(j) * g.d + l] = oracle(g.right_neighbors(j)[l], j);
  return v;
}

SampleSchedule sample_rrg_schedule(int n, int d, int N,
                                   const std::function<double(int, int)>& matrix_oracle,
                                   uint64_t seed, int threads, int max_retries,
                                   SimpleStrategy strategy) {
  if (N < 1) throw InvalidParameterError("sample_rrg_schedule: need N >= 1");
  SampleSchedule s;
  s.n = n;
  s.d = d;
  s.N = N;
  s.seed = seed;
  const int total = 2 * N + 1;
  s.graphs.resize(total);
  s.values.resize(total);
  parallel_for(0, total, threads, [&](int64_t lo, int64_t hi) {
    for (int64_t t = lo; t < hi; ++t) {
      Rng g_rng(derive_seed(seed, "graph", static_cast<uint64_t>(t)));
      s.graphs[t] = sample_bipartite_regular(n, d, g_rng, max_retries, strategy);
      s.values[t] = values_from_oracle(s.graphs[t], matrix_oracle);
    }
  });
  return s;
}

CsrMatrix apply_sampling_operator(const BipartiteRegularGraph& g, const EdgeValues& values) {
  if (values.by_left.size() != g.left_adj.size())
    throw InconsistencyError("apply_sampling_operator: value count does not match edge count");
  CsrMatrix a;
  a.rows = a.cols = g.n;
  a.rowptr.resize(g.n + 1);
  for (int i = 0; i <= g.n; ++i) a.rowptr[i] = static_cast<int64_t>(i) * g.d;
  a.colidx = g.left_adj;
  a.values = values.by_left;
  return a;
}

CsrMatrix apply_sampling_operator(const BipartiteRegularGraph& g,
                                  const std::map<std::pair<int, int>, double>& values) {
  if (values.size() != g.left_adj.size())
    throw InconsistencyError("apply_sampling_operator: value key set differs from edge set");
  EdgeValues v;
  v.by_left.resize(g.left_adj.size());
  v.by_right.resize(g.right_adj.size());
  for (int i = 0; i < g.n; ++i)
    for (int l = 0; l < g.d; ++l) {
      auto it = values.find({i, g.left_neighbors(i)[l]});
      if (it == values.end())
        throw InconsistencyError("apply_sampling_operator: missing value for an observed edge");
      v.by_left[static_cast<size_t>(i) * g.d + l] = it->second;
    }
  for (int j = 0; j < g.n; ++j)
    for (int l = 0; l < g.d; ++l)
      v.by_right[static_cast<size_t>(j) * g.d + l] = values.at({g.right_neighbors(j)[l], j});
  return apply_sampling_operator(g, v);
}

SpectralReport spectral_check(const BipartiteRegularGraph& g, double tol, int max_iter) {
  const int n = g.n;
  CsrMatrix a = adjacency_csr(g);
  CsrMatrix at = a.transposed();

  SpectralReport rep;
  int used = 0;

  // sigma1: start from the flat vector, the exact top right singular vector
  // of any regular bi-adjacency.
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> u(n, 0.0), w(n, 0.0);
  double prev = -1.0;
  bool converged = false;
  while (used < max_iter) {
    ++used;
    a.multiply(v.data(), u.data());
    const double s_left = normalize(u);
    at.multiply(u.data(), w.data());
    const double s_right = normalize(w);
    v = w;
    rep.sigma1 = s_right;
    if (prev >= 0.0 && std::fabs(s_right - prev) <= tol * std::max(s_right, 1e-300)) {
      converged = true;
      break;
    }
    prev = s_right;
    (void)s_left;
  }
  {
    int imax = 0;
    for (int i = 1; i < n; ++i)
      if (std::fabs(u[i]) > std::fabs(u[imax])) imax = i;
    const double sign = u[imax] < 0.0 ? -1.0 : 1.0;
    const double flat = 1.0 / std::sqrt(static_cast<double>(n));
    rep.top_vector_flatness = 0.0;
    for (int i = 0; i < n; ++i)
      rep.top_vector_flatness = std::max(rep.top_vector_flatness, std::fabs(sign * u[i] - flat));
  }
  if (!converged) {
    rep.iterations = used;
    throw SpectralConvergenceError("spectral_check: sigma1 did not converge", rep);
  }

  if (n == 1) {
    rep.sigma2 = 0.0;
    rep.iterations = used;
    return rep;
  }

  // sigma2 by one-step deflation against the computed top pair.
  std::vector<double> u1 = u, v1 = v;
  std::vector<double> x(n);
  uint64_t state = 0x5eed5eed5eedULL ^ (static_cast<uint64_t>(n) << 20) ^ static_cast<uint64_t>(g.d);
  for (int i = 0; i < n; ++i)
    x[i] = 2.0 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53) - 1.0;
  project_out(v1, x);
  if (normalize(x) == 0.0) {
    rep.sigma2 = 0.0;
    rep.iterations = used;
    return rep;
  }

  prev = -1.0;
  converged = false;
  std::vector<double> u2(n), z(n);
  while (used < max_iter) {
    ++used;
    a.multiply(x.data(), u2.data());
    project_out(u1, u2);
    const double s_left = normalize(u2);
    if (s_left < 1e-300) {  // deflated operator annihilates: sigma2 = 0
      rep.sigma2 = 0.0;
      converged = true;
      break;
    }
    at.multiply(u2.data(), z.data());
    project_out(v1, z);
    const double s_right = normalize(z);
    x = z;
    rep.sigma2 = s_right;
    if (prev >= 0.0 && std::fabs(s_right - prev) <= tol * std::max(s_right, 1e-300)) {
      converged = true;
      break;
    }
    prev = s_right;
  }
  rep.sigma2 = std::min(rep.sigma2, rep.sigma1);
  rep.iterations = used;
  if (!converged)
    throw SpectralConvergenceError("spectral_check: sigma2 did not converge", rep);
  return rep;
}

std::vector<std::pair<int32_t, int32_t>> sample_erdos_renyi_bipartite(int n, double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0))
    throw InvalidParameterError("sample_erdos_renyi_bipartite: p must be in [0, 1]");
  std::vector<std::pair<int32_t, int32_t>> edges;
  if (p == 0.0 || n == 0) return edges;
  const int64_t total = static_cast<int64_t>(n) * n;
  if (p == 1.0) {
    edges.reserve(total);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) edges.emplace_back(i, j);
    return edges;
  }
  // Geometric gap skipping over the linearized index space.
  const double log_q = std::log1p(-p);
  int64_t idx = -1;
  while (true) {
    const double r = std::max(rng.uniform(), 1e-300);
    idx += 1 + static_cast<int64_t>(std::floor(std::log(r) / log_q));
    if (idx >= total) break;
    edges.emplace_back(static_cast<int32_t>(idx / n), static_cast<int32_t>(idx % n));
  }
  return edges;
}

}  // namespace tam
