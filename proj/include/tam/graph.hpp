#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tam/rng.hpp"
#include "tam/sparse.hpp"

namespace tam {

// One sample of a random bipartite d-regular graph on n + n vertices.
// Both adjacency directions are kept; blocks are sorted ascending so the
// serialized form is canonical. Immutable after construction.
struct BipartiteRegularGraph {
  int n = 0, d = 0;
  std::vector<int32_t> left_adj;   // n*d; block i = sorted right neighbors of left vertex i
  std::vector<int32_t> right_adj;  // n*d; block j = sorted left neighbors of right vertex j

  const int32_t* left_neighbors(int i) const { return left_adj.data() + static_cast<size_t>(i) * d; }
  const int32_t* right_neighbors(int j) const { return right_adj.data() + static_cast<size_t>(j) * d; }
};

// Observed entries M_ij on a graph's edge set, stored aligned with both
// adjacency layouts for cache-friendly access from either side.
struct EdgeValues {
  std::vector<double> by_left;   // aligned with left_adj
  std::vector<double> by_right;  // aligned with right_adj
};

// 2N+1 independently sampled graphs plus observed values: index 0 drives
// initialization, 1..N the V-updates, N+1..2N the U-updates.
struct SampleSchedule {
  int n = 0, d = 0, N = 0;
  uint64_t seed = 0;
  std::vector<BipartiteRegularGraph> graphs;
  std::vector<EdgeValues> values;
};

struct SpectralReport {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double top_vector_flatness = 0.0;  // max |u1_i - 1/sqrt(n)| after sign fix
  int iterations = 0;
};

class SpectralConvergenceError : public ConvergenceError {
 public:
  SpectralConvergenceError(const std::string& msg, SpectralReport best)
      : ConvergenceError(msg), best_(best) {}
  const SpectralReport& best() const { return best_; }

 private:
  SpectralReport best_;
};

enum class SimpleStrategy {
  kAuto,    // exact rejection for d <= 4, switch repair above
  kReject,  // resample the whole matching on any parallel edge (exactly uniform)
  kRepair,  // fix parallel edges with random switches on the matching
};

// Uniform random matching of d replicas per vertex (configuration model),
// projected to a simple graph. Rejection resamples the entire matching, which
// is exactly uniform over simple graphs but has acceptance probability about
// exp(-(d-1)^2/2), so for larger d parallel edges are repaired by random
// switches instead. Throws SamplingFailureError when the retry/switch budget
// is exhausted, InvalidParameterError unless 1 <= d <= n.
BipartiteRegularGraph sample_bipartite_regular(int n, int d, Rng& rng,
                                               int max_retries = 10000,
                                               SimpleStrategy strategy = SimpleStrategy::kAuto);

// 2N+1 independent graphs with values filled from the entry oracle. Each
// graph's seed derives from (seed, "graph", t), so sampling is reproducible
// for any thread count.
SampleSchedule sample_rrg_schedule(int n, int d, int N,
                                   const std::function<double(int, int)>& matrix_oracle,
                                   uint64_t seed, int threads = 1,
                                   int max_retries = 10000,
                                   SimpleStrategy strategy = SimpleStrategy::kAuto);

// The sampled matrix P_Omega(M): M_ij at observed positions, structural zero
// elsewhere. The map overload validates that the keys match the edge set
// exactly and throws InconsistencyError otherwise.
CsrMatrix apply_sampling_operator(const BipartiteRegularGraph& g, const EdgeValues& values);
CsrMatrix apply_sampling_operator(const BipartiteRegularGraph& g,
                                  const std::map<std::pair<int, int>, double>& values);

// sigma1, sigma2 of the bi-adjacency matrix by power iteration with one-step
// deflation; stops when consecutive estimates change by at most tol
// (relative). Throws SpectralConvergenceError carrying the best estimates
// after max_iter matrix applications.
SpectralReport spectral_check(const BipartiteRegularGraph& g, double tol = 1e-8,
                              int max_iter = 5000);

// Each of the n^2 pairs independently with probability p (comparison sampler
// for the uniform-sampling regime).
std::vector<std::pair<int32_t, int32_t>> sample_erdos_renyi_bipartite(int n, double p, Rng& rng);

// --- serialization ---
// Graph text format: header "n d", then n lines of d right-neighbor indices.
void write_graph(const BipartiteRegularGraph& g, const std::string& path);
BipartiteRegularGraph read_graph(const std::string& path);

// Observed values as triplet CSV rows "i,j,value" (left-adjacency order).
void write_edge_values(const BipartiteRegularGraph& g, const EdgeValues& v, const std::string& path);
EdgeValues read_edge_values(const BipartiteRegularGraph& g, const std::string& path);

// Schedule directory: graph_XX.txt / values_XX.csv plus manifest.json.
void write_schedule(const SampleSchedule& s, const std::string& dir);
SampleSchedule read_schedule(const std::string& manifest_path);

// Build EdgeValues aligned with a graph from an entry oracle.
EdgeValues values_from_oracle(const BipartiteRegularGraph& g,
                              const std::function<double(int, int)>& oracle);

}  // namespace tam
