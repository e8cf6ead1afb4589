#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tam/matrix.hpp"

namespace tam {

// A known rank-k matrix M = Ustar diag(sigma) Vstar^T, exposed by entry so
// n x n storage is never needed. The incoherence is measured, never assumed.
struct GroundTruth {
  int n = 0, k = 0;
  Matrix Ustar, Vstar;         // orthonormal n x k
  std::vector<double> sigma;   // descending, positive
  double mu0_actual = 0.0;     // max over both factors of (n/k) max_i ||row_i||^2
  double kappa = 0.0;          // sigma[0] / sigma[k-1]
  uint64_t seed = 0;
  std::string mode;            // "flat" or "adversarial"

  double entry(int i, int j) const {
    double s = 0.0;
    for (int l = 0; l < k; ++l) s += Ustar(i, l) * sigma[l] * Vstar(j, l);
    return s;
  }
  double frob() const;  // ||M||_F = ||sigma||_2
};

// Near-flat factors: random-sign columns orthonormalized, rows close to the
// incoherence floor mu0 ~ 1. For k = 1 the factors are exactly the flat
// vector (deterministic), which makes analytic recovery tests exact.
GroundTruth gen_flat(int n, int k, std::vector<double> sigma, uint64_t seed);

// Factor with a cluster of nearly parallel rows (within eta of a shared
// direction) occupying a fraction of the index set chosen so that, at degree
// d, some right vertices draw all their neighbors from the cluster and see a
// nearly rank-deficient row block. cluster_fraction = 0 sizes the cluster
// automatically from (n, d). Requires k >= 2.
GroundTruth gen_adversarial_gramian(int n, int k, int d, uint64_t seed, double eta = 1e-5,
                                    double cluster_fraction = 0.0);

// Factor CSVs plus meta.json in a directory.
void write_ground_truth(const GroundTruth& gt, const std::string& dir);
GroundTruth read_ground_truth(const std::string& dir);

}  // namespace tam
