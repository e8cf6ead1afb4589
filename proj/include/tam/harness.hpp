#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tam/synth.hpp"
#include "tam/tam.hpp"

namespace tam {

// ||M - U_final Vtilde^T||_F / ||M||_F computed in factored form: stack
// A = [U* U], B = [V* diag(sigma), -Vtilde], then ||A B^T||_F = ||B R_A^T||_F
// with R_A from the thin QR of A. O(n k^2), never materializes n x n, and
// stable down to machine-zero residuals (no large-term cancellation).
double relative_error(const GroundTruth& truth, const TamResult& result);

// Dense counterpart for small n (test oracle and small-instance reporting).
double relative_error_dense(const GroundTruth& truth, const TamResult& result);

struct InstanceSpec {
  std::string mode = "flat";  // flat | adversarial | external
  std::vector<double> sigma;  // flat mode; defaults to kappa=2 ladder
  double eta = 1e-5;          // adversarial cluster spread
  std::string truth_dir;      // external mode
};

struct ExperimentConfig {
  std::vector<int> n, k, d;
  std::vector<double> epsilon;
  std::vector<uint64_t> seeds;
  InstanceSpec instance;
  std::vector<std::string> algorithms = {"tam"};
  std::string out_dir = "sweep_out";
  int threads = 1;
  double beta = 0.5, delta = 0.1;
  int N_override = 0;     // 0: derive from epsilon
  double mu0_override = 0.0;  // 0: measured from the instance

  void validate() const;
  static ExperimentConfig from_json_file(const std::string& path);
};

struct CellResult {
  std::string cell_id;
  int n = 0, k = 0, d = 0;
  double epsilon = 0.0;
  uint64_t seed = 0;
  std::string algorithm;
  bool ok = false;
  std::string message;
  double mu0 = 0.0;
  double final_rel_err = -1.0;
  double init_dist = -1.0;
  int bad_total = 0, illcond_total = 0;
  double wall_ms = 0.0;
};

struct SweepSummary {
  std::vector<CellResult> cells;
  int failures = 0;
};

// Runs the full grid; each cell is written under out_dir/<cell_id>/ and the
// results index lands in out_dir/results_index.csv via atomic rename.
// Failed cells are recorded and the sweep continues.
SweepSummary run_sweep(const ExperimentConfig& config);

// Instantiate + sample + run one cell (no files written).
CellResult run_cell(const ExperimentConfig& config, int n, int k, int d,
                    double epsilon, uint64_t seed, const std::string& algorithm,
                    TamResult* result_out = nullptr, GroundTruth* truth_out = nullptr);

struct ScalingEntry {
  int n = 0;
  double median_ms = 0.0;
  std::vector<double> times_ms;
};

struct ScalingReport {
  std::vector<ScalingEntry> entries;
  double fitted_exponent = 0.0;  // NaN when fewer than two sizes
};

// Times run_tam (initialization + iterations) over the given sizes at fixed
// d, k, N; reps repetitions per size, median reported.
ScalingReport runtime_scaling(const std::vector<int>& ns, int d, int k, int N,
                              uint64_t seed, int reps, int threads = 1);

void write_scaling_csv(const ScalingReport& report, const std::string& path);

}  // namespace tam
