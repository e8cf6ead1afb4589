#include "tam/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "tam/dense_linalg.hpp"
#include "tam/errors.hpp"
#include "tam/kernels.hpp"
#include "tam/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tam {

double relative_error(const GroundTruth& truth, const TamResult& result) {
  const int n = truth.n, k = truth.k;
  if (result.U_final.rows() != n || result.U_final.cols() != k ||
      result.V_tilde_final.rows() != n || result.V_tilde_final.cols() != k)
    throw InvalidParameterError("relative_error: result shape does not match the ground truth");

  Matrix a(n, 2 * k), b(n, 2 * k);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < k; ++l) {
      a(i, l) = truth.Ustar(i, l);
      a(i, k + l) = result.U_final(i, l);
      b(i, l) = truth.Vstar(i, l) * truth.sigma[l];
      b(i, k + l) = -result.V_tilde_final(i, l);
    }
  Matrix r = thin_qr(a).r;  // 2k x 2k
  // ||A B^T||_F = ||B R^T||_F; computed as sqrt(sum of row dot products).
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < 2 * k; ++l) {
      double s = 0.0;
      for (int m = l; m < 2 * k; ++m) s += b(i, m) * r(l, m);  // R upper triangular
      acc += s * s;
    }
  return std::sqrt(acc) / truth.frob();
}

double relative_error_dense(const GroundTruth& truth, const TamResult& result) {
  const int n = truth.n;
  if (result.U_final.rows() != n)
    throw InvalidParameterError("relative_error_dense: shape mismatch");
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double d = truth.entry(i, j) - result.reconstruct_entry(i, j);
      acc += d * d;
    }
  return std::sqrt(acc) / truth.frob();
}

void ExperimentConfig::validate() const {
  if (n.empty() || k.empty() || d.empty() || epsilon.empty() || seeds.empty())
    throw InvalidParameterError("experiment config: grid axes must be nonempty");
  if (algorithms.empty())
    throw InvalidParameterError("experiment config: no algorithms selected");
  for (const std::string& a : algorithms)
    if (a != "tam" && a != "vanilla_am")
      throw InvalidParameterError("experiment config: unknown algorithm " + a);
  std::set<uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size())
    throw InvalidParameterError("experiment config: seeds must be distinct");
  if (instance.mode != "flat" && instance.mode != "adversarial" && instance.mode != "external")
    throw InvalidParameterError("experiment config: instance mode must be flat|adversarial|external");
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameterError("cannot open config: " + path);
  json j = json::parse(in);
  ExperimentConfig c;
  c.n = j.at("n").get<std::vector<int>>();
  c.k = j.at("k").get<std::vector<int>>();
  c.d = j.at("d").get<std::vector<int>>();
  c.epsilon = j.at("epsilon").get<std::vector<double>>();
  c.seeds = j.at("seeds").get<std::vector<uint64_t>>();
  if (j.contains("instance")) {
    const json& inst = j["instance"];
    c.instance.mode = inst.value("mode", std::string{"flat"});
    if (inst.contains("sigma")) c.instance.sigma = inst["sigma"].get<std::vector<double>>();
    c.instance.eta = inst.value("eta", 1e-5);
    c.instance.truth_dir = inst.value("truth_dir", std::string{});
  }
  if (j.contains("algorithms")) c.algorithms = j["algorithms"].get<std::vector<std::string>>();
  c.out_dir = j.value("out_dir", std::string{"sweep_out"});
  c.threads = j.value("threads", 1);
  c.beta = j.value("beta", 0.5);
  c.delta = j.value("delta", 0.1);
  c.N_override = j.value("N", 0);
  c.mu0_override = j.value("mu0", 0.0);
  c.validate();
  return c;
}

namespace {

std::vector<double> default_sigma(int k) {
  // kappa = 2 ladder from 2 down to 1.
  std::vector<double> s(k);
  for (int l = 0; l < k; ++l)
    s[l] = k == 1 ? 1.0 : 2.0 * std::pow(0.5, static_cast<double>(l) / (k - 1));
  return s;
}

GroundTruth make_instance(const ExperimentConfig& cfg, int n, int k, int d, uint64_t seed) {
  if (cfg.instance.mode == "flat") {
    std::vector<double> sigma = cfg.instance.sigma.empty() ? default_sigma(k) : cfg.instance.sigma;
    return gen_flat(n, k, sigma, derive_seed(seed, "instance"));
  }
  if (cfg.instance.mode == "adversarial")
    return gen_adversarial_gramian(n, k, d, derive_seed(seed, "instance"), cfg.instance.eta);
  return read_ground_truth(cfg.instance.truth_dir);
}

std::string make_cell_id(int n, int k, int d, double epsilon, uint64_t seed,
                         const std::string& algo) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "n%d_k%d_d%d_eps%g_s%llu_%s", n, k, d, epsilon,
                static_cast<unsigned long long>(seed), algo.c_str());
  return buf;
}

}  // namespace

CellResult run_cell(const ExperimentConfig& cfg, int n, int k, int d, double epsilon,
                    uint64_t seed, const std::string& algorithm, TamResult* result_out,
                    GroundTruth* truth_out) {
  CellResult cell;
  cell.cell_id = make_cell_id(n, k, d, epsilon, seed, algorithm);
  cell.n = n;
  cell.k = k;
  cell.d = d;
  cell.epsilon = epsilon;
  cell.seed = seed;
  cell.algorithm = algorithm;
  try {
    GroundTruth gt = make_instance(cfg, n, k, d, seed);
    if (gt.n != n || gt.k != k)
      throw InvalidParameterError("instance shape does not match the grid cell");

    TamConfig tc;
    tc.n = n;
    tc.k = k;
    tc.d = d;
    tc.N = cfg.N_override > 0 ? cfg.N_override : derive_iteration_count(epsilon);
    tc.beta = cfg.beta;
    tc.delta = cfg.delta;
    tc.epsilon = epsilon;
    tc.mu0 = cfg.mu0_override > 0.0 ? cfg.mu0_override : std::max(1.0, gt.mu0_actual);
    tc.seed = seed;
    tc.threads = 1;  // cells parallelize across the grid, not inside
    tc.svd_best_effort = true;  // sweep cells prefer a usable warm start over an error
    cell.mu0 = tc.mu0;

    SampleSchedule sched = sample_rrg_schedule(
        n, d, tc.N, [&gt](int i, int j) { return gt.entry(i, j); },
        derive_seed(seed, "schedule"));

    const auto tick = std::chrono::steady_clock::now();
    TamResult res = algorithm == "tam" ? run_tam(sched, tc, &gt) : run_vanilla_am(sched, tc, &gt);
    cell.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tick).count();

    cell.final_rel_err = relative_error(gt, res);
    cell.init_dist = res.init_dist_u;
    for (const IterationStats& st : res.trace) {
      cell.bad_total += st.bad_count_v + st.bad_count_u;
      cell.illcond_total += st.illcond_v + st.illcond_u;
    }
    cell.ok = true;
    if (result_out) *result_out = std::move(res);
    if (truth_out) *truth_out = std::move(gt);
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.message = e.what();
  }
  return cell;
}

SweepSummary run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);

  struct Point {
    int n, k, d;
    double epsilon;
    uint64_t seed;
    std::string algo;
  };
  std::vector<Point> grid;
  for (int n : cfg.n)
    for (int k : cfg.k)
      for (int d : cfg.d)
        for (double eps : cfg.epsilon)
          for (uint64_t seed : cfg.seeds)
            for (const std::string& algo : cfg.algorithms)
              grid.push_back({n, k, d, eps, seed, algo});

  SweepSummary summary;
  summary.cells.resize(grid.size());
  parallel_for(0, static_cast<int64_t>(grid.size()), cfg.threads,
               [&](int64_t lo, int64_t hi) {
                 for (int64_t i = lo; i < hi; ++i) {
                   const Point& p = grid[i];
                   TamResult res;
                   GroundTruth gt;
                   CellResult cell =
                       run_cell(cfg, p.n, p.k, p.d, p.epsilon, p.seed, p.algo, &res, &gt);
                   if (cell.ok) {
                     const fs::path dir = fs::path(cfg.out_dir) / cell.cell_id;
                     fs::create_directories(dir);
                     write_matrix_csv(res.U_final, (dir / "U_final.csv").string());
                     write_matrix_csv(res.V_tilde_final, (dir / "V_tilde_final.csv").string());
                     write_trace_csv(res.trace, (dir / "trace.csv").string());
                     json s;
                     s["relative_error"] = cell.final_rel_err;
                     s["init_dist_u"] = cell.init_dist;
                     s["bad_total"] = cell.bad_total;
                     s["illcond_total"] = cell.illcond_total;
                     s["wall_ms"] = cell.wall_ms;
                     s["mu0"] = cell.mu0;
                     std::ofstream out(dir / "summary.json");
                     out << s.dump(2) << '\n';
                   }
                   summary.cells[i] = std::move(cell);
                 }
               });

  for (const CellResult& c : summary.cells)
    if (!c.ok) ++summary.failures;

  // Results index written to a temp file, then atomically renamed.
  const fs::path tmp = fs::path(cfg.out_dir) / ".results_index.csv.tmp";
  {
    std::ofstream out(tmp);
    out << "cell_id,n,k,d,epsilon,seed,algorithm,status,mu0,final_rel_err,init_dist,"
           "bad_total,illcond_total,wall_ms,message\n";
    char buf[512];
    for (const CellResult& c : summary.cells) {
      std::snprintf(buf, sizeof buf, "%s,%d,%d,%d,%.17g,%llu,%s,%s,%.17g,%.17g,%.17g,%d,%d,%.6g,%s\n",
                    c.cell_id.c_str(), c.n, c.k, c.d, c.epsilon,
                    static_cast<unsigned long long>(c.seed), c.algorithm.c_str(),
                    c.ok ? "ok" : "failed", c.mu0, c.final_rel_err, c.init_dist,
                    c.bad_total, c.illcond_total, c.wall_ms, c.message.c_str());
      out << buf;
    }
  }
  fs::rename(tmp, fs::path(cfg.out_dir) / "results_index.csv");
  return summary;
}

ScalingReport runtime_scaling(const std::vector<int>& ns, int d, int k, int N,
                              uint64_t seed, int reps, int threads) {
  if (ns.size() < 1 || reps < 1)
    throw InvalidParameterError("runtime_scaling: need at least one size and one repetition");
  ScalingReport rep;
  struct Prepared {
    GroundTruth gt;
    SampleSchedule sched;
    TamConfig tc;
  };
  std::vector<Prepared> prepared;
  for (int n : ns) {
    Prepared p;
    p.gt = gen_flat(n, k, default_sigma(k), derive_seed(seed, "instance", n));
    p.sched = sample_rrg_schedule(
        n, d, N, [&p](int i, int j) { return p.gt.entry(i, j); },
        derive_seed(seed, "schedule", n));
    p.tc.n = n;
    p.tc.k = k;
    p.tc.d = d;
    p.tc.N = N;
    p.tc.mu0 = std::max(1.0, p.gt.mu0_actual);
    p.tc.seed = seed;
    p.tc.threads = threads;
    prepared.push_back(std::move(p));
    rep.entries.push_back(ScalingEntry{n, 0.0, {}});
  }
  for (const Prepared& p : prepared) (void)run_tam(p.sched, p.tc);  // untimed warm-up
  // Repetitions are interleaved across sizes so slow machine drift hits every
  // size equally instead of biasing the ratios.
  for (int r = 0; r < reps; ++r) {
    for (size_t i = 0; i < prepared.size(); ++i) {
      const auto tick = std::chrono::steady_clock::now();
      TamResult res = run_tam(prepared[i].sched, prepared[i].tc);
      (void)res;
      rep.entries[i].times_ms.push_back(std::chrono::duration<double, std::milli>(
                                            std::chrono::steady_clock::now() - tick).count());
    }
  }
  for (ScalingEntry& e : rep.entries) {
    std::vector<double> sorted = e.times_ms;
    std::sort(sorted.begin(), sorted.end());
    e.median_ms = sorted[sorted.size() / 2];
  }
  if (rep.entries.size() < 2) {
    rep.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
  } else {
    // Least-squares slope of log t against log n.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(rep.entries.size());
    for (const ScalingEntry& e : rep.entries) {
      const double x = std::log(static_cast<double>(e.n));
      const double y = std::log(std::max(e.median_ms, 1e-9));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    rep.fitted_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  return rep;
}

void write_scaling_csv(const ScalingReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open for writing: " + path);
  out << "n,median_ms,times_ms\n";
  for (const ScalingEntry& e : report.entries) {
    out << e.n << ',' << e.median_ms << ',';
    for (size_t i = 0; i < e.times_ms.size(); ++i)
      out << e.times_ms[i] << (i + 1 < e.times_ms.size() ? ';' : '\n');
  }
  if (std::isnan(report.fitted_exponent))
    out << "# fitted_exponent,n/a\n";
  else
    out << "# fitted_exponent," << report.fitted_exponent << '\n';
}

}  // namespace tam
