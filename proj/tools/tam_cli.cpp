// Command-line front end: instance generation, schedule sampling, solver
// runs, diagnostics, runtime benchmarks, and config-driven sweeps.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tam/diagnostics.hpp"
#include "tam/harness.hpp"
#include "tam/kernels.hpp"
#include "tam/subspace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stoi(cell));
  return out;
}

struct GenArgs {
  int n = 1024, k = 2, d = 8;
  std::string mode = "flat";
  std::string sigma;
  double eta = 1e-5;
  uint64_t seed = 0;
  std::string out = "truth";
};

int cmd_gen(const GenArgs& a) {
  tam::GroundTruth gt;
  if (a.mode == "flat") {
    std::vector<double> sigma;
    if (!a.sigma.empty()) {
      sigma = parse_double_list(a.sigma);
    } else {
      sigma.resize(a.k);  // default: kappa = 2 ladder
      for (int l = 0; l < a.k; ++l)
        sigma[l] = a.k == 1 ? 1.0 : 2.0 * std::pow(0.5, static_cast<double>(l) / (a.k - 1));
    }
    gt = tam::gen_flat(a.n, a.k, sigma, a.seed);
  } else if (a.mode == "adversarial") {
    gt = tam::gen_adversarial_gramian(a.n, a.k, a.d, a.seed, a.eta);
  } else {
    throw tam::InvalidParameterError("gen: mode must be flat or adversarial");
  }
  tam::write_ground_truth(gt, a.out);
  json j;
  j["out"] = a.out;
  j["n"] = gt.n;
  j["k"] = gt.k;
  j["mu0_actual"] = gt.mu0_actual;
  j["kappa"] = gt.kappa;
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct SampleArgs {
  std::string truth = "truth";
  int d = 8, N = 0;
  double epsilon = 1e-3;
  uint64_t seed = 0;
  int threads = 1;
  std::string out = "schedule";
};

int cmd_sample(const SampleArgs& a) {
  tam::GroundTruth gt = tam::read_ground_truth(a.truth);
  const int N = a.N > 0 ? a.N : tam::derive_iteration_count(a.epsilon);
  tam::SampleSchedule sched = tam::sample_rrg_schedule(
      gt.n, a.d, N, [&gt](int i, int j) { return gt.entry(i, j); }, a.seed, a.threads);
  tam::write_schedule(sched, a.out);
  json j;
  j["out"] = a.out;
  j["n"] = sched.n;
  j["d"] = sched.d;
  j["N"] = sched.N;
  j["graphs"] = 2 * N + 1;
  j["samples_per_graph"] = static_cast<int64_t>(gt.n) * a.d;
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct RunArgs {
  std::string schedule = "schedule/manifest.json";
  std::string truth;
  std::string algo = "tam";
  int k = 0;
  double beta = 0.5, delta = 0.1, epsilon = 1e-3, mu0 = 0.0;
  uint64_t seed = 0;
  int threads = 1;
  std::string out = "result";
};

int cmd_run(const RunArgs& a) {
  tam::SampleSchedule sched = tam::read_schedule(a.schedule);
  tam::GroundTruth gt;
  const bool have_truth = !a.truth.empty();
  if (have_truth) gt = tam::read_ground_truth(a.truth);

  tam::TamConfig tc;
  tc.n = sched.n;
  tc.k = a.k > 0 ? a.k : (have_truth ? gt.k : 0);
  if (tc.k <= 0) throw tam::InvalidParameterError("run: --k required without --truth");
  tc.d = sched.d;
  tc.N = sched.N;
  tc.beta = a.beta;
  tc.delta = a.delta;
  tc.epsilon = a.epsilon;
  tc.mu0 = a.mu0 > 0.0 ? a.mu0 : (have_truth ? std::max(1.0, gt.mu0_actual) : 1.0);
  tc.seed = a.seed;
  tc.threads = a.threads;

  const auto tick = std::chrono::steady_clock::now();
  tam::TamResult res = a.algo == "vanilla_am" ? tam::run_vanilla_am(sched, tc, have_truth ? &gt : nullptr)
                                              : tam::run_tam(sched, tc, have_truth ? &gt : nullptr);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - tick).count();

  fs::create_directories(a.out);
  tam::write_matrix_csv(res.U_final, (fs::path(a.out) / "U_final.csv").string());
  tam::write_matrix_csv(res.V_tilde_final, (fs::path(a.out) / "V_tilde_final.csv").string());
  tam::write_trace_csv(res.trace, (fs::path(a.out) / "trace.csv").string());

  json s;
  s["algorithm"] = a.algo;
  s["n"] = tc.n;
  s["k"] = tc.k;
  s["d"] = tc.d;
  s["N"] = tc.N;
  s["mu0"] = tc.mu0;
  s["wall_ms"] = wall_ms;
  s["kernel_backend"] = tam::kernels::backend_name();
  int bad_total = 0, ill_total = 0;
  for (const auto& st : res.trace) {
    bad_total += st.bad_count_v + st.bad_count_u;
    ill_total += st.illcond_v + st.illcond_u;
  }
  s["bad_total"] = bad_total;
  s["illcond_total"] = ill_total;
  if (have_truth) {
    s["relative_error"] = tam::relative_error(gt, res);
    s["init_dist_u"] = res.init_dist_u;
  }
  std::ofstream out(fs::path(a.out) / "summary.json");
  out << s.dump(2) << '\n';
  std::cout << s.dump(2) << '\n';
  return 0;
}

struct DiagnoseArgs {
  std::string factor;
  std::string graph;
  std::string truth;
  double beta = 0.5, delta = 0.1, mu0 = 1.0, zeta = 0.5, tau = 0.25, epsilon = 1e-3;
  int trials = 0;
  uint64_t seed = 0;
  std::string dump_bad_set;
  std::string out;
  std::string format = "json";
};

int cmd_diagnose(const DiagnoseArgs& a) {
  tam::Matrix w = tam::read_matrix_csv(a.factor);
  json rep;
  rep["rows"] = w.rows();
  rep["cols"] = w.cols();
  rep["incoherence"] = tam::incoherence_of(w);

  tam::BipartiteRegularGraph g;
  const bool have_graph = !a.graph.empty();
  if (have_graph) {
    g = tam::read_graph(a.graph);
    tam::BadSetReport bs = tam::bad_set(w, g, a.beta, a.mu0, a.zeta);
    rep["bad_set"] = {{"count", bs.indices.size()},
                      {"fraction", bs.fraction},
                      {"baseline_bound", bs.baseline_bound}};
    if (!a.dump_bad_set.empty()) tam::write_index_dump(bs.indices, a.dump_bad_set);
    if (a.trials > 0) {
      tam::Rng rng(tam::derive_seed(a.seed, "diag"));
      rep["subset_isometry_failure_fraction"] =
          tam::subset_isometry_test(w, g.d, a.delta, a.trials, rng);
    }
  }
  if (!a.truth.empty()) {
    tam::GroundTruth gt = tam::read_ground_truth(a.truth);
    const tam::Matrix& ustar = gt.Ustar;
    rep["dist_to_truth"] = tam::subspace_dist(w, ustar);
    tam::DeviantRowsBound drb = tam::deviant_rows_bound_check(w, ustar, std::max(1.0, gt.mu0_actual), a.tau);
    rep["deviant_rows_bound"] = {{"gamma", drb.gamma}, {"count", drb.count},
                                 {"lhs", drb.lhs},     {"rhs", drb.rhs},
                                 {"holds", drb.holds}};
    if (have_graph) {
      tam::BadSetBoundReport bb = tam::bad_set_bound_check(w, ustar, g, a.beta, a.delta,
                                                           std::max(1.0, gt.mu0_actual), a.zeta);
      rep["bad_set_bounds"] = {{"gamma", bb.gamma},
                               {"fraction", bb.fraction},
                               {"bound_baseline", bb.bound_baseline},
                               {"baseline_holds", bb.baseline_holds},
                               {"rate_applicable", bb.rate_applicable},
                               {"bound_distance", bb.bound_distance},
                               {"distance_holds", bb.distance_holds},
                               {"bound_isometry", bb.bound_isometry},
                               {"isometry_holds", bb.isometry_holds}};
      tam::ErrorTermReport er = tam::error_term(w, gt, g, a.beta, a.epsilon);
      rep["error_term"] = {{"f_norm_over_sigma_k", er.f_norm_over_sigma_k},
                           {"decay_bound", er.decay_bound},
                           {"satisfied", er.satisfied},
                           {"dist_u", er.dist_u}};
    }
  }
  const std::string text = rep.dump(2) + "\n";
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    out << text;
  }
  std::cout << text;
  return 0;
}

struct BenchArgs {
  std::string sizes = "2000,4000";
  int d = 20, k = 2, N = 5, reps = 5, threads = 1;
  uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

int cmd_bench(const BenchArgs& a) {
  tam::ScalingReport rep =
      tam::runtime_scaling(parse_int_list(a.sizes), a.d, a.k, a.N, a.seed, a.reps, a.threads);
  if (a.format == "json") {
    json j;
    for (const auto& e : rep.entries)
      j["entries"].push_back({{"n", e.n}, {"median_ms", e.median_ms}, {"times_ms", e.times_ms}});
    if (std::isnan(rep.fitted_exponent))
      j["fitted_exponent"] = nullptr;
    else
      j["fitted_exponent"] = rep.fitted_exponent;
    std::cout << j.dump(2) << '\n';
    if (!a.out.empty()) {
      std::ofstream out(a.out);
      out << j.dump(2) << '\n';
    }
  } else {
    if (!a.out.empty()) tam::write_scaling_csv(rep, a.out);
    for (const auto& e : rep.entries)
      std::printf("n=%d median_ms=%.3f\n", e.n, e.median_ms);
    if (std::isnan(rep.fitted_exponent))
      std::printf("fitted_exponent=n/a\n");
    else
      std::printf("fitted_exponent=%.3f\n", rep.fitted_exponent);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix completion on unions of random regular bipartite samplings"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* c_gen = app.add_subcommand("gen", "generate a ground-truth instance");
  c_gen->add_option("--n", gen.n);
  c_gen->add_option("--k", gen.k);
  c_gen->add_option("--d", gen.d, "degree hint for adversarial cluster sizing");
  c_gen->add_option("--mode", gen.mode, "flat|adversarial");
  c_gen->add_option("--sigma", gen.sigma, "comma-separated singular values");
  c_gen->add_option("--eta", gen.eta);
  c_gen->add_option("--seed", gen.seed);
  c_gen->add_option("--out", gen.out);

  SampleArgs sample;
  CLI::App* c_sample = app.add_subcommand("sample", "sample an observation schedule");
  c_sample->add_option("--truth", sample.truth)->required();
  c_sample->add_option("--d", sample.d)->required();
  c_sample->add_option("--N", sample.N, "iteration count (default: derived from --epsilon)");
  c_sample->add_option("--epsilon", sample.epsilon);
  c_sample->add_option("--seed", sample.seed);
  c_sample->add_option("--threads", sample.threads);
  c_sample->add_option("--out", sample.out);

  RunArgs run;
  CLI::App* c_run = app.add_subcommand("run", "run the solver on a schedule");
  c_run->add_option("--schedule", run.schedule)->required();
  c_run->add_option("--truth", run.truth);
  c_run->add_option("--algo", run.algo, "tam|vanilla_am");
  c_run->add_option("--k", run.k);
  c_run->add_option("--beta", run.beta);
  c_run->add_option("--delta", run.delta);
  c_run->add_option("--epsilon", run.epsilon);
  c_run->add_option("--mu0", run.mu0, "0 = measure from truth");
  c_run->add_option("--seed", run.seed);
  c_run->add_option("--threads", run.threads);
  c_run->add_option("--out", run.out);

  DiagnoseArgs diag;
  CLI::App* c_diag = app.add_subcommand("diagnose", "analyze a saved factor");
  c_diag->add_option("--factor", diag.factor)->required();
  c_diag->add_option("--graph", diag.graph);
  c_diag->add_option("--truth", diag.truth);
  c_diag->add_option("--beta", diag.beta);
  c_diag->add_option("--delta", diag.delta);
  c_diag->add_option("--mu0", diag.mu0);
  c_diag->add_option("--zeta", diag.zeta);
  c_diag->add_option("--tau", diag.tau);
  c_diag->add_option("--epsilon", diag.epsilon);
  c_diag->add_option("--trials", diag.trials, "subset-isometry Monte Carlo trials");
  c_diag->add_option("--seed", diag.seed);
  c_diag->add_option("--dump-bad-set", diag.dump_bad_set, "newline-delimited index file");
  c_diag->add_option("--out", diag.out);
  c_diag->add_option("--format", diag.format, "json");

  BenchArgs bench;
  CLI::App* c_bench = app.add_subcommand("bench", "runtime scaling across sizes");
  c_bench->add_option("--sizes", bench.sizes, "comma-separated n values");
  c_bench->add_option("--d", bench.d);
  c_bench->add_option("--k", bench.k);
  c_bench->add_option("--N", bench.N);
  c_bench->add_option("--reps", bench.reps);
  c_bench->add_option("--threads", bench.threads);
  c_bench->add_option("--seed", bench.seed);
  c_bench->add_option("--out", bench.out);
  c_bench->add_option("--format", bench.format, "csv|json");

  std::string sweep_config;
  std::string sweep_out;
  int sweep_threads = 0;
  CLI::App* c_sweep = app.add_subcommand("sweep", "config-driven grid execution");
  c_sweep->add_option("--config", sweep_config)->required();
  c_sweep->add_option("--out", sweep_out, "override out_dir");
  c_sweep->add_option("--threads", sweep_threads, "override threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1
  }

  try {
    if (c_gen->parsed()) return cmd_gen(gen);
    if (c_sample->parsed()) return cmd_sample(sample);
    if (c_run->parsed()) return cmd_run(run);
    if (c_diag->parsed()) return cmd_diagnose(diag);
    if (c_bench->parsed()) return cmd_bench(bench);
    if (c_sweep->parsed()) {
      tam::ExperimentConfig cfg = tam::ExperimentConfig::from_json_file(sweep_config);
      if (!sweep_out.empty()) cfg.out_dir = sweep_out;
      if (sweep_threads > 0) cfg.threads = sweep_threads;
      tam::SweepSummary summary = tam::run_sweep(cfg);
      std::printf("sweep: %zu cells, %d failed, index at %s/results_index.csv\n",
                  summary.cells.size(), summary.failures, cfg.out_dir.c_str());
      return summary.failures > 0 ? 3 : 0;
    }
  } catch (const tam::InvalidParameterError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const tam::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
