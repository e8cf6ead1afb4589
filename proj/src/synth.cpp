#include "tam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "tam/dense_linalg.hpp"
#include "tam/errors.hpp"
#include "tam/kernels.hpp"
#include "tam/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tam {
namespace {

double factor_incoherence(const Matrix& w) {
  double mx = 0.0;
  for (int i = 0; i < w.rows(); ++i)
    mx = std::max(mx, kernels::sumsq(w.row(i), w.cols()));
  return mx * w.rows() / w.cols();
}

void validate_sigma(int k, const std::vector<double>& sigma) {
  if (static_cast<int>(sigma.size()) != k)
    throw InvalidParameterError("ground truth: sigma must have k entries");
  for (int l = 0; l < k; ++l) {
    if (!(sigma[l] > 0.0)) throw InvalidParameterError("ground truth: sigma must be positive");
    if (l > 0 && sigma[l] > sigma[l - 1])
      throw InvalidParameterError("ground truth: sigma must be nonincreasing");
  }
}

Matrix random_sign_orthonormal(int n, int k, Rng& rng) {
  Matrix x(n, k);
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  for (int i = 0; i < n; ++i) x(i, 0) = inv;
  for (int j = 1; j < k; ++j)
    for (int i = 0; i < n; ++i) x(i, j) = rng.uniform() < 0.5 ? -inv : inv;
  return thin_qr(x).q;
}

void finalize(GroundTruth& gt) {
  gt.mu0_actual = std::max(factor_incoherence(gt.Ustar), factor_incoherence(gt.Vstar));
  gt.kappa = gt.sigma.front() / gt.sigma.back();
}

}  // namespace

double GroundTruth::frob() const {
  return std::sqrt(kernels::sumsq(sigma.data(), sigma.size()));
}

GroundTruth gen_flat(int n, int k, std::vector<double> sigma, uint64_t seed) {
  if (k < 1 || k >= n) throw InvalidParameterError("gen_flat: need 1 <= k < n");
  validate_sigma(k, sigma);
  GroundTruth gt;
  gt.n = n;
  gt.k = k;
  gt.sigma = std::move(sigma);
  gt.seed = seed;
  gt.mode = "flat";
  if (k == 1) {
    gt.Ustar = Matrix(n, 1);
    const double inv = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) gt.Ustar(i, 0) = inv;
    gt.Vstar = gt.Ustar;
  } else {
    Rng rng(derive_seed(seed, "instance"));
    gt.Ustar = random_sign_orthonormal(n, k, rng);
    gt.Vstar = random_sign_orthonormal(n, k, rng);
  }
  finalize(gt);
  return gt;
}

GroundTruth gen_adversarial_gramian(int n, int k, int d, uint64_t seed, double eta,
                                    double cluster_fraction) {
  if (k < 2) throw InvalidParameterError("gen_adversarial_gramian: need k >= 2");
  if (k >= n || d < 1) throw InvalidParameterError("gen_adversarial_gramian: need k < n, d >= 1");
  if (cluster_fraction < 0.0 || cluster_fraction >= 1.0)
    throw InvalidParameterError("gen_adversarial_gramian: cluster_fraction in [0, 1)");

  // Cluster large enough that a right vertex lands all d neighbors inside it
  // a handful of times per graph.
  const double rho = cluster_fraction > 0.0
                         ? cluster_fraction
                         : std::clamp(std::pow(5.0 / n, 1.0 / d), 0.5, 0.9);
  const int h = std::max(k, std::min(n - k, static_cast<int>(std::lround(rho * n))));

  Rng rng(derive_seed(seed, "instance"));
  Matrix x(n, k);
  for (int i = 0; i < n; ++i) {
    const bool in_cluster = i < h;
    for (int l = 0; l < k; ++l) {
      const double big = rng.uniform() < 0.5 ? -1.0 : 1.0;
      if (in_cluster)
        x(i, l) = l == 0 ? big : eta * rng.normal();
      else
        x(i, l) = l == 0 ? eta * rng.normal() : big;
    }
  }
  GroundTruth gt;
  gt.n = n;
  gt.k = k;
  gt.seed = seed;
  gt.mode = "adversarial";
  gt.Ustar = thin_qr(x).q;
  gt.Vstar = random_sign_orthonormal(n, k, rng);
  gt.sigma.resize(k);
  for (int l = 0; l < k; ++l)
    gt.sigma[l] = 2.0 * std::pow(0.5, static_cast<double>(l) / (k - 1));
  finalize(gt);
  return gt;
}

void write_ground_truth(const GroundTruth& gt, const std::string& dir) {
  fs::create_directories(dir);
  write_matrix_csv(gt.Ustar, (fs::path(dir) / "Ustar.csv").string());
  write_matrix_csv(gt.Vstar, (fs::path(dir) / "Vstar.csv").string());
  json meta;
  meta["n"] = gt.n;
  meta["k"] = gt.k;
  meta["sigma"] = gt.sigma;
  meta["mu0_actual"] = gt.mu0_actual;
  meta["kappa"] = gt.kappa;
  meta["seed"] = gt.seed;
  meta["mode"] = gt.mode;
  std::ofstream out(fs::path(dir) / "meta.json");
  out << meta.dump(2) << '\n';
}

GroundTruth read_ground_truth(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "meta.json");
  if (!in) throw Error("cannot open: " + dir + "/meta.json");
  json meta = json::parse(in);
  GroundTruth gt;
  gt.n = meta.at("n").get<int>();
  gt.k = meta.at("k").get<int>();
  gt.sigma = meta.at("sigma").get<std::vector<double>>();
  gt.mu0_actual = meta.at("mu0_actual").get<double>();
  gt.kappa = meta.at("kappa").get<double>();
  gt.seed = meta.value("seed", uint64_t{0});
  gt.mode = meta.value("mode", std::string{});
  gt.Ustar = read_matrix_csv((fs::path(dir) / "Ustar.csv").string());
  gt.Vstar = read_matrix_csv((fs::path(dir) / "Vstar.csv").string());
  if (gt.Ustar.rows() != gt.n || gt.Ustar.cols() != gt.k || gt.Vstar.rows() != gt.n ||
      gt.Vstar.cols() != gt.k)
    throw InconsistencyError("ground truth factors disagree with meta.json");
  return gt;
}

}  // namespace tam
