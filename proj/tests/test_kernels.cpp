#include <doctest.h>

#include <cmath>
#include <vector>

#include "tam/kernels.hpp"
#include "tam/rng.hpp"

using namespace tam;

namespace {

struct BackendGuard {
  kernels::Backend saved;
  BackendGuard() : saved(kernels::active_backend()) {}
  ~BackendGuard() { kernels::set_backend(saved); }
};

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  return kernels::cpu_has_avx2_fma();
#else
  return false;
#endif
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference values") {
  BackendGuard guard;
  kernels::set_backend(kernels::Backend::kScalar);
  std::vector<double> a{1.0, 2.0, 3.0}, b{4.0, -5.0, 6.0};
  CHECK(kernels::dot(a.data(), b.data(), 3) == doctest::Approx(12.0));
  CHECK(kernels::sumsq(a.data(), 3) == doctest::Approx(14.0));
  kernels::axpy(2.0, a.data(), b.data(), 3);
  CHECK(b[0] == doctest::Approx(6.0));
  CHECK(b[2] == doctest::Approx(12.0));
  kernels::scale(a.data(), 3, -1.0);
  CHECK(a[1] == doctest::Approx(-2.0));
}

// Vector backends must agree with the scalar reference on every kernel,
// including ragged lengths that exercise the remainder loops.
TEST_CASE("backend equivalence across lengths") {
  if (!avx2_available()) return;
  BackendGuard guard;
  Rng rng(42);
  for (size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 64u, 255u, 1000u, 1023u}) {
    std::vector<double> a(n), b(n);
    for (size_t i = 0; i < n; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
    }
    kernels::set_backend(kernels::Backend::kScalar);
    const double dot_s = kernels::dot(a.data(), b.data(), n);
    const double ss_s = kernels::sumsq(a.data(), n);
    std::vector<double> y_s = b;
    kernels::axpy(1.7, a.data(), y_s.data(), n);
    std::vector<double> x_s = a;
    kernels::scale(x_s.data(), n, 0.3);

    kernels::set_backend(kernels::Backend::kAvx2);
    REQUIRE(kernels::active_backend() == kernels::Backend::kAvx2);
    const double dot_v = kernels::dot(a.data(), b.data(), n);
    const double ss_v = kernels::sumsq(a.data(), n);
    std::vector<double> y_v = b;
    kernels::axpy(1.7, a.data(), y_v.data(), n);
    std::vector<double> x_v = a;
    kernels::scale(x_v.data(), n, 0.3);

    const double tol = 1e-13 * (1.0 + std::sqrt(static_cast<double>(n)));
    CHECK(std::fabs(dot_s - dot_v) <= tol * (1.0 + std::fabs(dot_s)));
    CHECK(std::fabs(ss_s - ss_v) <= tol * (1.0 + ss_s));
    for (size_t i = 0; i < n; ++i) {
      CHECK(y_s[i] == doctest::Approx(y_v[i]).epsilon(1e-14));
      CHECK(x_s[i] == doctest::Approx(x_v[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("spmv equivalence and correctness") {
  Rng rng(7);
  const int rows = 37, cols = 53;
  std::vector<int64_t> rowptr{0};
  std::vector<int32_t> colidx;
  std::vector<double> vals;
  for (int r = 0; r < rows; ++r) {
    const int nnz = rng.uniform_int(9);  // includes empty rows
    for (int e = 0; e < nnz; ++e) {
      colidx.push_back(rng.uniform_int(cols));
      vals.push_back(rng.normal());
    }
    rowptr.push_back(static_cast<int64_t>(colidx.size()));
  }
  std::vector<double> x(cols);
  for (double& v : x) v = rng.normal();

  std::vector<double> expect(rows, 0.0);
  for (int r = 0; r < rows; ++r)
    for (int64_t p = rowptr[r]; p < rowptr[r + 1]; ++p)
      expect[r] += vals[p] * x[colidx[p]];

  BackendGuard guard;
  for (auto backend : {kernels::Backend::kScalar, kernels::Backend::kAvx2}) {
    if (backend == kernels::Backend::kAvx2 && !avx2_available()) continue;
    kernels::set_backend(backend);
    std::vector<double> y(rows, -1.0);
    kernels::spmv(rowptr.data(), colidx.data(), vals.data(), rows, x.data(), y.data());
    for (int r = 0; r < rows; ++r) CHECK(y[r] == doctest::Approx(expect[r]).epsilon(1e-13));
  }
}

TEST_CASE("unsupported backend request falls back to scalar") {
  BackendGuard guard;
  kernels::set_backend(kernels::Backend::kScalar);
  CHECK(kernels::active_backend() == kernels::Backend::kScalar);
  CHECK(std::string(kernels::backend_name()) == "scalar");
}

}  // TEST_SUITE
