#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner-loop kernels. Every dense/sparse operation in the
// library funnels through these five primitives, so one runtime-dispatched
// SIMD implementation accelerates the whole pipeline. The scalar backend is
// the reference; vector backends must agree with it to floating-point
// round-off (equivalence-tested, not bit-exact: reductions reassociate).
namespace tam::kernels {

enum class Backend {
  kAuto,    // pick the best supported backend at first use
  kScalar,  // portable reference loops
  kAvx2,    // AVX2+FMA (x86-64)
};

// Select a backend. kAuto re-runs CPU detection; requesting an unsupported
// backend falls back to scalar. The TAM_KERNEL_BACKEND environment variable
// ("scalar", "avx2", "auto") overrides the default on first use.
void set_backend(Backend b);
Backend active_backend();
const char* backend_name();

double dot(const double* a, const double* b, size_t n);
double sumsq(const double* a, size_t n);
// y += alpha * x
void axpy(double alpha, const double* x, double* y, size_t n);
void scale(double* x, size_t n, double alpha);
// y[r] = sum_l vals[rowptr[r]+l] * x[cols[rowptr[r]+l]] for each row r.
void spmv(const int64_t* rowptr, const int32_t* cols, const double* vals,
          int rows, const double* x, double* y);

// Implementation tables (internal).
struct KernelTable {
  double (*dot)(const double*, const double*, size_t);
  double (*sumsq)(const double*, size_t);
  void (*axpy)(double, const double*, double*, size_t);
  void (*scale)(double*, size_t, double);
  void (*spmv)(const int64_t*, const int32_t*, const double*, int, const double*, double*);
};

const KernelTable& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const KernelTable& avx2_table();
bool cpu_has_avx2_fma();
#endif

}  // namespace tam::kernels
