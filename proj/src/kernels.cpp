#include "tam/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace tam::kernels {
namespace {

struct Active {
  const KernelTable* table;
  Backend backend;
};

Backend detect_best() {
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2_fma()) return Backend::kAvx2;
#endif
  return Backend::kScalar;
}

Backend env_override(Backend fallback) {
  const char* e = std::getenv("TAM_KERNEL_BACKEND");
  if (!e) return fallback;
  if (std::strcmp(e, "scalar") == 0) return Backend::kScalar;
  if (std::strcmp(e, "avx2") == 0) return Backend::kAvx2;
  return fallback;
}

Active resolve(Backend req) {
  if (req == Backend::kAuto) req = detect_best();
#if defined(__x86_64__) || defined(_M_X64)
  if (req == Backend::kAvx2 && cpu_has_avx2_fma()) return {&avx2_table(), Backend::kAvx2};
#endif
  return {&scalar_table(), Backend::kScalar};
}

Active& active() {
  static Active a = resolve(env_override(Backend::kAuto));
  return a;
}

}  // namespace

void set_backend(Backend b) { active() = resolve(b); }

Backend active_backend() { return active().backend; }

const char* backend_name() {
  switch (active().backend) {
    case Backend::kAvx2: return "avx2";
    case Backend::kScalar: return "scalar";
    default: return "auto";
  }
}

double dot(const double* a, const double* b, size_t n) { return active().table->dot(a, b, n); }
double sumsq(const double* a, size_t n) { return active().table->sumsq(a, n); }
void axpy(double alpha, const double* x, double* y, size_t n) { active().table->axpy(alpha, x, y, n); }
void scale(double* x, size_t n, double alpha) { active().table->scale(x, n, alpha); }
void spmv(const int64_t* rowptr, const int32_t* cols, const double* vals,
          int rows, const double* x, double* y) {
  active().table->spmv(rowptr, cols, vals, rows, x, y);
}

}  // namespace tam::kernels
