#include "tam/kernels.hpp"

namespace tam::kernels {
namespace {

double dot_scalar(const double* a, const double* b, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sumsq_scalar(const double* a, size_t n) {
  double s = 0.0;
  for (size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, size_t n) {
  for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double* x, size_t n, double alpha) {
  for (size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void spmv_scalar(const int64_t* rowptr, const int32_t* cols, const double* vals,
                 int rows, const double* x, double* y) {
  for (int r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int64_t p = rowptr[r]; p < rowptr[r + 1]; ++p) s += vals[p] * x[cols[p]];
    y[r] = s;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{dot_scalar, sumsq_scalar, axpy_scalar, scale_scalar, spmv_scalar};
  return t;
}

}  // namespace tam::kernels
