#pragma once

#include <cstddef>

// Data-parallel inner loops used by the cell-based modules. Every kernel has
// a scalar reference implementation and, on x86-64, an AVX2 variant. The
// active variant is chosen once at runtime from CPU capabilities and can be
// pinned with force_backend() or the FVMT_KERNEL_ISA environment variable
// (values: "scalar", "avx2").
//
// Elementwise kernels (backward_diff, axpy, combine_flux) are bit-identical
// across backends: both paths perform the same per-element operation sequence
// and the kernel translation units are compiled with FP contraction off.
// Reductions differ only in association order.
namespace fvmt::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
void force_backend(Backend b);
const char* backend_name(Backend b);
bool avx2_available();

double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double sum_sq_diff(const double* x, const double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);

// out[0] = 0, out[i] = (in[i] - in[i-1]) * inv_dx for i >= 1.
void backward_diff(const double* in, double* out, std::size_t n, double inv_dx);

// y[i] += a * x[i].
void axpy(double a, const double* x, double* y, std::size_t n);

// flux[i] = (v[i+1] - v[i]) * inv_dx + bmid[i] * p[i] for i = 0..m-1, where v
// has m+1 entries. The flux between adjacent cells given midpoint-coefficient
// and pressure values.
void combine_flux(const double* v, const double* bmid, const double* p, double* flux,
                  std::size_t m, double inv_dx);

// Direct entry points, used by the equivalence tests.
namespace scalar_impl {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double sum_sq_diff(const double* x, const double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);
void backward_diff(const double* in, double* out, std::size_t n, double inv_dx);
void axpy(double a, const double* x, double* y, std::size_t n);
void combine_flux(const double* v, const double* bmid, const double* p, double* flux,
                  std::size_t m, double inv_dx);
} // namespace scalar_impl

namespace avx2_impl {
double sum(const double* x, std::size_t n);
double dot(const double* x, const double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
double sum_sq_diff(const double* x, const double* y, std::size_t n);
double max_abs(const double* x, std::size_t n);
void backward_diff(const double* in, double* out, std::size_t n, double inv_dx);
void axpy(double a, const double* x, double* y, std::size_t n);
void combine_flux(const double* v, const double* bmid, const double* p, double* flux,
                  std::size_t m, double inv_dx);
} // namespace avx2_impl

} // namespace fvmt::kernels
