// AVX2 variants of the cell-loop kernels. Elementwise kernels mirror the
// scalar operation order exactly (mul/add, no FMA) so results are
// bit-identical; reductions use lane accumulators and differ from the scalar
// path only in summation order.

#include "fvmt/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define FVMT_X86 1
#else
#define FVMT_X86 0
#endif

#if FVMT_X86
#include <immintrin.h>
#endif

#include <cmath>

namespace fvmt::kernels {

#if FVMT_X86

bool avx2_available() {
    return __builtin_cpu_supports("avx2") != 0;
}

namespace avx2_impl {

namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

inline double hmax(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_max_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_max_sd(lo, shuf));
}

const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

} // namespace

double sum(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(x + i));
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i];
    return r;
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i] * y[i];
    return r;
}

double sum_squares(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double r = hsum(acc);
    for (; i < n; ++i) r += x[i] * x[i];
    return r;
}

double sum_sq_diff(const double* x, const double* y,
                                                   std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double r = hsum(acc);
    for (; i < n; ++i) {
        double d = x[i] - y[i];
        r += d * d;
    }
    return r;
}

double max_abs(const double* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        acc = _mm256_max_pd(acc, _mm256_and_pd(_mm256_loadu_pd(x + i), kAbsMask));
    double r = hmax(acc);
    for (; i < n; ++i) {
        double a = std::fabs(x[i]);
        if (a > r) r = a;
    }
    return r;
}

void backward_diff(const double* in, double* out, std::size_t n,
                                                   double inv_dx) {
    if (n == 0) return;
    out[0] = 0.0;
    const __m256d scale = _mm256_set1_pd(inv_dx);
    std::size_t i = 1;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(in + i);
        __m256d b = _mm256_loadu_pd(in + i - 1);
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_sub_pd(a, b), scale));
    }
    for (; i < n; ++i) out[i] = (in[i] - in[i - 1]) * inv_dx;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yi = _mm256_loadu_pd(y + i);
        __m256d xi = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(yi, _mm256_mul_pd(av, xi)));
    }
    for (; i < n; ++i) y[i] = y[i] + a * x[i];
}

void combine_flux(const double* v, const double* bmid,
                                                  const double* p, double* flux, std::size_t m,
                                                  double inv_dx) {
    const __m256d scale = _mm256_set1_pd(inv_dx);
    std::size_t i = 0;
    for (; i + 4 <= m; i += 4) {
        __m256d dv = _mm256_sub_pd(_mm256_loadu_pd(v + i + 1), _mm256_loadu_pd(v + i));
        __m256d adv = _mm256_mul_pd(dv, scale);
        __m256d drv = _mm256_mul_pd(_mm256_loadu_pd(bmid + i), _mm256_loadu_pd(p + i));
        _mm256_storeu_pd(flux + i, _mm256_add_pd(adv, drv));
    }
    for (; i < m; ++i) flux[i] = (v[i + 1] - v[i]) * inv_dx + bmid[i] * p[i];
}

} // namespace avx2_impl

#else // !FVMT_X86

bool avx2_available() { return false; }

namespace avx2_impl {

double sum(const double* x, std::size_t n) { return scalar_impl::sum(x, n); }
double dot(const double* x, const double* y, std::size_t n) { return scalar_impl::dot(x, y, n); }
double sum_squares(const double* x, std::size_t n) { return scalar_impl::sum_squares(x, n); }
double sum_sq_diff(const double* x, const double* y, std::size_t n) {
    return scalar_impl::sum_sq_diff(x, y, n);
}
double max_abs(const double* x, std::size_t n) { return scalar_impl::max_abs(x, n); }
void backward_diff(const double* in, double* out, std::size_t n, double inv_dx) {
    scalar_impl::backward_diff(in, out, n, inv_dx);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
    scalar_impl::axpy(a, x, y, n);
}
void combine_flux(const double* v, const double* bmid, const double* p, double* flux,
                  std::size_t m, double inv_dx) {
    scalar_impl::combine_flux(v, bmid, p, flux, m, inv_dx);
}

} // namespace avx2_impl

#endif

} // namespace fvmt::kernels
