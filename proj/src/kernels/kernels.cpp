#include "fvmt/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

namespace fvmt::kernels {

namespace scalar_impl {

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_squares(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double sum_sq_diff(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - y[i];
        acc += d * d;
    }
    return acc;
}

double max_abs(const double* x, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double a = std::fabs(x[i]);
        if (a > m) m = a;
    }
    return m;
}

void backward_diff(const double* in, double* out, std::size_t n, double inv_dx) {
    if (n == 0) return;
    out[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) out[i] = (in[i] - in[i - 1]) * inv_dx;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void combine_flux(const double* v, const double* bmid, const double* p, double* flux,
                  std::size_t m, double inv_dx) {
    for (std::size_t i = 0; i < m; ++i)
        flux[i] = (v[i + 1] - v[i]) * inv_dx + bmid[i] * p[i];
}

} // namespace scalar_impl

namespace {

struct Table {
    double (*sum)(const double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum_squares)(const double*, std::size_t);
    double (*sum_sq_diff)(const double*, const double*, std::size_t);
    double (*max_abs)(const double*, std::size_t);
    void (*backward_diff)(const double*, double*, std::size_t, double);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*combine_flux)(const double*, const double*, const double*, double*, std::size_t,
                         double);
};

constexpr Table kScalarTable{
    scalar_impl::sum,          scalar_impl::dot,     scalar_impl::sum_squares,
    scalar_impl::sum_sq_diff,  scalar_impl::max_abs, scalar_impl::backward_diff,
    scalar_impl::axpy,         scalar_impl::combine_flux,
};

constexpr Table kAvx2Table{
    avx2_impl::sum,          avx2_impl::dot,     avx2_impl::sum_squares,
    avx2_impl::sum_sq_diff,  avx2_impl::max_abs, avx2_impl::backward_diff,
    avx2_impl::axpy,         avx2_impl::combine_flux,
};

Backend g_backend = Backend::scalar;
const Table* g_table = &kScalarTable;
bool g_initialized = false;

void apply_backend(Backend b) {
    g_backend = b;
    g_table = (b == Backend::avx2) ? &kAvx2Table : &kScalarTable;
}

void init_once() {
    if (g_initialized) return;
    g_initialized = true;
    Backend pick = avx2_available() ? Backend::avx2 : Backend::scalar;
    if (const char* env = std::getenv("FVMT_KERNEL_ISA")) {
        if (std::strcmp(env, "scalar") == 0) pick = Backend::scalar;
        else if (std::strcmp(env, "avx2") == 0 && avx2_available()) pick = Backend::avx2;
    }
    apply_backend(pick);
}

} // namespace

Backend active_backend() {
    init_once();
    return g_backend;
}

void force_backend(Backend b) {
    init_once();
    if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
    apply_backend(b);
}

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

double sum(const double* x, std::size_t n) {
    init_once();
    return g_table->sum(x, n);
}
double dot(const double* x, const double* y, std::size_t n) {
    init_once();
    return g_table->dot(x, y, n);
}
double sum_squares(const double* x, std::size_t n) {
    init_once();
    return g_table->sum_squares(x, n);
}
double sum_sq_diff(const double* x, const double* y, std::size_t n) {
    init_once();
    return g_table->sum_sq_diff(x, y, n);
}
double max_abs(const double* x, std::size_t n) {
    init_once();
    return g_table->max_abs(x, n);
}
void backward_diff(const double* in, double* out, std::size_t n, double inv_dx) {
    init_once();
    g_table->backward_diff(in, out, n, inv_dx);
}
void axpy(double a, const double* x, double* y, std::size_t n) {
    init_once();
    g_table->axpy(a, x, y, n);
}
void combine_flux(const double* v, const double* bmid, const double* p, double* flux,
                  std::size_t m, double inv_dx) {
    init_once();
    g_table->combine_flux(v, bmid, p, flux, m, inv_dx);
}

} // namespace fvmt::kernels
