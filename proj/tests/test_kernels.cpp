#include "fvmt/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace fvmt::kernels;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

const std::vector<std::size_t> kSizes = {0,  1,  2,  3,  4,   5,    7,   8,
                                         9,  15, 16, 17, 31,  64,   257, 1000,
                                         1023};

} // namespace

TEST_SUITE_BEGIN("kernels");

TEST_CASE("dispatch picks a valid backend and can be forced") {
    Backend initial = active_backend();
    CHECK((initial == Backend::scalar || initial == Backend::avx2));
    if (avx2_available()) {
        force_backend(Backend::avx2);
        CHECK(active_backend() == Backend::avx2);
    }
    force_backend(Backend::scalar);
    CHECK(active_backend() == Backend::scalar);
    force_backend(initial);
    CHECK(active_backend() == initial);
}

TEST_CASE("scalar reference values on tiny fixtures") {
    const double x[] = {1.0, -2.0, 3.0};
    const double y[] = {2.0, 0.5, -1.0};
    CHECK(scalar_impl::sum(x, 3) == doctest::Approx(2.0));
    CHECK(scalar_impl::dot(x, y, 3) == doctest::Approx(2.0 - 1.0 - 3.0));
    CHECK(scalar_impl::sum_squares(x, 3) == doctest::Approx(14.0));
    CHECK(scalar_impl::sum_sq_diff(x, y, 3) == doctest::Approx(1.0 + 6.25 + 16.0));
    CHECK(scalar_impl::max_abs(x, 3) == 3.0);
    CHECK(scalar_impl::sum(x, 0) == 0.0);
    CHECK(scalar_impl::max_abs(x, 0) == 0.0);

    double out[3];
    scalar_impl::backward_diff(x, out, 3, 2.0);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == doctest::Approx(-6.0));
    CHECK(out[2] == doctest::Approx(10.0));

    double acc[3] = {1.0, 1.0, 1.0};
    scalar_impl::axpy(0.5, x, acc, 3);
    CHECK(acc[0] == doctest::Approx(1.5));
    CHECK(acc[1] == doctest::Approx(0.0));
    CHECK(acc[2] == doctest::Approx(2.5));

    const double v[] = {0.0, 1.0, 0.0};
    const double bmid[] = {1.0, 1.0};
    const double p[] = {0.0, 3.0};
    double flux[2];
    scalar_impl::combine_flux(v, bmid, p, flux, 2, 3.0);
    CHECK(flux[0] == doctest::Approx(3.0));
    CHECK(flux[1] == doctest::Approx(0.0));
}

TEST_CASE("avx2 elementwise kernels are bit-identical to scalar") {
    if (!avx2_available()) return;
    std::mt19937_64 rng(41);
    for (std::size_t n : kSizes) {
        auto in = random_vector(rng, n + 1, 10.0);
        std::vector<double> a(n), b(n);
        scalar_impl::backward_diff(in.data(), a.data(), n, 7.25);
        avx2_impl::backward_diff(in.data(), b.data(), n, 7.25);
        for (std::size_t i = 0; i < n; ++i) CHECK(a[i] == b[i]);

        auto y1 = random_vector(rng, n);
        auto y2 = y1;
        scalar_impl::axpy(-1.75, in.data(), y1.data(), n);
        avx2_impl::axpy(-1.75, in.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == y2[i]);

        if (n >= 1) {
            auto bmid = random_vector(rng, n, 3.0);
            auto p = random_vector(rng, n, 2.0);
            std::vector<double> f1(n), f2(n);
            scalar_impl::combine_flux(in.data(), bmid.data(), p.data(), f1.data(), n, 64.0);
            avx2_impl::combine_flux(in.data(), bmid.data(), p.data(), f2.data(), n, 64.0);
            for (std::size_t i = 0; i < n; ++i) CHECK(f1[i] == f2[i]);
        }
    }
}

TEST_CASE("avx2 reductions match scalar within reassociation roundoff") {
    if (!avx2_available()) return;
    std::mt19937_64 rng(42);
    for (std::size_t n : kSizes) {
        auto x = random_vector(rng, n, 100.0);
        auto y = random_vector(rng, n, 100.0);
        const double scale = 1.0 + 100.0 * 100.0 * static_cast<double>(n);
        CHECK(std::abs(scalar_impl::sum(x.data(), n) - avx2_impl::sum(x.data(), n)) <=
              1e-13 * scale);
        CHECK(std::abs(scalar_impl::dot(x.data(), y.data(), n) -
                       avx2_impl::dot(x.data(), y.data(), n)) <= 1e-13 * scale);
        CHECK(std::abs(scalar_impl::sum_squares(x.data(), n) -
                       avx2_impl::sum_squares(x.data(), n)) <= 1e-13 * scale);
        CHECK(std::abs(scalar_impl::sum_sq_diff(x.data(), y.data(), n) -
                       avx2_impl::sum_sq_diff(x.data(), y.data(), n)) <= 1e-13 * scale);
        CHECK(scalar_impl::max_abs(x.data(), n) == avx2_impl::max_abs(x.data(), n));
    }
}

TEST_CASE("reductions reproduce closed forms") {
    for (std::size_t n : {16u, 100u, 1000u}) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i + 1);
        const double nn = static_cast<double>(n);
        CHECK(sum(x.data(), n) == doctest::Approx(0.5 * nn * (nn + 1.0)).epsilon(1e-12));
        CHECK(sum_squares(x.data(), n) ==
              doctest::Approx(nn * (nn + 1.0) * (2.0 * nn + 1.0) / 6.0).epsilon(1e-12));
        CHECK(max_abs(x.data(), n) == nn);
    }
}

TEST_SUITE_END();
