#include "fvmt/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using namespace fvmt;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("gauss rules integrate polynomials of degree 2n-1 exactly") {
    for (int n : {2, 4, 8, 15}) {
        const int degree = 2 * n - 1;
        auto poly = [degree](double x) { return std::pow(x, degree) + std::pow(x, degree - 1); };
        // Odd power vanishes on [-1, 1]; even power integrates to 2/(deg).
        const double exact = 2.0 / degree;
        CHECK(integrate(poly, -1.0, 1.0, n) == doctest::Approx(exact).epsilon(1e-13));
    }
}

TEST_CASE("gauss weights sum to the interval length") {
    for (int n : {1, 3, 7, 16, 20}) {
        const GaussRule& rule = gauss_legendre(n);
        double s = 0.0;
        for (double w : rule.weights) s += w;
        CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("adaptive quadrature hits analytic values") {
    CHECK(adaptive_gauss([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12) ==
          doctest::Approx(M_E - 1.0).epsilon(1e-12));
    CHECK(adaptive_gauss([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // Sharp peak needs subdivision.
    CHECK(adaptive_gauss([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0, 1e-10) ==
          doctest::Approx(2.0 * std::atan(100.0) * 100.0).epsilon(1e-9));
    CHECK(adaptive_gauss([](double) { return 1.0; }, 2.0, 2.0, 1e-12) == 0.0);
}

TEST_CASE("adaptive quadrature reports unreachable tolerances") {
    // A jump at an irrational point can never satisfy the shrinking local
    // tolerance; the depth cap must fire.
    auto jump = [](double x) { return x > 1.0 / M_PI ? 1.0 : 0.0; };
    CHECK_THROWS_AS(adaptive_gauss(jump, 0.0, 1.0, 1e-15), NumericalFailure);
    CHECK_THROWS_AS(adaptive_gauss([](double x) { return x; }, 0.0, 1.0, -1.0),
                    std::invalid_argument);
}

TEST_SUITE_END();
