#include "fvmt/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fvmt {

namespace {

// Legendre P_n(x) and its derivative via the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1.0);
    return {p1, dp};
}

GaussRule compute_rule(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    if (n == 1) {
        rule.nodes[0] = 0.0;
        rule.weights[0] = 2.0;
        return rule;
    }
    for (int k = 0; k < n; ++k) {
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            auto [p, d] = legendre_with_derivative(n, x);
            dp = d;
            double dx = p / d;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                auto [p2, d2] = legendre_with_derivative(n, x);
                dp = d2;
                break;
            }
        }
        rule.nodes[n - 1 - k] = x;
        rule.weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

} // namespace

const GaussRule& gauss_legendre(int npts) {
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(npts);
    if (it == cache.end()) it = cache.emplace(npts, compute_rule(npts)).first;
    return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const GaussRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return acc * half;
}

namespace {

double adaptive_segment(const std::function<double(double)>& f, double a, double b,
                        double tol, int depth, int max_depth) {
    const GaussRule& g7 = gauss_legendre(7);
    const GaussRule& g15 = gauss_legendre(15);
    double coarse = integrate(f, a, b, g7);
    double fine = integrate(f, a, b, g15);
    double err = std::abs(fine - coarse);
    if (!std::isfinite(fine))
        throw NumericalFailure("adaptive_gauss: non-finite integrand value", err);
    if (err <= tol) return fine;
    if (depth >= max_depth)
        throw NumericalFailure("adaptive_gauss: tolerance not reached", err);
    double mid = 0.5 * (a + b);
    return adaptive_segment(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
           adaptive_segment(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double adaptive_gauss(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    if (abs_tol <= 0.0) throw std::invalid_argument("adaptive_gauss: tolerance must be positive");
    return adaptive_segment(f, a, b, abs_tol, 0, max_depth);
}

} // namespace fvmt
