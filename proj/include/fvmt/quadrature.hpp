#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

namespace fvmt {

// Raised when an iterative numerical procedure fails to converge.
class NumericalFailure : public std::runtime_error {
public:
    NumericalFailure(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

struct GaussRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights; // sum to 2
};

// Gauss-Legendre rule with npts nodes; computed once per order and cached.
const GaussRule& gauss_legendre(int npts);

double integrate(const std::function<double(double)>& f, double a, double b,
                 const GaussRule& rule);

inline double integrate(const std::function<double(double)>& f, double a, double b,
                        int npts) {
    return integrate(f, a, b, gauss_legendre(npts));
}

// Adaptive bisection with an embedded G7/G15 error estimate. Throws
// NumericalFailure when the requested absolute tolerance is unreachable.
double adaptive_gauss(const std::function<double(double)>& f, double a, double b,
                      double abs_tol, int max_depth = 48);

} // namespace fvmt
