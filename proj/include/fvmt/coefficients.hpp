#pragma once

#include "fvmt/report.hpp"

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace fvmt {

// The nonlinearity pair (h, b) with the bounds required by the model:
//   delta_h <= h' <= c_h,  |h''| <= c_h,
//   delta_b <= b  <= c_b,  |b'|, |b''| <= c_b.
// h' >= delta_h > 0 makes h strictly increasing, hence invertible.
// Immutable after construction; all operations on it are pure.
struct CoefficientSet {
    std::function<double(double)> h, dh, ddh;
    std::function<double(double)> b, db, ddb;
    double delta_h = 0.0, c_h = 0.0;
    double delta_b = 0.0, c_b = 0.0;
    std::string name;
};

CoefficientSet identity_coefficients();  // h(r) = r, b = 1
CoefficientSet sinusoidal_coefficients(); // h(r) = r + 0.4 sin r, b = 2 + 0.5 tanh r

struct GenericCoefficientParams {
    double h_linear = 1.0;   // a in h(r) = a r + c sin(w r)
    double h_trig = 0.3;     // c
    double h_freq = 1.5;     // w
    double b_base = 1.5;     // b0 in b(r) = b0 + b1 tanh r
    double b_trig = 0.4;     // b1
};

// Polynomial-plus-bounded-trig pair with bounds derived from the parameters.
CoefficientSet generic_coefficients(const GenericCoefficientParams& params = {});

// Registry lookup: "identity", "sinusoidal", "paper-generic".
CoefficientSet coefficients_by_name(const std::string& name);

// Samples the bound inequalities on the interval and cross-checks the
// supplied derivatives against central finite differences. Six reports, one
// per bound, each carrying the worst-case margin over the samples.
std::vector<EstimateReport> validate_assumptions(const CoefficientSet& coeffs,
                                                 std::pair<double, double> interval,
                                                 int samples);

// Solves h(r) = z by safeguarded Newton inside the analytic bracket implied
// by delta_h <= h' <= c_h. Returns r with |h(r) - z| <= tol.
double h_inverse(const CoefficientSet& coeffs, double z, double tol, int max_iter = 200);

// hhat(z) = integral of h^{-1} from 0 to z, by adaptive quadrature.
double h_hat(const CoefficientSet& coeffs, double z, double abs_tol = 1e-10);

// Constants of the h-inequality chain
//   r^2 <= C9 |h(r)|^2 + C10 <= C11 hhat(h(r)) + C12,
//   hhat(r) <= C13 r^2 + C14,
// computed from the proof formulas (not tuned).
struct HhatConstants {
    double c9, c10, c11, c12, c13, c14;
    double h_inv_zero; // h^{-1}(0)
};

HhatConstants hhat_constants(const CoefficientSet& coeffs);

// Verifies the chained inequalities at each sample; three reports with
// worst-case margins.
std::vector<EstimateReport> check_hhat_inequalities(const CoefficientSet& coeffs,
                                                    std::span<const double> r_samples);

} // namespace fvmt
