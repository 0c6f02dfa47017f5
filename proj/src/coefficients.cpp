#include "fvmt/coefficients.hpp"

#include "fvmt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fvmt {

CoefficientSet identity_coefficients() {
    CoefficientSet cs;
    cs.h = [](double r) { return r; };
    cs.dh = [](double) { return 1.0; };
    cs.ddh = [](double) { return 0.0; };
    cs.b = [](double) { return 1.0; };
    cs.db = [](double) { return 0.0; };
    cs.ddb = [](double) { return 0.0; };
    cs.delta_h = cs.c_h = 1.0;
    cs.delta_b = cs.c_b = 1.0;
    cs.name = "identity";
    return cs;
}

CoefficientSet sinusoidal_coefficients() {
    CoefficientSet cs;
    cs.h = [](double r) { return r + 0.4 * std::sin(r); };
    cs.dh = [](double r) { return 1.0 + 0.4 * std::cos(r); };
    cs.ddh = [](double r) { return -0.4 * std::sin(r); };
    cs.b = [](double r) { return 2.0 + 0.5 * std::tanh(r); };
    cs.db = [](double r) {
        double c = std::cosh(r);
        return 0.5 / (c * c);
    };
    cs.ddb = [](double r) {
        double c = std::cosh(r);
        return -std::tanh(r) / (c * c);
    };
    cs.delta_h = 0.6;
    cs.c_h = 1.4;
    cs.delta_b = 1.5;
    cs.c_b = 2.5;
    cs.name = "sinusoidal";
    return cs;
}

CoefficientSet generic_coefficients(const GenericCoefficientParams& p) {
    const double a = p.h_linear, c = p.h_trig, w = p.h_freq;
    const double b0 = p.b_base, b1 = p.b_trig;
    if (a - std::abs(c * w) <= 0.0)
        throw std::invalid_argument("generic_coefficients: h' lower bound not positive");
    if (b0 - std::abs(b1) <= 0.0)
        throw std::invalid_argument("generic_coefficients: b lower bound not positive");
    CoefficientSet cs;
    cs.h = [=](double r) { return a * r + c * std::sin(w * r); };
    cs.dh = [=](double r) { return a + c * w * std::cos(w * r); };
    cs.ddh = [=](double r) { return -c * w * w * std::sin(w * r); };
    cs.b = [=](double r) { return b0 + b1 * std::tanh(r); };
    cs.db = [=](double r) {
        double ch = std::cosh(r);
        return b1 / (ch * ch);
    };
    cs.ddb = [=](double r) {
        double ch = std::cosh(r);
        return -2.0 * b1 * std::tanh(r) / (ch * ch);
    };
    cs.delta_h = a - std::abs(c * w);
    cs.c_h = std::max(a + std::abs(c * w), std::abs(c) * w * w);
    cs.delta_b = b0 - std::abs(b1);
    // |b'| <= |b1| and |b''| <= 0.77 |b1|, both below b0 + |b1|.
    cs.c_b = b0 + std::abs(b1);
    cs.name = "paper-generic";
    return cs;
}

CoefficientSet coefficients_by_name(const std::string& name) {
    if (name == "identity") return identity_coefficients();
    if (name == "sinusoidal") return sinusoidal_coefficients();
    if (name == "paper-generic") return generic_coefficients();
    throw std::invalid_argument("unknown coefficient set '" + name + "'");
}

std::vector<EstimateReport> validate_assumptions(const CoefficientSet& coeffs,
                                                 std::pair<double, double> interval,
                                                 int samples) {
    if (samples < 2) throw std::invalid_argument("validate_assumptions: samples >= 2");
    if (!(interval.second > interval.first))
        throw std::invalid_argument("validate_assumptions: empty interval");

    // Worst case (largest lhs / smallest bound side) over the sample sweep.
    double min_dh = 1e300, max_dh = -1e300, max_abs_ddh = 0.0;
    double min_b = 1e300, max_b = -1e300, max_abs_db_ddb = 0.0;
    const double step = (interval.second - interval.first) / (samples - 1);
    for (int k = 0; k < samples; ++k) {
        const double r = interval.first + k * step;
        const double hv = coeffs.h(r), bv = coeffs.b(r);
        const double dhv = coeffs.dh(r), ddhv = coeffs.ddh(r);
        const double dbv = coeffs.db(r), ddbv = coeffs.ddb(r);
        if (!std::isfinite(hv) || !std::isfinite(bv))
            throw NumericalFailure("validate_assumptions: non-finite h or b at r = " +
                                       std::to_string(r),
                                   hv);

        // Cross-check the supplied first derivatives against central
        // differences. The second difference needs a larger step (roundoff
        // grows as eps/s^2) but only sqrt scaling in r, or its truncation
        // term outruns the tolerance at the interval ends.
        const double s1 = 1e-5 * (1.0 + std::abs(r));
        const double fd1h = (coeffs.h(r + s1) - coeffs.h(r - s1)) / (2.0 * s1);
        const double fd1b = (coeffs.b(r + s1) - coeffs.b(r - s1)) / (2.0 * s1);
        const double s2 = 1e-4 * std::sqrt(1.0 + std::abs(r));
        const double fd2h = (coeffs.h(r + s2) - 2.0 * hv + coeffs.h(r - s2)) / (s2 * s2);
        const double fd2b = (coeffs.b(r + s2) - 2.0 * bv + coeffs.b(r - s2)) / (s2 * s2);
        auto agree = [](double fd, double given) {
            return std::abs(fd - given) <= 1e-6 * (1.0 + std::abs(given));
        };
        if (!agree(fd1h, dhv) || !agree(fd1b, dbv) || !agree(fd2h, ddhv) || !agree(fd2b, ddbv))
            throw NumericalFailure(
                "validate_assumptions: supplied derivative disagrees with finite differences at r = " +
                    std::to_string(r),
                fd1h - dhv);

        min_dh = std::min(min_dh, dhv);
        max_dh = std::max(max_dh, dhv);
        max_abs_ddh = std::max(max_abs_ddh, std::abs(ddhv));
        min_b = std::min(min_b, bv);
        max_b = std::max(max_b, bv);
        max_abs_db_ddb = std::max({max_abs_db_ddb, std::abs(dbv), std::abs(ddbv)});
    }

    std::vector<EstimateReport> out;
    out.push_back(EstimateReport::make("A1_hprime_lower", coeffs.delta_h, min_dh, 0.0));
    out.push_back(EstimateReport::make("A1_hprime_upper", max_dh, coeffs.c_h, 0.0));
    out.push_back(EstimateReport::make("A1_hsecond_bound", max_abs_ddh, coeffs.c_h, 0.0));
    out.push_back(EstimateReport::make("A2_b_lower", coeffs.delta_b, min_b, 0.0));
    out.push_back(EstimateReport::make("A2_b_upper", max_b, coeffs.c_b, 0.0));
    out.push_back(EstimateReport::make("A2_b_derivs_bound", max_abs_db_ddb, coeffs.c_b, 0.0));
    return out;
}

double h_inverse(const CoefficientSet& coeffs, double z, double tol, int max_iter) {
    if (tol <= 0.0) throw std::invalid_argument("h_inverse: tol must be positive");
    // delta_h <= h' <= c_h gives the exact bracket around the root.
    const double d = z - coeffs.h(0.0);
    double lo, hi;
    if (d >= 0.0) {
        lo = d / coeffs.c_h;
        hi = d / coeffs.delta_h;
    } else {
        lo = d / coeffs.delta_h;
        hi = d / coeffs.c_h;
    }
    double r = 0.5 * (lo + hi);
    double res = coeffs.h(r) - z;
    for (int it = 0; it < max_iter; ++it) {
        if (std::abs(res) <= tol) return r;
        if (res > 0.0) hi = r; else lo = r;
        double step = res / coeffs.dh(r);
        double cand = r - step;
        if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi); // bisect when Newton escapes
        r = cand;
        res = coeffs.h(r) - z;
    }
    if (std::abs(res) <= tol) return r;
    throw NumericalFailure("h_inverse: iteration cap exceeded", res);
}

double h_hat(const CoefficientSet& coeffs, double z, double abs_tol) {
    if (z == 0.0) return 0.0;
    const double inv_tol = std::min(1e-12, abs_tol * 1e-2);
    auto hinv = [&](double xi) { return h_inverse(coeffs, xi, inv_tol); };
    return adaptive_gauss(hinv, 0.0, z, abs_tol);
}

HhatConstants hhat_constants(const CoefficientSet& coeffs) {
    HhatConstants c{};
    c.h_inv_zero = h_inverse(coeffs, 0.0, 1e-13);
    const double dh2 = coeffs.delta_h * coeffs.delta_h;
    c.c9 = 2.0 / dh2;
    c.c10 = 2.0 * coeffs.h(0.0) * coeffs.h(0.0) / dh2;
    c.c11 = 4.0 * coeffs.c_h * c.c9;
    c.c12 = c.c10 + c.c11 * coeffs.c_h * c.h_inv_zero * c.h_inv_zero;
    // hhat(r) <= h^{-1}(0) r + r^2/(2 delta_h); Young on the linear term
    // gives hhat(r) <= (1/delta_h) r^2 + (delta_h/2) |h^{-1}(0)|^2.
    c.c13 = 1.0 / coeffs.delta_h;
    c.c14 = 0.5 * coeffs.delta_h * c.h_inv_zero * c.h_inv_zero;
    return c;
}

std::vector<EstimateReport> check_hhat_inequalities(const CoefficientSet& coeffs,
                                                    std::span<const double> r_samples) {
    const HhatConstants c = hhat_constants(coeffs);
    double worst1 = 1e300, w1_lhs = 0.0, w1_rhs = 0.0;
    double worst2 = 1e300, w2_lhs = 0.0, w2_rhs = 0.0;
    double worst3 = 1e300, w3_lhs = 0.0, w3_rhs = 0.0;
    for (double r : r_samples) {
        if (!std::isfinite(r)) throw std::invalid_argument("check_hhat_inequalities: non-finite sample");
        const double hr = coeffs.h(r);
        const double hh = h_hat(coeffs, hr);
        const double mid = c.c9 * hr * hr + c.c10;
        const double top = c.c11 * hh + c.c12;
        const double quad = c.c13 * r * r + c.c14;
        const double hhr = h_hat(coeffs, r);
        if (mid - r * r < worst1) { worst1 = mid - r * r; w1_lhs = r * r; w1_rhs = mid; }
        if (top - mid < worst2) { worst2 = top - mid; w2_lhs = mid; w2_rhs = top; }
        if (quad - hhr < worst3) { worst3 = quad - hhr; w3_lhs = hhr; w3_rhs = quad; }
    }
    // Small slack for the quadrature inside hhat.
    auto slack = [](double rhs) { return 1e-8 * (1.0 + std::abs(rhs)); };
    std::vector<EstimateReport> out;
    out.push_back(EstimateReport::make("hchain_r2_le_c9h2", w1_lhs, w1_rhs, slack(w1_rhs)));
    out.push_back(EstimateReport::make("hchain_c9h2_le_c11hhat", w2_lhs, w2_rhs, slack(w2_rhs)));
    out.push_back(EstimateReport::make("hchain_hhat_le_c13r2", w3_lhs, w3_rhs, slack(w3_rhs)));
    return out;
}

} // namespace fvmt
