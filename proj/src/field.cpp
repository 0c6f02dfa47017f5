#include "fvmt/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fvmt {

PressureField::PressureField(std::function<double(double, double)> interior_eval,
                             double horizon, Regularity reg, Extension ext)
    : eval_(std::move(interior_eval)), horizon_(horizon), regularity_(reg), extension_(ext) {
    if (horizon <= 0.0) throw std::invalid_argument("PressureField: horizon must be positive");
}

double PressureField::operator()(double t, double x) const {
    switch (extension_) {
    case Extension::zero:
        if (t < 0.0 || t > horizon_ || x < 0.0 || x > 1.0) return 0.0;
        return eval_(t, x);
    case Extension::clamp:
        return eval_(std::clamp(t, 0.0, horizon_), std::clamp(x, 0.0, 1.0));
    case Extension::none:
        return eval_(t, x);
    }
    return 0.0;
}

PressureField& PressureField::with_parts(SeparableParts parts) {
    parts_ = std::move(parts);
    return *this;
}

PressureField& PressureField::with_breaks(std::vector<double> t_breaks,
                                          std::vector<double> x_breaks) {
    t_breaks_ = std::move(t_breaks);
    x_breaks_ = std::move(x_breaks);
    return *this;
}

PressureField pressure_by_name(const std::string& name, double horizon) {
    const double T = horizon;
    if (name == "zero") {
        PressureField p([](double, double) { return 0.0; }, T, Regularity::continuous,
                        Extension::zero);
        p.with_parts({0.0, [](double) { return 0.0; }, [](double) { return 0.0; }});
        return p;
    }
    if (name == "constant") {
        PressureField p([](double, double) { return 1.0; }, T, Regularity::continuous,
                        Extension::zero);
        p.with_parts({0.0, [](double) { return 1.0; }, [](double) { return 1.0; }});
        return p;
    }
    if (name == "sine-product") {
        PressureField p(
            [T](double t, double x) { return std::sin(2.0 * M_PI * x) * std::cos(M_PI * t / T); },
            T, Regularity::continuous, Extension::zero);
        p.with_parts({0.0, [T](double t) { return std::cos(M_PI * t / T); },
                      [](double x) { return std::sin(2.0 * M_PI * x); }});
        return p;
    }
    if (name == "sine-sine") {
        // Vanishes on the whole cylinder boundary, so the zero extension is
        // Lipschitz on R^2.
        PressureField p(
            [T](double t, double x) { return 0.5 * std::sin(M_PI * x) * std::sin(M_PI * t / T); },
            T, Regularity::continuous, Extension::zero);
        p.with_parts({0.0, [T](double t) { return std::sin(M_PI * t / T); },
                      [](double x) { return 0.5 * std::sin(M_PI * x); }});
        return p;
    }
    if (name == "rough") {
        // Piecewise constant in time: L2 regularity only.
        auto step = [T](double t) { return t < 0.5 * T ? 1.0 : -0.5; };
        PressureField p([step](double t, double x) { return step(t) * std::sin(M_PI * x); }, T,
                        Regularity::L2, Extension::zero);
        p.with_parts({0.0, step, [](double x) { return std::sin(M_PI * x); }});
        p.with_breaks({0.5 * T}, {});
        return p;
    }
    throw std::invalid_argument("unknown pressure fixture '" + name + "'");
}

} // namespace fvmt
