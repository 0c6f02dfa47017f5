#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fvmt {

// Product structure value(t, x) = offset + ft(t) * fx(x) on the field's own
// domain. Lets convolutions and cell averages factor into 1D work.
struct SeparableParts {
    double offset = 0.0;
    std::function<double(double)> ft;
    std::function<double(double)> fx;
};

enum class Extension {
    zero,  // 0 outside [0,T] x [0,1]
    clamp, // nearest-point values outside the cylinder
    none   // the function is already defined on all of R^2
};

enum class Regularity { L2, L4, continuous };

// A given space-time scalar field: the pressure p, its mollification, or a
// dual-problem coefficient. Immutable; evaluations are pure.
class PressureField {
public:
    PressureField() = default;
    PressureField(std::function<double(double, double)> interior_eval, double horizon,
                  Regularity reg, Extension ext);

    // Evaluation with the extension applied.
    double operator()(double t, double x) const;

    double horizon() const { return horizon_; }
    Regularity regularity() const { return regularity_; }
    Extension extension() const { return extension_; }

    const std::optional<SeparableParts>& parts() const { return parts_; }
    PressureField& with_parts(SeparableParts parts);

    // Interior discontinuity lines, used by quadrature to split integration
    // domains.
    const std::vector<double>& t_breaks() const { return t_breaks_; }
    const std::vector<double>& x_breaks() const { return x_breaks_; }
    PressureField& with_breaks(std::vector<double> t_breaks, std::vector<double> x_breaks);

private:
    std::function<double(double, double)> eval_;
    double horizon_ = 0.0;
    Regularity regularity_ = Regularity::L2;
    Extension extension_ = Extension::zero;
    std::optional<SeparableParts> parts_;
    std::vector<double> t_breaks_, x_breaks_;
};

// Named fixtures: "zero", "constant", "sine-product", "sine-sine", "rough".
PressureField pressure_by_name(const std::string& name, double horizon);

} // namespace fvmt
