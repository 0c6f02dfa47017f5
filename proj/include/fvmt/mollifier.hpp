#pragma once

#include "fvmt/field.hpp"
#include "fvmt/grid.hpp"

namespace fvmt {

// Standard exponential bump, scaled to unit mass over R (dim = 1) or R^2
// (dim = 2, radial). Vanishes outside radius delta; nonnegative; the unit
// mass is verified at construction by an independent quadrature.
class MollifierKernel {
public:
    static MollifierKernel one_dimensional(double delta);
    static MollifierKernel two_dimensional(double delta);

    double delta() const { return delta_; }
    double normalization() const { return normalization_; }
    int dim() const { return dim_; }

    // 1D kernel value (dim 1) or radial profile at |r| (dim 2).
    double operator()(double r) const;
    // 2D kernel value at (t, x).
    double value2(double t, double x) const;

private:
    MollifierKernel(double delta, double normalization, int dim)
        : delta_(delta), normalization_(normalization), dim_(dim) {}
    double delta_ = 0.0;
    double normalization_ = 1.0;
    int dim_ = 1;
};

MollifierKernel kernel_1d(double delta);
MollifierKernel kernel_2d(double delta);

// Unnormalized bump profile exp(1/(u^2 - 1)) for |u| < 1, else 0.
double bump_profile(double u);

enum class MollifyMode {
    radial2d, // J2 radial kernel, genuine 2D convolution
    tensor    // J1(t) x J1(x) tensor kernel
};

// Convolution of p (with its extension) against the chosen kernel, evaluated
// lazily per query point by piecewise Gauss quadrature over the kernel
// support. Tensor mode factorizes into two 1D convolutions when p carries a
// separable representation.
PressureField mollify(const PressureField& p, double delta, int quad_points = 32,
                      MollifyMode mode = MollifyMode::tensor);

// Cell averages of rho(t, .) on the grid; t must lie in [0, horizon].
GridFunction mollified_cell_averages(const PressureField& rho, const UniformGrid& grid,
                                     double t, int quad_points = 8);

// 1D convolution of a factor g defined on [0, L] with the given extension,
// evaluated at u. Integration is split at the extension boundary and at the
// listed interior breaks so every Gauss segment sees a smooth integrand.
double convolve_1d(const std::function<double(double)>& g, double length, Extension ext,
                   const MollifierKernel& kernel, const std::vector<double>& breaks,
                   int quad_points, double u);

} // namespace fvmt
