#pragma once

#include <functional>
#include <ostream>
#include <vector>

namespace fvmt {

// Uniform partition of (0, 1) into n cells of width dx = 1/n. Cell i
// (1-based, as in the scheme) covers [(i-1)*dx, i*dx); x = 1 is assigned to
// the last cell.
struct UniformGrid {
    int n = 0;
    double dx = 0.0;

    UniformGrid() = default;
    explicit UniformGrid(int cells);

    double x_left(int i) const { return i * dx; }        // 0-based cell index
    double x_right(int i) const { return (i + 1) * dx; } // 0-based cell index
    double x_center(int i) const { return (i + 0.5) * dx; }

    // 0-based index of the cell containing x in [0, 1]; throws outside.
    int cell_of(double x) const;

    bool operator==(const UniformGrid& o) const { return n == o.n; }
};

// Per-cell values on a uniform grid; the finite-volume degree of freedom.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(const UniformGrid& grid, std::vector<double> values);
    GridFunction(const UniformGrid& grid, double fill);

    const UniformGrid& grid() const { return grid_; }
    int size() const { return grid_.n; }
    double operator[](int i) const { return values_[i]; }
    double& operator[](int i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }
    const double* data() const { return values_.data(); }
    double* data() { return values_.data(); }

    void check_finite(const char* context) const;

private:
    UniformGrid grid_;
    std::vector<double> values_;
};

// Time-indexed trajectory of grid functions over [0, T].
struct SpaceTimeField {
    UniformGrid grid;
    std::vector<double> times;        // strictly increasing, starts at 0
    std::vector<GridFunction> frames; // aligned with times

    void validate() const;
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

// Cell averages of f by per-cell Gauss-Legendre quadrature.
GridFunction project_cell_averages(const std::function<double(double)>& f,
                                   const UniformGrid& grid, int quad_points = 8);

// Piecewise-constant reconstruction at x (half-open cells, x = 1 closes the
// last cell).
double reconstruct(const GridFunction& gf, double x);

// Backward difference quotient: zero on the first cell band, then
// (v_i - v_{i-1}) / dx.
GridFunction divided_difference(const GridFunction& gf);

struct Norms {
    double l2 = 0.0;
    double linf = 0.0;
};

Norms norms(const GridFunction& gf);

// sqrt(sum dx * v_i^2): exact L2 of the piecewise-constant reconstruction.
double l2_norm(const GridFunction& gf);

// L2(0,T;H) norm: trapezoid of the squared spatial L2 over the stored time
// grid, then square root.
double spacetime_l2(const SpaceTimeField& field);

// L2(0,T;H) distance between two trajectories. Grids must be nested (same n,
// or one refines the other by an integer factor) and the coarser time grid
// must be a subset of the finer one.
double spacetime_l2_distance(const SpaceTimeField& a, const SpaceTimeField& b);

// CSV: cell_index,x_left,x_right,value (1-based cells).
void write_csv(const GridFunction& gf, std::ostream& os);

// CSV long format: t,cell_index,value.
void write_csv(const SpaceTimeField& field, std::ostream& os);

} // namespace fvmt
