#include "fvmt/grid.hpp"

#include "fvmt/csv.hpp"
#include "fvmt/kernels.hpp"
#include "fvmt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fvmt {

UniformGrid::UniformGrid(int cells) : n(cells), dx(1.0 / cells) {
    if (cells < 2) throw std::invalid_argument("UniformGrid: need at least 2 cells");
}

int UniformGrid::cell_of(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("cell_of: x outside [0, 1]");
    int i = static_cast<int>(x * n);
    if (i >= n) i = n - 1;
    return i;
}

GridFunction::GridFunction(const UniformGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.n)
        throw std::invalid_argument("GridFunction: value count does not match grid");
}

GridFunction::GridFunction(const UniformGrid& grid, double fill)
    : grid_(grid), values_(grid.n, fill) {}

void GridFunction::check_finite(const char* context) const {
    for (int i = 0; i < size(); ++i)
        if (!std::isfinite(values_[i]))
            throw NumericalFailure(std::string(context) + ": non-finite cell value at index " +
                                       std::to_string(i),
                                   values_[i]);
}

void SpaceTimeField::validate() const {
    if (times.size() != frames.size())
        throw std::invalid_argument("SpaceTimeField: times/frames length mismatch");
    if (times.empty()) throw std::invalid_argument("SpaceTimeField: empty");
    if (times.front() != 0.0) throw std::invalid_argument("SpaceTimeField: must start at t = 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1]))
            throw std::invalid_argument("SpaceTimeField: times not strictly increasing");
    for (const auto& f : frames)
        if (!(f.grid() == grid)) throw std::invalid_argument("SpaceTimeField: frame grid mismatch");
}

GridFunction project_cell_averages(const std::function<double(double)>& f,
                                   const UniformGrid& grid, int quad_points) {
    if (quad_points < 1) throw std::invalid_argument("project_cell_averages: quad_points >= 1");
    const GaussRule& rule = gauss_legendre(quad_points);
    GridFunction out(grid, 0.0);
    for (int i = 0; i < grid.n; ++i) {
        const double a = grid.x_left(i);
        const double mid = a + 0.5 * grid.dx;
        const double half = 0.5 * grid.dx;
        double acc = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            double v = f(mid + half * rule.nodes[k]);
            if (!std::isfinite(v))
                throw NumericalFailure("project_cell_averages: non-finite integrand at x = " +
                                           std::to_string(mid + half * rule.nodes[k]),
                                       v);
            acc += rule.weights[k] * v;
        }
        out[i] = 0.5 * acc; // (half / dx) * acc with dx = 2 * half
    }
    return out;
}

double reconstruct(const GridFunction& gf, double x) {
    return gf[gf.grid().cell_of(x)];
}

GridFunction divided_difference(const GridFunction& gf) {
    GridFunction out(gf.grid(), 0.0);
    kernels::backward_diff(gf.data(), out.data(), gf.size(), 1.0 / gf.grid().dx);
    return out;
}

Norms norms(const GridFunction& gf) {
    Norms r;
    r.l2 = std::sqrt(gf.grid().dx * kernels::sum_squares(gf.data(), gf.size()));
    r.linf = kernels::max_abs(gf.data(), gf.size());
    return r;
}

double l2_norm(const GridFunction& gf) {
    return std::sqrt(gf.grid().dx * kernels::sum_squares(gf.data(), gf.size()));
}

double spacetime_l2(const SpaceTimeField& field) {
    field.validate();
    double acc = 0.0;
    double prev_sq = field.grid.dx * kernels::sum_squares(field.frames[0].data(), field.grid.n);
    for (std::size_t k = 1; k < field.times.size(); ++k) {
        double sq = field.grid.dx * kernels::sum_squares(field.frames[k].data(), field.grid.n);
        acc += 0.5 * (prev_sq + sq) * (field.times[k] - field.times[k - 1]);
        prev_sq = sq;
    }
    return std::sqrt(acc);
}

namespace {

// Squared spatial L2 of the difference of two piecewise-constant functions,
// where fine.n = factor * coarse.n.
double diff_sq_nested(const GridFunction& fine, const GridFunction& coarse, int factor) {
    const int nf = fine.size();
    double acc = 0.0;
    for (int i = 0; i < nf; ++i) {
        double d = fine[i] - coarse[i / factor];
        acc += d * d;
    }
    return acc * fine.grid().dx;
}

} // namespace

namespace {

// Frame of a trajectory at time t: the stored frame when t matches an
// instant, otherwise the linear interpolant of the bracketing frames.
GridFunction frame_at_time(const SpaceTimeField& f, double t, double tol) {
    auto it = std::lower_bound(f.times.begin(), f.times.end(), t - tol);
    std::size_t j = static_cast<std::size_t>(it - f.times.begin());
    if (j >= f.times.size()) j = f.times.size() - 1;
    if (std::abs(f.times[j] - t) <= tol) return f.frames[j];
    if (j == 0 || t > f.times.back() + tol)
        throw std::invalid_argument("spacetime_l2_distance: time outside stored range");
    const double t0 = f.times[j - 1], t1 = f.times[j];
    const double w = (t - t0) / (t1 - t0);
    GridFunction out(f.grid, 0.0);
    for (int i = 0; i < f.grid.n; ++i)
        out[i] = (1.0 - w) * f.frames[j - 1][i] + w * f.frames[j][i];
    return out;
}

} // namespace

double spacetime_l2_distance(const SpaceTimeField& a, const SpaceTimeField& b) {
    a.validate();
    b.validate();
    const SpaceTimeField& fine = (a.grid.n >= b.grid.n) ? a : b;
    const SpaceTimeField& coarse = (a.grid.n >= b.grid.n) ? b : a;
    if (fine.grid.n % coarse.grid.n != 0)
        throw std::invalid_argument("spacetime_l2_distance: grids not nested");
    const int factor = fine.grid.n / coarse.grid.n;
    if (std::abs(a.horizon() - b.horizon()) > 1e-12 * (1.0 + a.horizon()))
        throw std::invalid_argument("spacetime_l2_distance: horizons differ");

    // Integrate over the sparser time grid; sample the denser trajectory at
    // those instants (linear interpolation between frames when needed).
    const SpaceTimeField& few = (a.times.size() <= b.times.size()) ? a : b;
    const SpaceTimeField& many = (a.times.size() <= b.times.size()) ? b : a;
    const double tol = 1e-9 * (1.0 + few.horizon());

    double acc = 0.0;
    double prev_sq = -1.0, prev_t = 0.0;
    for (std::size_t k = 0; k < few.times.size(); ++k) {
        const double t = few.times[k];
        GridFunction other = frame_at_time(many, t, tol);
        const GridFunction& ff = (&few == &fine) ? few.frames[k] : other;
        const GridFunction& cf = (&few == &fine) ? other : few.frames[k];
        const double sq = (factor == 1)
                              ? few.grid.dx * kernels::sum_sq_diff(ff.data(), cf.data(), ff.size())
                              : diff_sq_nested(ff, cf, factor);
        if (prev_sq >= 0.0) acc += 0.5 * (prev_sq + sq) * (t - prev_t);
        prev_sq = sq;
        prev_t = t;
    }
    return std::sqrt(acc);
}

void write_csv(const GridFunction& gf, std::ostream& os) {
    os << "cell_index,x_left,x_right,value\n";
    for (int i = 0; i < gf.size(); ++i) {
        CsvRow(os)
            .cell(i + 1)
            .cell(gf.grid().x_left(i))
            .cell(gf.grid().x_right(i))
            .cell(gf[i]);
    }
}

void write_csv(const SpaceTimeField& field, std::ostream& os) {
    os << "t,cell_index,value\n";
    for (std::size_t k = 0; k < field.times.size(); ++k)
        for (int i = 0; i < field.grid.n; ++i)
            CsvRow(os).cell(field.times[k]).cell(i + 1).cell(field.frames[k][i]);
}

} // namespace fvmt
