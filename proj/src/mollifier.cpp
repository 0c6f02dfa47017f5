#include "fvmt/mollifier.hpp"

#include "fvmt/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace fvmt {

double bump_profile(double u) {
    const double u2 = u * u;
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 / (u2 - 1.0));
}

namespace {

// delta-independent moments of the unnormalized bump.
double bump_mass_1d() {
    static const double value =
        adaptive_gauss([](double u) { return bump_profile(u); }, -1.0, 1.0, 1e-14);
    return value;
}

double bump_mass_2d() {
    static const double value =
        2.0 * M_PI *
        adaptive_gauss([](double u) { return bump_profile(u) * u; }, 0.0, 1.0, 1e-14);
    return value;
}

// Independent mass check: composite Simpson over the support.
double simpson_mass(const MollifierKernel& k) {
    const int m = 4096; // intervals
    const double d = k.delta();
    if (k.dim() == 1) {
        const double h = 2.0 * d / m;
        double acc = k(-d) + k(d);
        for (int i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * k(-d + i * h);
        return acc * h / 3.0;
    }
    const double h = d / m;
    auto f = [&](double r) { return 2.0 * M_PI * r * k(r); };
    double acc = f(0.0) + f(d);
    for (int i = 1; i < m; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return acc * h / 3.0;
}

} // namespace

MollifierKernel MollifierKernel::one_dimensional(double delta) {
    if (delta <= 0.0) throw std::invalid_argument("mollifier: delta must be positive");
    MollifierKernel k(delta, delta * bump_mass_1d(), 1);
    const double mass = simpson_mass(k);
    if (std::abs(mass - 1.0) > 1e-8)
        throw NumericalFailure("mollifier kernel mass check failed", mass - 1.0);
    return k;
}

MollifierKernel MollifierKernel::two_dimensional(double delta) {
    if (delta <= 0.0) throw std::invalid_argument("mollifier: delta must be positive");
    MollifierKernel k(delta, delta * delta * bump_mass_2d(), 2);
    const double mass = simpson_mass(k);
    if (std::abs(mass - 1.0) > 1e-8)
        throw NumericalFailure("mollifier kernel mass check failed", mass - 1.0);
    return k;
}

double MollifierKernel::operator()(double r) const {
    return bump_profile(r / delta_) / normalization_;
}

double MollifierKernel::value2(double t, double x) const {
    return bump_profile(std::sqrt(t * t + x * x) / delta_) / normalization_;
}

MollifierKernel kernel_1d(double delta) { return MollifierKernel::one_dimensional(delta); }
MollifierKernel kernel_2d(double delta) { return MollifierKernel::two_dimensional(delta); }

namespace {

// Segment boundaries of [u-delta, u+delta] shifted into kernel coordinates:
// s in [-delta, delta], split wherever the translated argument u - s crosses
// a discontinuity of the field.
std::vector<double> split_segments(double u, double delta, const std::vector<double>& world_breaks) {
    std::vector<double> cuts;
    cuts.push_back(-delta);
    cuts.push_back(0.0); // kernel center: Gauss segments converge much faster per half
    cuts.push_back(delta);
    for (double w : world_breaks) {
        double s = u - w;
        if (s > -delta && s < delta) cuts.push_back(s);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

std::vector<double> world_breaks_t(const PressureField& p) {
    std::vector<double> w = p.t_breaks();
    if (p.extension() != Extension::none) {
        w.push_back(0.0);
        w.push_back(p.horizon());
    }
    return w;
}

std::vector<double> world_breaks_x(const PressureField& p) {
    std::vector<double> w = p.x_breaks();
    if (p.extension() != Extension::none) {
        w.push_back(0.0);
        w.push_back(1.0);
    }
    return w;
}

double eval_convolution(const PressureField& p, MollifyMode mode, double delta, int q,
                        double t, double x) {
    // Called once per query point; the kernels (and their mass checks) are
    // kept across calls for the same delta and mode.
    static thread_local struct {
        double delta = -1.0;
        MollifyMode mode{};
        std::unique_ptr<MollifierKernel> k1, k2;
    } cache;
    if (cache.delta != delta || cache.mode != mode) {
        cache.k1 = std::make_unique<MollifierKernel>(kernel_1d(delta));
        if (mode == MollifyMode::radial2d)
            cache.k2 = std::make_unique<MollifierKernel>(kernel_2d(delta));
        cache.delta = delta;
        cache.mode = mode;
    }
    const GaussRule& rule = gauss_legendre(q);
    const auto scuts = split_segments(t, delta, world_breaks_t(p));
    const auto ycuts = split_segments(x, delta, world_breaks_x(p));
    double acc = 0.0;
    for (std::size_t a = 0; a + 1 < scuts.size(); ++a) {
        const double smid = 0.5 * (scuts[a] + scuts[a + 1]);
        const double shalf = 0.5 * (scuts[a + 1] - scuts[a]);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = smid + shalf * rule.nodes[i];
            const double ws = rule.weights[i] * shalf;
            double inner = 0.0;
            for (std::size_t bseg = 0; bseg + 1 < ycuts.size(); ++bseg) {
                const double ymid = 0.5 * (ycuts[bseg] + ycuts[bseg + 1]);
                const double yhalf = 0.5 * (ycuts[bseg + 1] - ycuts[bseg]);
                for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
                    const double y = ymid + yhalf * rule.nodes[j];
                    const double wy = rule.weights[j] * yhalf;
                    const double pv = p(t - s, x - y);
                    if (!std::isfinite(pv))
                        throw NumericalFailure("mollify: non-finite field sample", pv);
                    const double kv = (mode == MollifyMode::radial2d)
                                          ? cache.k2->value2(s, y)
                                          : (*cache.k1)(s) * (*cache.k1)(y);
                    inner += wy * kv * pv;
                }
            }
            acc += ws * inner;
        }
    }
    return acc;
}

} // namespace

double convolve_1d(const std::function<double(double)>& g, double length, Extension ext,
                   const MollifierKernel& kernel, const std::vector<double>& breaks,
                   int quad_points, double u) {
    auto g_ext = [&](double w) -> double {
        switch (ext) {
        case Extension::zero:
            if (w < 0.0 || w > length) return 0.0;
            return g(w);
        case Extension::clamp:
            return g(std::clamp(w, 0.0, length));
        case Extension::none:
            return g(w);
        }
        return 0.0;
    };
    std::vector<double> world = breaks;
    if (ext != Extension::none) {
        world.push_back(0.0);
        world.push_back(length);
    }
    const auto cuts = split_segments(u, kernel.delta(), world);
    const GaussRule& rule = gauss_legendre(quad_points);
    double acc = 0.0;
    for (std::size_t a = 0; a + 1 < cuts.size(); ++a) {
        const double mid = 0.5 * (cuts[a] + cuts[a + 1]);
        const double half = 0.5 * (cuts[a + 1] - cuts[a]);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double s = mid + half * rule.nodes[i];
            acc += rule.weights[i] * half * kernel(s) * g_ext(u - s);
        }
    }
    return acc;
}

PressureField mollify(const PressureField& p, double delta, int quad_points, MollifyMode mode) {
    if (delta <= 0.0) throw std::invalid_argument("mollify: delta must be positive");
    const double T = p.horizon();

    const bool separable_ok =
        mode == MollifyMode::tensor && p.parts().has_value() &&
        (p.extension() != Extension::zero || p.parts()->offset == 0.0);

    if (separable_ok) {
        const SeparableParts& parts = *p.parts();
        const MollifierKernel k1 = kernel_1d(delta);
        const Extension ext = p.extension();
        auto ft = parts.ft;
        auto fx = parts.fx;
        auto tb = p.t_breaks();
        auto xb = p.x_breaks();
        const int q = quad_points;
        auto ft_conv = [ft, T, ext, k1, tb, q](double t) {
            return convolve_1d(ft, T, ext, k1, tb, q, t);
        };
        auto fx_conv = [fx, ext, k1, xb, q](double x) {
            return convolve_1d(fx, 1.0, ext, k1, xb, q, x);
        };
        const double offset = parts.offset;
        PressureField out(
            [offset, ft_conv, fx_conv](double t, double x) {
                return offset + ft_conv(t) * fx_conv(x);
            },
            T, Regularity::continuous, Extension::none);
        out.with_parts({offset, ft_conv, fx_conv});
        return out;
    }

    PressureField captured = p;
    const int q = quad_points;
    return PressureField(
        [captured, mode, delta, q](double t, double x) {
            return eval_convolution(captured, mode, delta, q, t, x);
        },
        T, Regularity::continuous, Extension::none);
}

GridFunction mollified_cell_averages(const PressureField& rho, const UniformGrid& grid,
                                     double t, int quad_points) {
    if (t < 0.0 || t > rho.horizon())
        throw std::invalid_argument("mollified_cell_averages: t outside [0, T]");
    return project_cell_averages([&](double x) { return rho(t, x); }, grid, quad_points);
}

} // namespace fvmt
