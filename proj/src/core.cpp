#include "qbm/core.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace qbm {

namespace detail {

void require_finite(double v, const char* field) {
    if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
}

}  // namespace detail

PhysicalParams make_params(double mass, double gamma, double temperature, double hbar, double kb,
                           std::optional<double> alpha, std::optional<double> lightspeed) {
    detail::require_finite(mass, "mass");
    detail::require_finite(gamma, "gamma");
    detail::require_finite(temperature, "temperature");
    detail::require_finite(hbar, "hbar");
    detail::require_finite(kb, "kb");
    if (mass <= 0.0) throw ValidationError("mass", "must be > 0");
    if (hbar <= 0.0) throw ValidationError("hbar", "must be > 0");
    if (kb <= 0.0) throw ValidationError("kb", "must be > 0");
    if (gamma < 0.0) throw ValidationError("gamma", "must be >= 0");
    if (temperature < 0.0) throw ValidationError("temperature", "must be >= 0");

    PhysicalParams p;
    p.mass = mass;
    p.gamma = gamma;
    p.temperature = temperature;
    p.hbar = hbar;
    p.kb = kb;
    if (alpha) {
        detail::require_finite(*alpha, "alpha");
        if (*alpha <= 0.0) throw ValidationError("alpha", "must be > 0");
        p.alpha = *alpha;
    }
    if (lightspeed) {
        detail::require_finite(*lightspeed, "c");
        if (*lightspeed <= 0.0) throw ValidationError("c", "must be > 0");
        p.lightspeed = *lightspeed;
        p.bohr_temperature = p.alpha * p.alpha * mass * (*lightspeed) * (*lightspeed) / kb;
    }
    p.noise_strength = 2.0 * mass * gamma * kb * temperature;
    return p;
}

// --------------------------------------------------------------------------
// Potential
// --------------------------------------------------------------------------

Potential Potential::custom(std::size_t dims, ValueFn v, GradFn g, HessFn h) {
    if (dims == 0) throw ValidationError("dims", "must be >= 1");
    Potential p;
    p.dims_ = dims;
    p.v_ = std::move(v);
    p.g_ = std::move(g);
    p.h_ = std::move(h);
    return p;
}

Potential Potential::free_particle(std::size_t dims) {
    Potential p = custom(
        dims, [](std::span<const double>) { return 0.0; },
        [](std::span<const double>, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
        },
        [](std::span<const double> x, std::span<double> out) {
            std::fill(out.begin(), out.end(), 0.0);
            (void)x;
        });
    p.linear_ = true;
    p.linear_coeff_ = 0.0;
    return p;
}

Potential Potential::harmonic(double mass, double omega, std::size_t dims) {
    detail::require_finite(mass, "mass");
    detail::require_finite(omega, "omega");
    if (mass <= 0.0) throw ValidationError("mass", "must be > 0");
    const double k = mass * omega * omega;
    Potential p = custom(
        dims,
        [k](std::span<const double> x) {
            double s = 0.0;
            for (double xi : x) s += xi * xi;
            return 0.5 * k * s;
        },
        [k](std::span<const double> x, std::span<double> out) {
            for (std::size_t i = 0; i < x.size(); ++i) out[i] = k * x[i];
        },
        [k](std::span<const double> x, std::span<double> out) {
            const std::size_t d = x.size();
            std::fill(out.begin(), out.end(), 0.0);
            for (std::size_t i = 0; i < d; ++i) out[i * d + i] = k;
        });
    p.linear_ = true;
    p.linear_coeff_ = k;
    return p;
}

Potential Potential::quartic(double a, double b) {
    detail::require_finite(a, "a");
    detail::require_finite(b, "b");
    return custom(
        1,
        [a, b](std::span<const double> x) {
            const double x2 = x[0] * x[0];
            return 0.5 * a * x2 + 0.25 * b * x2 * x2;
        },
        [a, b](std::span<const double> x, std::span<double> out) {
            out[0] = a * x[0] + b * x[0] * x[0] * x[0];
        },
        [a, b](std::span<const double> x, std::span<double> out) {
            out[0] = a + 3.0 * b * x[0] * x[0];
        });
}

namespace {

// Natural cubic spline with analytic first/second derivatives.
struct Spline {
    std::vector<double> xs, ys, m;  // m = second derivatives at knots

    static Spline build(std::vector<double> xs, std::vector<double> ys) {
        const std::size_t n = xs.size();
        if (n < 4) throw ValidationError("potential.grid", "needs at least 4 points");
        for (std::size_t i = 1; i < n; ++i)
            if (!(xs[i] > xs[i - 1]))
                throw ValidationError("potential.grid", "must be strictly increasing");
        Spline s;
        s.xs = std::move(xs);
        s.ys = std::move(ys);
        s.m.assign(n, 0.0);
        // tridiagonal solve (natural boundary conditions)
        std::vector<double> c(n, 0.0), d(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = s.xs[i] - s.xs[i - 1];
            const double h1 = s.xs[i + 1] - s.xs[i];
            const double a = h0 / 6.0, bdiag = (h0 + h1) / 3.0, cc = h1 / 6.0;
            const double rhs =
                (s.ys[i + 1] - s.ys[i]) / h1 - (s.ys[i] - s.ys[i - 1]) / h0;
            const double w = bdiag - a * c[i - 1];
            c[i] = cc / w;
            d[i] = (rhs - a * d[i - 1]) / w;
        }
        for (std::size_t i = n - 2; i >= 1; --i) s.m[i] = d[i] - c[i] * s.m[i + 1];
        return s;
    }

    std::size_t segment(double x) const {
        if (x < xs.front() || x > xs.back())
            throw ValidationError("x", "outside tabulation range");
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs.begin());
        if (i == 0) i = 1;
        if (i >= xs.size()) i = xs.size() - 1;
        return i - 1;
    }

    double eval(double x, int deriv) const {
        const std::size_t i = segment(x);
        const double h = xs[i + 1] - xs[i];
        const double a = (xs[i + 1] - x) / h;
        const double b = (x - xs[i]) / h;
        if (deriv == 0)
            return a * ys[i] + b * ys[i + 1] +
                   ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
        if (deriv == 1)
            return (ys[i + 1] - ys[i]) / h -
                   (3.0 * a * a - 1.0) * h * m[i] / 6.0 + (3.0 * b * b - 1.0) * h * m[i + 1] / 6.0;
        return a * m[i] + b * m[i + 1];
    }
};

}  // namespace

Potential Potential::tabulated(std::vector<double> grid, std::vector<double> values) {
    if (grid.size() != values.size())
        throw ValidationError("potential.values", "size must match grid");
    auto spline = std::make_shared<Spline>(Spline::build(std::move(grid), std::move(values)));
    return custom(
        1, [spline](std::span<const double> x) { return spline->eval(x[0], 0); },
        [spline](std::span<const double> x, std::span<double> out) {
            out[0] = spline->eval(x[0], 1);
        },
        [spline](std::span<const double> x, std::span<double> out) {
            out[0] = spline->eval(x[0], 2);
        });
}

double Potential::value(std::span<const double> x) const {
    if (x.size() != dims_) throw ValidationError("x", "dimension mismatch");
    return v_(x);
}

void Potential::gradient(std::span<const double> x, std::span<double> out) const {
    if (x.size() != dims_ || out.size() != dims_)
        throw ValidationError("x", "dimension mismatch");
    g_(x, out);
}

void Potential::hessian(std::span<const double> x, std::span<double> out) const {
    if (x.size() != dims_ || out.size() != dims_ * dims_)
        throw ValidationError("x", "dimension mismatch");
    h_(x, out);
}

double Potential::value1(double x) const { return value(std::span<const double>(&x, 1)); }

double Potential::grad1(double x) const {
    double g = 0.0;
    gradient(std::span<const double>(&x, 1), std::span<double>(&g, 1));
    return g;
}

double Potential::hess1(double x) const {
    double h = 0.0;
    hessian(std::span<const double>(&x, 1), std::span<double>(&h, 1));
    return h;
}

PotentialEval potential_eval(const Potential& p, std::span<const double> x) {
    for (double xi : x) detail::require_finite(xi, "x");
    PotentialEval e;
    e.grad.resize(p.dims());
    e.hess.resize(p.dims() * p.dims());
    e.value = p.value(x);
    p.gradient(x, e.grad);
    p.hessian(x, e.hess);
    return e;
}

PhaseState make_state(std::vector<double> x, std::vector<double> p) {
    if (x.size() != p.size()) throw ValidationError("p", "dimension must match x");
    if (x.empty()) throw ValidationError("x", "must be non-empty");
    for (double v : x) detail::require_finite(v, "x");
    for (double v : p) detail::require_finite(v, "p");
    return PhaseState{std::move(x), std::move(p)};
}

PhaseState make_state1(double x, double p) { return make_state({x}, {p}); }

}  // namespace qbm
