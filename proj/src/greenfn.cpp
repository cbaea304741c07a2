#include "qbm/greenfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qbm/kernels.hpp"
#include "qbm/parallel.hpp"

namespace qbm {

FrequencyTrack make_track(const std::function<double(double)>& omega2_fn, double t0, double dt,
                          std::size_t n_steps) {
    if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
    FrequencyTrack tr;
    tr.t0 = t0;
    tr.dt = dt;
    tr.omega2.resize(n_steps + 1);
    tr.omega2_half.resize(n_steps);
    for (std::size_t k = 0; k <= n_steps; ++k)
        tr.omega2[k] = omega2_fn(t0 + dt * static_cast<double>(k));
    for (std::size_t k = 0; k < n_steps; ++k)
        tr.omega2_half[k] = omega2_fn(t0 + dt * (static_cast<double>(k) + 0.5));
    return tr;
}

ClassicalOrbit solve_classical(const PhysicalParams& params, const Potential& pot, double x_a,
                               double p, double t0, double dt, std::size_t n_steps) {
    if (pot.dims() != 1) throw ValidationError("potential", "semiclassical solver is 1-D");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt", "must be > 0");
    detail::require_finite(x_a, "x_a");
    detail::require_finite(p, "p");

    const double M = params.mass;
    ClassicalOrbit orb;
    orb.mass = M;
    orb.t0 = t0;
    orb.dt = dt;
    orb.x.resize(n_steps + 1);
    orb.v.resize(n_steps + 1);
    orb.track.t0 = t0;
    orb.track.dt = dt;
    orb.track.omega2.resize(n_steps + 1);
    orb.track.omega2_half.resize(n_steps);

    auto acc = [&](double x) { return -pot.grad1(x) / M; };

    double x = x_a;
    double v = p / M;
    orb.x[0] = x;
    orb.v[0] = v;
    orb.track.omega2[0] = pot.hess1(x) / M;
    for (std::size_t k = 0; k < n_steps; ++k) {
        const double k1x = v, k1v = acc(x);
        const double k2x = v + 0.5 * dt * k1v, k2v = acc(x + 0.5 * dt * k1x);
        const double k3x = v + 0.5 * dt * k2v, k3v = acc(x + 0.5 * dt * k2x);
        const double k4x = v + dt * k3v, k4v = acc(x + dt * k3x);
        const double xn = x + dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        const double vn = v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (!std::isfinite(xn) || !std::isfinite(vn))
            throw IntegrationError("classical orbit escaped at t = " +
                                       std::to_string(t0 + dt * static_cast<double>(k)),
                                   k + 1);
        // Hermite midpoint (uses both endpoints and slopes, O(dt^4))
        const double xh = 0.5 * (x + xn) + 0.125 * dt * (v - vn);
        orb.track.omega2_half[k] = pot.hess1(xh) / M;
        x = xn;
        v = vn;
        orb.x[k + 1] = x;
        orb.v[k + 1] = v;
        orb.track.omega2[k + 1] = pot.hess1(x) / M;
    }
    return orb;
}

GreenFunction build_green(const FrequencyTrack& track) {
    const std::size_t n = track.size();
    if (n < 2) throw ValidationError("track", "needs at least 2 grid points");
    if (track.omega2_half.size() + 1 != n)
        throw ValidationError("track", "midpoint array size mismatch");

    GreenFunction g;
    g.t0 = track.t0;
    g.dt = track.dt;
    g.xi1.resize(n);
    g.xi1dot.resize(n);
    g.xi2.resize(n);
    g.xi2dot.resize(n);
    g.xi1[0] = 0.0;
    g.xi1dot[0] = 1.0;
    g.xi2[0] = 1.0;
    g.xi2dot[0] = 0.0;

    const double h = track.dt;
    auto rk4 = [&](double& y, double& z, double w2a, double w2m, double w2b) {
        const double k1y = z, k1z = -w2a * y;
        const double k2y = z + 0.5 * h * k1z, k2z = -w2m * (y + 0.5 * h * k1y);
        const double k3y = z + 0.5 * h * k2z, k3z = -w2m * (y + 0.5 * h * k2y);
        const double k4y = z + h * k3z, k4z = -w2b * (y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    };

    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double w2a = track.omega2[k];
        const double w2m = track.omega2_half[k];
        const double w2b = track.omega2[k + 1];
        double y1 = g.xi1[k], z1 = g.xi1dot[k];
        double y2 = g.xi2[k], z2 = g.xi2dot[k];
        rk4(y1, z1, w2a, w2m, w2b);
        rk4(y2, z2, w2a, w2m, w2b);
        if (!std::isfinite(y1) || !std::isfinite(y2))
            throw IntegrationError("homogeneous solution overflow", k + 1);
        g.xi1[k + 1] = y1;
        g.xi1dot[k + 1] = z1;
        g.xi2[k + 1] = y2;
        g.xi2dot[k + 1] = z2;
    }
    return g;
}

std::vector<double> compute_Q(const GreenFunction& g, const NoisePath& noise,
                              const PhysicalParams& params) {
    const std::size_t n = g.size();
    if (noise.dims != 1) throw ValidationError("noise", "Q quadrature is 1-D");
    if (noise.steps() + 1 != n) throw ValidationError("noise", "grid mismatch with Green function");
    if (std::fabs(noise.dt - g.dt) > 1e-12 * std::max(noise.dt, g.dt))
        throw ValidationError("noise", "grid mismatch with Green function");

    // Q(t_k) = (1/M) sum_{j<k} K(t_k, t_j) deta_j with K = -dG/dt'; expanding
    // K through xi1, xi2 turns the double loop into two running sums.
    std::vector<double> Q(n, 0.0);
    const double invM = 1.0 / params.mass;
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double de = noise.increments[k - 1];
        s1 += g.xi1dot[k - 1] * de;
        s2 += g.xi2dot[k - 1] * de;
        Q[k] = (g.xi2[k] * s1 - g.xi1[k] * s2) * invM;
    }
    return Q;
}

DissipativeSolution compute_B(const GreenFunction& g, const ClassicalOrbit& orbit,
                              const PhysicalParams& params, double c1, double c2) {
    const std::size_t n = g.size();
    if (orbit.size() != n) throw ValidationError("orbit", "grid mismatch with Green function");

    DissipativeSolution out;
    out.A.resize(n);
    out.B.assign(n, std::numeric_limits<double>::quiet_NaN());
    out.valid.assign(n, 0);
    out.damped_position.resize(n);

    // forcing f(s) = V''(x_cl) xdot_cl = M Omega^2(s) v(s); trapezoid running sums
    const double M = orbit.mass;
    const double invM = 1.0 / M;
    auto f_at = [&](std::size_t k) { return M * orbit.track.omega2[k] * orbit.v[k]; };

    double t1 = 0.0, t2 = 0.0;  // int xi1*f, int xi2*f
    double prev1 = g.xi1[0] * f_at(0);
    double prev2 = g.xi2[0] * f_at(0);
    out.A[0] = c1 * g.xi1[0] + c2 * g.xi2[0];
    for (std::size_t k = 1; k < n; ++k) {
        const double cur1 = g.xi1[k] * f_at(k);
        const double cur2 = g.xi2[k] * f_at(k);
        t1 += 0.5 * g.dt * (prev1 + cur1);
        t2 += 0.5 * g.dt * (prev2 + cur2);
        prev1 = cur1;
        prev2 = cur2;
        out.A[k] = invM * (g.xi1[k] * t2 - g.xi2[k] * t1) + c1 * g.xi1[k] + c2 * g.xi2[k];
    }

    double amp = 0.0;
    for (double xv : orbit.x) amp = std::max(amp, std::fabs(xv));
    const double eps = 1e-6 * amp;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::fabs(orbit.x[k]) > eps) {
            out.B[k] = out.A[k] / orbit.x[k];
            out.valid[k] = 1;
        }
        out.damped_position[k] = orbit.x[k] - params.gamma * out.A[k];
    }
    return out;
}

std::vector<double> composite_solution(const ClassicalOrbit& orbit,
                                       const DissipativeSolution& diss,
                                       const std::vector<double>& Q,
                                       const PhysicalParams& params,
                                       std::optional<double> noise_scale) {
    const std::size_t n = orbit.size();
    if (diss.A.size() != n || Q.size() != n)
        throw ValidationError("series", "grid mismatch");
    double scale;
    if (noise_scale) {
        scale = *noise_scale;
    } else {
        if (!params.bohr_temperature)
            throw ValidationError("c", "temperature scale needs lightspeed set (for T_H) or an "
                                       "explicit noise scale");
        scale = std::sqrt(params.temperature / *params.bohr_temperature);
    }

    std::vector<double> x(n);
    const double gamma = params.gamma;
    for (std::size_t k = 0; k < n; ++k) {
        if (diss.valid[k]) {
            x[k] = std::exp(-gamma * diss.B[k]) * (orbit.x[k] + scale * Q[k]);
        } else {
            // first-order form where x_cl crosses zero
            x[k] = (orbit.x[k] - gamma * diss.A[k]) + scale * Q[k];
        }
    }
    return x;
}

GrowthRate growth_rate(const GreenFunction& g) {
    const std::size_t n = g.size();
    if (n < 64) throw ValidationError("grid", "too short for a growth-rate fit");
    const double total = g.dt * static_cast<double>(n - 1);

    // characteristic period: from sign changes of xi2 when oscillatory,
    // otherwise from the e-folding of the envelope itself
    std::size_t crossings = 0;
    double last_cross = g.t0;
    double gap_sum = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        if ((g.xi2[k - 1] < 0.0) != (g.xi2[k] < 0.0)) {
            const double t = g.time_at(k);
            if (crossings > 0) gap_sum += t - last_cross;
            last_cross = t;
            ++crossings;
        }
    }
    double t_char;
    if (crossings >= 5) {
        t_char = 2.0 * gap_sum / static_cast<double>(crossings - 1);
    } else {
        // non-oscillatory: need enough span for the envelope to develop
        t_char = total / 20.0;
    }
    if (total < 10.0 * t_char)
        throw ValidationError("grid", "need at least 10 characteristic periods");

    constexpr std::size_t kWindows = 20;
    const std::size_t wlen = n / kWindows;
    std::vector<double> tw, lw;
    for (std::size_t wdx = 0; wdx < kWindows; ++wdx) {
        const std::size_t a = wdx * wlen;
        const std::size_t b = (wdx + 1 == kWindows) ? n : a + wlen;
        double mx = 0.0;
        for (std::size_t k = a; k < b; ++k)
            mx = std::max(mx, std::hypot(g.xi1[k], g.xi2[k]));
        if (mx > 0.0) {
            tw.push_back(g.t0 + g.dt * (0.5 * static_cast<double>(a + b)));
            lw.push_back(std::log(mx));
        }
    }

    GrowthRate out;
    const std::size_t m = tw.size();
    if (m < 4) {
        out.degenerate = true;
        return out;
    }
    double tbar = 0.0, lbar = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        tbar += tw[i];
        lbar += lw[i];
    }
    tbar /= static_cast<double>(m);
    lbar /= static_cast<double>(m);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (tw[i] - tbar) * (tw[i] - tbar);
        sxy += (tw[i] - tbar) * (lw[i] - lbar);
    }
    if (sxx <= 0.0) {
        out.degenerate = true;
        return out;
    }
    out.lambda = sxy / sxx;
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double r = lw[i] - lbar - out.lambda * (tw[i] - tbar);
        ss += r * r;
    }
    out.stderr_ = std::sqrt(ss / static_cast<double>(m - 2) / sxx);
    return out;
}

WidthSeries composite_width_mc(const PhysicalParams& params, double omega, double x_a, double p0,
                               double dt, std::size_t n_steps, std::size_t n_paths,
                               std::uint64_t seed, int workers) {
    const Potential pot = Potential::harmonic(params.mass, omega, 1);
    const ClassicalOrbit orbit = solve_classical(params, pot, x_a, p0, 0.0, dt, n_steps);
    const GreenFunction green = build_green(orbit.track);
    const DissipativeSolution diss =
        compute_B(green, orbit, params, 0.5 * omega * omega, 0.0);

    const std::size_t rows = n_steps + 1;

    // smooth envelope: the secular B is regular through x_cl zero crossings,
    // so masked points are filled by interpolating between valid neighbours
    std::vector<double> env(rows);
    {
        std::vector<std::size_t> knots;
        for (std::size_t k = 0; k < rows; ++k)
            if (diss.valid[k]) knots.push_back(k);
        if (knots.empty()) throw IntegrationError("dissipative envelope undefined", 0);
        std::vector<double> bfill(rows);
        for (std::size_t k = 0; k <= knots.front(); ++k) bfill[k] = diss.B[knots.front()];
        for (std::size_t k = knots.back(); k < rows; ++k) bfill[k] = diss.B[knots.back()];
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            const std::size_t a = knots[i], b = knots[i + 1];
            bfill[a] = diss.B[a];
            const double span = static_cast<double>(b - a);
            for (std::size_t j = a + 1; j < b; ++j)
                bfill[j] = diss.B[a] + (diss.B[b] - diss.B[a]) *
                                           (static_cast<double>(j - a) / span);
        }
        for (std::size_t k = 0; k < rows; ++k) env[k] = std::exp(-params.gamma * bfill[k]);
    }

    const double w = params.noise_strength;
    const double noise_scale = std::sqrt(w * dt);
    const double invM = 1.0 / params.mass;

    struct Partial {
        std::vector<double> sums;  // x, x2, x3, x4 per row (reuses MomentSums layout)
    };

    std::vector<double> total(7 * rows, 0.0);

    auto produce = [&](std::size_t, std::size_t i0, std::size_t i1) {
        Partial part;
        part.sums.assign(7 * rows, 0.0);
        std::vector<double> z(n_steps), xcomp(rows);
        for (std::size_t path = i0; path < i1; ++path) {
            if (w > 0.0) {
                kernels::fill_gaussian(seed, path, kernels::tags::kWhite, 0, z);
            } else {
                std::fill(z.begin(), z.end(), 0.0);
            }
            double s1 = 0.0, s2 = 0.0;
            xcomp[0] = env[0] * orbit.x[0];
            for (std::size_t k = 1; k < rows; ++k) {
                const double de = z[k - 1] * noise_scale;
                s1 += green.xi1dot[k - 1] * de;
                s2 += green.xi2dot[k - 1] * de;
                const double q = (green.xi2[k] * s1 - green.xi1[k] * s2) * invM;
                xcomp[k] = env[k] * (orbit.x[k] + q);
            }
            kernels::MomentSums sv{part.sums.data(),
                                   part.sums.data() + rows,
                                   part.sums.data() + 2 * rows,
                                   part.sums.data() + 3 * rows,
                                   part.sums.data() + 4 * rows,
                                   part.sums.data() + 5 * rows,
                                   part.sums.data() + 6 * rows};
            kernels::accumulate_moments(xcomp.data(), xcomp.data(), rows, sv);
        }
        return part;
    };
    auto consume = [&](std::size_t, Partial&& part) {
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += part.sums[i];
    };
    ordered_block_reduce<Partial>(n_paths, 32, workers, produce, consume);

    WidthSeries out;
    out.t0 = 0.0;
    out.dt = dt;
    out.var_x.resize(rows);
    out.se_var_x.resize(rows);
    const double n = static_cast<double>(n_paths);
    for (std::size_t k = 0; k < rows; ++k) {
        const double mx = total[k] / n;
        const double vx = std::max(0.0, total[rows + k] / n - mx * mx);
        const double m4 = std::max(
            0.0, (total[3 * rows + k] - 4.0 * mx * total[2 * rows + k] +
                  6.0 * mx * mx * total[rows + k]) / n - 3.0 * mx * mx * mx * mx);
        out.var_x[k] = vx;
        out.se_var_x[k] = std::sqrt(std::max(0.0, m4 - vx * vx) / n);
    }
    return out;
}

}  // namespace qbm
