#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qbm/analytic.hpp"
#include "qbm/wigner.hpp"
#include "testutil.hpp"

using namespace qbm;

namespace {

PhysicalParams bath(double gamma, double w, double mass = 1.0) {
    if (w == 0.0) return make_params(mass, gamma, 0.0, 1.0, 1.0);
    return make_params(mass, gamma, w / (2.0 * mass * gamma), 1.0, 1.0);
}

SpectrumSpec flat_spec(const PhysicalParams& p) {
    SpectrumSpec s;
    s.params = p;
    s.mode = SpectrumMode::Flat;
    return s;
}

/// Second central moment of a sampled profile by trapezoid quadrature.
double profile_variance(const std::vector<double>& xs, const std::vector<double>& vals) {
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double h = xs[i] - xs[i - 1];
        m0 += 0.5 * h * (vals[i] + vals[i - 1]);
        m1 += 0.5 * h * (vals[i] * xs[i] + vals[i - 1] * xs[i - 1]);
    }
    const double mean = m1 / m0;
    double m2 = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double h = xs[i] - xs[i - 1];
        m2 += 0.5 * h *
              (vals[i] * (xs[i] - mean) * (xs[i] - mean) +
               vals[i - 1] * (xs[i - 1] - mean) * (xs[i - 1] - mean));
    }
    return m2 / m0;
}

}  // namespace

TEST_CASE("gaussian packet basics") {
    const auto w0 = gaussian_packet(0.5, -0.3, 2.0, 1.0);
    CHECK(w0.value(0.5, -0.3) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    const auto w1 = gaussian_packet(0.0, 0.0, 1.0, 2.0);
    CHECK(w1.value(0.0, 0.0) == doctest::Approx(0.5 / std::numbers::pi).epsilon(1e-14));
    CHECK(w0.value(0.5 + 0.7, -0.3) == w0.value(0.5 - 0.7, -0.3));
    CHECK_THROWS_AS(gaussian_packet(0.0, 0.0, -1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(gaussian_packet(0.0, 0.0, 1.0, 0.0), ValidationError);

    // normalization on a wide fine grid
    double integral = 0.0;
    const double sx = std::sqrt(w0.var_x()), sp = std::sqrt(w0.var_p());
    const int n = 400;
    const double hx = 12.0 * sx / n, hp = 12.0 * sp / n;
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            const double x = 0.5 - 6.0 * sx + hx * i;
            const double p = -0.3 - 6.0 * sp + hp * j;
            const double wgt = ((i == 0 || i == n) ? 0.5 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0);
            integral += wgt * w0.value(x, p);
        }
    integral *= hx * hp;
    CHECK(std::fabs(integral - 1.0) < 1e-6);
}

TEST_CASE("transport at t = 0 returns the packet exactly") {
    const auto params = bath(0.1, 0.2);
    const auto w0 = gaussian_packet(0.0, 1.0, 1.0, 1.0);
    const auto est = evaluate_transport(w0, 0.3, 0.7, 0.0, params, Potential::free_particle(),
                                        flat_spec(params), 1e-2, 50, 9);
    CHECK(est.value == w0.value(0.3, 0.7));
    CHECK(est.stderr_ == 0.0);
}

TEST_CASE("deterministic free transport shifts the argument") {
    const auto params = make_params(2.0, 0.0, 0.0, 1.0, 1.0);  // M = 2
    const auto w0 = gaussian_packet(0.0, 0.0, 1.5, 1.0);
    const double x = 0.4, p = 1.2, t = 2.0;
    const auto est = evaluate_transport(w0, x, p, t, params, Potential::free_particle(),
                                        flat_spec(params), 1e-2, 10, 9);
    CHECK(est.value == doctest::Approx(w0.value(x + p / 2.0 * t, p)).epsilon(1e-12));
    CHECK(est.stderr_ < 1e-9);  // identical samples up to roundoff
}

TEST_CASE("free packet spreading matches the replacement rule") {
    // sigma = 1 so the verbatim rule and the averaged profile coincide
    const double w = 0.25, t = 2.0;
    const auto params = bath(0.125, w);
    const auto w0 = gaussian_packet(0.0, 0.0, 1.0, 1.0);
    const auto pp = packet_params(params, 1.0, 0.0, 0.0, t);
    CHECK(pp.sigma_t == doctest::Approx(2.0).epsilon(1e-15));

    std::vector<double> xs;
    for (int i = -30; i <= 30; ++i) xs.push_back(0.2 * i);
    const auto grid = transport_grid(w0, xs, {0.0}, t, params, Potential::free_particle(),
                                     flat_spec(params), 0.05, 20000, 11, 0);
    const double var = profile_variance(xs, grid.value);
    // sigma(t)/2 is the profile variance; MC tolerance
    CHECK(std::fabs(var - pp.sigma_t / 2.0) < 0.03);
}

TEST_CASE("transported grid stays normalized (harmonic, noisy)") {
    const double w = 0.2, t = 2.0;
    const auto params = bath(0.002, w);  // friction contracts the map at O(gamma t)
    const auto pot = Potential::harmonic(1.0, 1.0);
    const auto w0 = gaussian_packet(0.0, 0.5, 1.0, 1.0);

    const double sx = 1.3, sp = 1.3;  // generous window around the moved packet
    std::vector<double> xs, ps;
    const int n = 25;
    for (int i = 0; i < n; ++i) {
        xs.push_back(-6.0 * sx + 12.0 * sx * i / (n - 1));
        ps.push_back(0.5 - 6.0 * sp + 12.0 * sp * i / (n - 1));
    }
    const auto grid = transport_grid(w0, xs, ps, t, params, pot, flat_spec(params), 0.05,
                                     100000, 21, 0);
    double integral = 0.0;
    const double hx = xs[1] - xs[0], hp = ps[1] - ps[0];
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 0; j < ps.size(); ++j) {
            const double wgt = ((i == 0 || i + 1 == xs.size()) ? 0.5 : 1.0) *
                               ((j == 0 || j + 1 == ps.size()) ? 0.5 : 1.0);
            integral += wgt * grid.value[i * ps.size() + j];
        }
    integral *= hx * hp;
    CHECK(std::fabs(integral - 1.0) < 0.02);
}

TEST_CASE("liouville limit transports W along characteristics") {
    const auto params = make_params(1.0, 0.0, 0.0, 1.0, 1.0);
    const auto pot = Potential::harmonic(1.0, 1.0);
    const auto w0 = gaussian_packet(0.3, -0.2, 1.0, 1.0);
    // ~10 periods, snapped onto the dt grid
    const double dt_fine = 2e-5;
    const double t = dt_fine * std::llround(10.0 * 2.0 * std::numbers::pi / dt_fine);

    for (double x : {-0.5, 0.0, 0.8}) {
        for (double p : {-0.7, 0.4}) {
            const auto est = evaluate_transport(w0, x, p, t, params, pot, flat_spec(params),
                                                dt_fine, 1, 3);
            // the transported momentum argument p - int grad V is the rotated
            // phase-space point; compare against the exact rotation
            const double c = std::cos(t), s = std::sin(t);
            const double exact = w0.value(x * c + p * s, p * c - x * s);
            CHECK(std::fabs(est.value - exact) < 1e-6);
            CHECK(est.stderr_ == 0.0);
        }
    }
}

TEST_CASE("deterministic harmonic ensemble: covariance rotates, det is conserved") {
    const auto params = make_params(1.0, 0.0, 0.0, 1.0, 1.0);
    const auto pot = Potential::harmonic(1.0, 1.0);
    const auto w0 = gaussian_packet(0.0, 0.0, 2.0, 1.0);  // anisotropic covariance
    IntegratorSpec spec;
    spec.dt = 1e-3;
    spec.n_steps = static_cast<std::size_t>(std::llround(10.0 * std::numbers::pi / 1e-3));
    const auto m = evolve_ensemble_forward(w0, params, pot, flat_spec(params), spec, 4096, 33);

    const double det0 = m.var_x[0] * m.var_p[0] - m.cov_xp[0] * m.cov_xp[0];
    double worst = 0.0;
    for (std::size_t k = 0; k < m.size(); k += 500) {
        const double det = m.var_x[k] * m.var_p[k] - m.cov_xp[k] * m.cov_xp[k];
        worst = std::max(worst, std::fabs(det / det0 - 1.0));
    }
    CHECK(worst < 1e-6);

    // period pi/omega in the covariance
    const auto half = static_cast<std::size_t>(std::llround(std::numbers::pi / 1e-3));
    CHECK(std::fabs(m.var_x[3 * half] - m.var_x[2 * half]) < 1e-4 * m.var_x[2 * half]);
}

TEST_CASE("momentum width facts") {
    SUBCASE("free particle from a point accumulates w t") {
        const double w = 0.5;
        const auto params = bath(0.25, w);
        IntegratorSpec spec;
        spec.dt = 1e-3;
        spec.n_steps = 4000;
        EnsembleOptions opts;
        opts.n_traj = 20000;
        opts.base_seed = 44;
        const auto m = run_ensemble(params, Potential::free_particle(),
                                    fixed_initial(make_state1(0.0, 0.0)), flat_spec(params),
                                    spec, opts);
        const auto vp = momentum_width(m);
        for (std::size_t k : {1000ul, 4000ul}) {
            const double expect = w * m.time_at(k);
            CHECK(std::fabs(vp[k] / expect - 1.0) < 4.0 * std::sqrt(2.0 / 20000.0));
        }
    }

    SUBCASE("zero strength keeps a point ensemble sharp") {
        const auto params = bath(0.1, 0.0);
        IntegratorSpec spec;
        spec.dt = 1e-3;
        spec.n_steps = 100;
        EnsembleOptions opts;
        opts.n_traj = 16;
        opts.base_seed = 4;
        const auto m = run_ensemble(params, Potential::harmonic(1.0, 1.0),
                                    fixed_initial(make_state1(1.0, 0.0)), flat_spec(params),
                                    spec, opts);
        for (double v : momentum_width(m)) CHECK(v < 1e-15);  // identical trajectories
    }

    SUBCASE("high-frequency harmonic obeys the virial relation on time average") {
        const double omega = 10.0, w = 0.4;
        const auto p2 = bath(1e-4, w);  // essentially undamped
        IntegratorSpec spec;
        spec.dt = 1e-3;
        spec.n_steps = 10000;
        EnsembleOptions opts;
        opts.n_traj = 4000;
        opts.base_seed = 45;
        const auto m = run_ensemble(p2, Potential::harmonic(1.0, omega),
                                    fixed_initial(make_state1(0.1, 0.0)), flat_spec(p2), spec,
                                    opts);
        double avg_vp = 0.0, avg_vx = 0.0;
        for (std::size_t k = 0; k < m.size(); ++k) {
            avg_vp += m.var_p[k];
            avg_vx += m.var_x[k];
        }
        avg_vp /= static_cast<double>(m.size());
        avg_vx /= static_cast<double>(m.size());
        CHECK(std::fabs(avg_vp / (omega * omega * avg_vx) - 1.0) < 0.10);
    }

    SUBCASE("verbatim relation is reported as a diagnostic") {
        const double w = 0.2;
        const auto params = bath(0.1, w);
        IntegratorSpec spec;
        spec.dt = 1e-3;
        spec.n_steps = 2000;
        const auto w0 = gaussian_packet(0.0, 0.0, 1.0, 1.0);
        const auto m = evolve_ensemble_forward(w0, params, Potential::harmonic(1.0, 1.0),
                                               flat_spec(params), spec, 2000, 46);
        const auto oracle = oracle_momentum_width(m, params, 1.0);
        REQUIRE(oracle.size() == m.size());
        CHECK(oracle[0] == 0.0);
        for (std::size_t k = 1; k < oracle.size(); k += 500) {
            CHECK(std::isfinite(oracle[k]));
            CHECK(oracle[k] > 0.0);
        }
    }
}

TEST_CASE("transport and forward evolution agree through the time-direction map") {
    // deterministic Liouville content of the convention: with k = 0 the
    // backward-argument estimator equals the forward density at reflected
    // momentum
    const auto params = make_params(1.0, 0.0, 0.0, 1.0, 1.0);
    const auto pot = Potential::free_particle();
    const auto w0 = gaussian_packet(0.2, 0.0, 1.0, 1.0);
    const double t = 1.0;

    IntegratorSpec spec;
    spec.dt = 1e-3;
    spec.n_steps = 1000;
    const auto fwd = evolve_ensemble_forward(w0, params, pot, flat_spec(params), spec, 60000, 71);
    const auto kf = spec.n_steps;
    const double mx = fwd.mean_x[kf], mp = fwd.mean_p[kf];
    const double vx = fwd.var_x[kf], vp = fwd.var_p[kf], cxp = fwd.cov_xp[kf];
    const double det = vx * vp - cxp * cxp;

    auto fwd_density = [&](double x, double p) {
        const double dx = x - mx, dp = p - mp;
        const double quad = (vp * dx * dx - 2.0 * cxp * dx * dp + vx * dp * dp) / det;
        return std::exp(-0.5 * quad) / (2.0 * std::numbers::pi * std::sqrt(det));
    };

    for (double x : {-0.6, 0.2, 1.0}) {
        for (double p : {-0.8, 0.3}) {
            const auto est =
                evaluate_transport(w0, x, p, t, params, pot, flat_spec(params), 1e-3, 1, 5);
            const double mapped = fwd_density(x, -p);
            // forward moments carry MC error ~ 1/sqrt(n); allow a loose band
            CHECK(std::fabs(est.value - mapped) < 0.02 * (0.5 + mapped));
        }
    }

    // with noise the x-marginal width still matches between the two routes
    const double w = 0.25;
    const auto noisy = bath(0.125, w);
    const auto fwd2 =
        evolve_ensemble_forward(w0, noisy, pot, flat_spec(noisy), spec, 60000, 72);
    std::vector<double> xs, ps;
    for (int i = -28; i <= 28; ++i) xs.push_back(0.2 + 0.25 * i);
    for (int i = -18; i <= 18; ++i) ps.push_back(0.25 * i);
    const auto grid =
        transport_grid(w0, xs, ps, t, noisy, pot, flat_spec(noisy), 0.05, 20000, 73, 0);
    std::vector<double> marginal(xs.size(), 0.0);
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = 1; j < ps.size(); ++j)
            marginal[i] += 0.5 * (ps[j] - ps[j - 1]) *
                           (grid.value[i * ps.size() + j] + grid.value[i * ps.size() + j - 1]);
    const double var_marginal = profile_variance(xs, marginal);
    CHECK(std::fabs(var_marginal - fwd2.var_x[kf]) < 0.05);
}
