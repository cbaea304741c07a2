#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qbm/core.hpp"
#include "qbm/noise.hpp"

namespace qbm {

/// Omega^2(t) sampled on a uniform grid, with midpoint values so fourth-order
/// stages can be fed without re-deriving the orbit.
struct FrequencyTrack {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> omega2;       // size n
    std::vector<double> omega2_half;  // size n-1

    std::size_t size() const { return omega2.size(); }
};

FrequencyTrack make_track(const std::function<double(double)>& omega2_fn, double t0, double dt,
                          std::size_t n_steps);

/// 1-D classical orbit of M x'' + V'(x) = 0 with its frequency track
/// Omega^2(t) = V''(x_cl(t)) / M.
struct ClassicalOrbit {
    double mass = 1.0;
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> x;  // x_cl
    std::vector<double> v;  // xdot_cl
    FrequencyTrack track;

    std::size_t size() const { return x.size(); }
    double time_at(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
};

ClassicalOrbit solve_classical(const PhysicalParams& params, const Potential& pot, double x_a,
                               double p, double t0, double dt, std::size_t n_steps);

/// Retarded Green function of d^2/dt^2 + Omega^2(t), built from homogeneous
/// solutions xi1 (xi1(0)=0, xi1'(0)=1) and xi2 (xi2(0)=1, xi2'(0)=0).
/// G(t,t') = xi1(t) xi2(t') - xi2(t) xi1(t') for t >= t', 0 otherwise.
struct GreenFunction {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<double> xi1, xi1dot, xi2, xi2dot;

    std::size_t size() const { return xi1.size(); }
    double time_at(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
    double operator()(std::size_t k, std::size_t j) const {
        if (k < j) return 0.0;
        return xi1[k] * xi2[j] - xi2[k] * xi1[j];
    }
    /// Response kernel to a noise increment at t_j: K = -dG/dt' (K(t,t) = 1).
    double increment_kernel(std::size_t k, std::size_t j) const {
        if (k < j) return 0.0;
        return xi2[k] * xi1dot[j] - xi1[k] * xi2dot[j];
    }
    double wronskian(std::size_t k) const { return xi1[k] * xi2dot[k] - xi1dot[k] * xi2[k]; }
};

GreenFunction build_green(const FrequencyTrack& track);

/// Noise response Q(t) = (1/M) * sum_j K(t, t_j) deta_j, the quadrature
/// solution of M Q'' + V''(x_cl) Q = noise forcing with Q(0) = Q'(0) = 0.
std::vector<double> compute_Q(const GreenFunction& g, const NoisePath& noise,
                              const PhysicalParams& params);

/// Dissipative correction: A solves M A'' + V''(x_cl) A = V''(x_cl) xdot_cl
/// (retarded quadrature plus optional homogeneous c1 xi1 + c2 xi2);
/// B = A / x_cl masked where |x_cl| < eps * amplitude.
struct DissipativeSolution {
    std::vector<double> A;
    std::vector<double> B;          // NaN where masked
    std::vector<unsigned char> valid;
    std::vector<double> damped_position;  // x_cl - gamma A (singularity-free)
};

DissipativeSolution compute_B(const GreenFunction& g, const ClassicalOrbit& orbit,
                              const PhysicalParams& params, double c1 = 0.0, double c2 = 0.0);

/// First-order composite x(t) = exp(-gamma B) [x_cl + scale * Q]; at masked
/// points the linearized form (x_cl - gamma A) + scale * Q is used. When
/// `noise_scale` is absent the scale is sqrt(T / T_H), which requires
/// bohr_temperature (lightspeed set).
std::vector<double> composite_solution(const ClassicalOrbit& orbit,
                                       const DissipativeSolution& diss,
                                       const std::vector<double>& Q,
                                       const PhysicalParams& params,
                                       std::optional<double> noise_scale = {});

struct GrowthRate {
    double lambda = 0.0;
    double stderr_ = 0.0;
    bool degenerate = false;
};

/// Exponential growth estimate of the Green-function envelope: least-squares
/// slope of log window-maxima of sqrt(xi1^2 + xi2^2). Requires at least 10
/// characteristic periods of grid.
GrowthRate growth_rate(const GreenFunction& g);

/// Monte Carlo fluctuation width of the composite solution for a harmonic
/// potential (smooth secular B via c1 = omega^2/2), white physical noise.
struct WidthSeries {
    double t0 = 0.0, dt = 0.0;
    std::vector<double> var_x;
    std::vector<double> se_var_x;
};

WidthSeries composite_width_mc(const PhysicalParams& params, double omega, double x_a, double p0,
                               double dt, std::size_t n_steps, std::size_t n_paths,
                               std::uint64_t seed, int workers = 0);

}  // namespace qbm
