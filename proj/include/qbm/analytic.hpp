#pragma once

#include <vector>

#include "qbm/core.hpp"
#include "qbm/noise.hpp"

namespace qbm {

// Closed forms transcribed verbatim (including the 1/(1+gamma*omega) momentum
// factor and the backward-looking packet drift); consumers decide how far to
// trust them. All functions here are pure.

/// Free-particle position x + (p/M)(t - t0), noiseless.
double free_solution(const PhysicalParams& params, double x, double p, double elapsed);

/// Free-particle path on the noise grid: x + (p/M) t_k + eta(t_k)/M.
std::vector<double> free_solution_path(const PhysicalParams& params, double x, double p,
                                       const NoisePath& noise);

/// Noise-averaged damped harmonic orbit:
/// exp(-gamma w^2 s/2) [x_a cos ws + p sin(ws) / ((1+gamma w) M w)], s = elapsed.
double harmonic_orbit(const PhysicalParams& params, double omega, double x_a, double p,
                      double elapsed);

/// Fluctuation width (w/2M^2) s exp(-gamma w^2 s) [1 + sin(2ws)/(2ws)];
/// 0 at s = 0, and -> free width (w/M^2) s as omega -> 0.
double harmonic_width(const PhysicalParams& params, double omega, double gamma, double elapsed);

/// f_gamma(tau) = tau exp(-g tau) [1 + sin(2 tau)/(2 tau)], tau = omega*t and
/// g = gamma*omega dimensionless; Var x = (w / 2 M^2 omega) f.
double width_shape(double g, double tau);

struct WidthCurve {
    std::vector<double> omega_t;                 // grid
    std::vector<std::vector<double>> f;          // one column per gamma
    std::vector<double> gammas;
};

WidthCurve width_curve(const std::vector<double>& gammas, const std::vector<double>& omega_t);

struct PacketParams {
    double xbar_t;
    double sigma_t;
};

/// Free-packet replacement rule: xbar - (p/M) s, sigma [1 + 2 w s / M^2].
PacketParams packet_params(const PhysicalParams& params, double sigma, double xbar, double p,
                           double elapsed);

/// sin(x)/x with series switchover near zero.
double sinc(double x);

}  // namespace qbm
