#include "qbm/analytic.hpp"

#include <cmath>

namespace qbm {

double sinc(double x) {
    const double ax = std::fabs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

double free_solution(const PhysicalParams& params, double x, double p, double elapsed) {
    return x + (p / params.mass) * elapsed;
}

std::vector<double> free_solution_path(const PhysicalParams& params, double x, double p,
                                       const NoisePath& noise) {
    if (noise.dims != 1) throw ValidationError("noise", "free-solution path is 1-D");
    const double invM = 1.0 / params.mass;
    const std::size_t n = noise.steps();
    std::vector<double> out(n + 1);
    double eta = 0.0;
    out[0] = x;
    for (std::size_t k = 1; k <= n; ++k) {
        eta += noise.increments[k - 1];
        out[k] = x + (p * invM) * (noise.dt * static_cast<double>(k)) + eta * invM;
    }
    return out;
}

double harmonic_orbit(const PhysicalParams& params, double omega, double x_a, double p,
                      double elapsed) {
    if (omega == 0.0) throw ValidationError("omega", "must be nonzero");
    const double g = params.gamma;
    const double M = params.mass;
    const double s = elapsed;
    const double envelope = std::exp(-0.5 * g * omega * omega * s);
    return envelope * (x_a * std::cos(omega * s) +
                       (p / (1.0 + g * omega)) * std::sin(omega * s) / (M * omega));
}

double harmonic_width(const PhysicalParams& params, double omega, double gamma, double elapsed) {
    if (elapsed <= 0.0) return 0.0;
    const double w = params.noise_strength;
    const double M = params.mass;
    const double bracket = 1.0 + sinc(2.0 * omega * elapsed);
    return (w / (2.0 * M * M)) * elapsed * std::exp(-gamma * omega * omega * elapsed) * bracket;
}

double width_shape(double g, double tau) {
    if (tau <= 0.0) return 0.0;
    return tau * std::exp(-g * tau) * (1.0 + sinc(2.0 * tau));
}

WidthCurve width_curve(const std::vector<double>& gammas, const std::vector<double>& omega_t) {
    for (double t : omega_t)
        if (!(t > 0.0)) throw ValidationError("omega_t", "grid must be positive");
    WidthCurve c;
    c.omega_t = omega_t;
    c.gammas = gammas;
    c.f.resize(gammas.size());
    for (std::size_t i = 0; i < gammas.size(); ++i) {
        c.f[i].resize(omega_t.size());
        for (std::size_t j = 0; j < omega_t.size(); ++j)
            c.f[i][j] = width_shape(gammas[i], omega_t[j]);
    }
    return c;
}

PacketParams packet_params(const PhysicalParams& params, double sigma, double xbar, double p,
                           double elapsed) {
    const double M = params.mass;
    return PacketParams{xbar - (p / M) * elapsed,
                        sigma * (1.0 + 2.0 * params.noise_strength * elapsed / (M * M))};
}

}  // namespace qbm
