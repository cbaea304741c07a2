#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbm/core.hpp"
#include "qbm/langevin.hpp"
#include "qbm/noise.hpp"

namespace qbm {

/// Gaussian phase-space packet W(x,p) = (1/pi hbar) exp[-(p-k)^2 sigma/hbar^2
/// - (x-xbar)^2/sigma]. Normalized and non-negative.
struct WignerGaussian {
    double xbar = 0.0;
    double k = 0.0;
    double sigma = 1.0;
    double hbar = 1.0;

    double value(double x, double p) const;
    double var_x() const { return sigma / 2.0; }
    double var_p() const { return hbar * hbar / (2.0 * sigma); }
};

WignerGaussian gaussian_packet(double xbar, double k, double sigma, double hbar);

struct WignerEstimate {
    double x = 0.0, p = 0.0, t = 0.0;
    double value = 0.0;
    double stderr_ = 0.0;
    std::size_t n_samples = 0;
};

/// Transported-argument estimator: Monte Carlo mean over noise of
/// W0(x(t), p - int grad V dt') with the trajectory started at the query.
/// This is the literal backward-argument transport; the time-direction
/// convention is recorded as "backward-args" in CSV metadata.
WignerEstimate evaluate_transport(const WignerGaussian& w0, double x, double p, double t,
                                  const PhysicalParams& params, const Potential& pot,
                                  const SpectrumSpec& noise, double dt,
                                  std::size_t n_samples, std::uint64_t seed);

struct WignerGrid {
    std::vector<double> x;  // size nx
    std::vector<double> p;  // size np
    std::vector<double> value;    // [ix*np + ip]
    std::vector<double> stderr_;  // same layout
    double t = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Grid evaluation with common random numbers across query points.
WignerGrid transport_grid(const WignerGaussian& w0, const std::vector<double>& xs,
                          const std::vector<double>& ps, double t,
                          const PhysicalParams& params, const Potential& pot,
                          const SpectrumSpec& noise, double dt, std::size_t n_samples,
                          std::uint64_t seed, int workers = 0);

/// Exact sampler of the Gaussian packet for forward ensemble runs.
InitialSampler sampler_from_packet(const WignerGaussian& w0, std::uint64_t seed);

/// Physical forward transport dual: samples from W0 evolved under the
/// Langevin flow, per-step moments with standard errors.
EnsembleMoments evolve_ensemble_forward(const WignerGaussian& w0, const PhysicalParams& params,
                                        const Potential& pot, const SpectrumSpec& noise,
                                        const IntegratorSpec& spec, std::size_t n_traj,
                                        std::uint64_t seed, int workers = 0);

/// Var p(t) series from forward moments (MC ground truth).
std::vector<double> momentum_width(const EnsembleMoments& m);

/// The momentum-spread relation evaluated verbatim, M^2 w^4 * int Var x ds.
/// Diagnostic only; compare against momentum_width.
std::vector<double> oracle_momentum_width(const EnsembleMoments& m, const PhysicalParams& params,
                                          double omega);

void write_wigner_csv(const std::string& path, const WignerGrid& grid,
                      const std::string& convention_tag);

}  // namespace qbm
