#include "qbm/wigner.hpp"

#include <cmath>
#include <numbers>

#include "qbm/config.hpp"
#include "qbm/io.hpp"
#include "qbm/kernels.hpp"
#include "qbm/parallel.hpp"

namespace qbm {

double WignerGaussian::value(double x, double p) const {
    const double dp = p - k;
    const double dx = x - xbar;
    return std::exp(-dp * dp * sigma / (hbar * hbar) - dx * dx / sigma) /
           (std::numbers::pi * hbar);
}

WignerGaussian gaussian_packet(double xbar, double k, double sigma, double hbar) {
    detail::require_finite(xbar, "xbar");
    detail::require_finite(k, "k");
    detail::require_finite(sigma, "sigma");
    detail::require_finite(hbar, "hbar");
    if (sigma <= 0.0) throw ValidationError("sigma", "must be > 0");
    if (hbar <= 0.0) throw ValidationError("hbar", "must be > 0");
    return WignerGaussian{xbar, k, sigma, hbar};
}

namespace {

std::size_t steps_for_time(double t, double dt) {
    if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
    if (t < 0.0) throw ValidationError("time", "must be >= t_a = 0");
    const double raw = t / dt;
    const auto steps = static_cast<std::size_t>(std::llround(raw));
    if (std::fabs(static_cast<double>(steps) * dt - t) > 1e-9 * std::max(1.0, t))
        throw ValidationError("time", "t must sit on the dt grid");
    return steps;
}

// Endpoint-only transport: split-step evolution of (x, u) plus the running
// integral of grad V; 1-D, no per-step storage.
struct Endpoint {
    double x = 0.0;
    double iv = 0.0;
};

// The grad-V integral uses the same trapezoid weights as the split-step
// momentum kicks, so the query map (x, p) -> (x(t), p - iv) is the exact
// symplectic conjugate of the flow when gamma = 0 and the grid integral of
// the estimate stays normalized at any step size.
Endpoint evolve_endpoint(const PhysicalParams& params, const Potential& pot, double x0, double p0,
                         const double* deta, std::size_t n_steps, double dt) {
    const double invM = 1.0 / params.mass;
    const double c = params.gamma * invM;
    const double hdt = 0.5 * dt;
    const bool friction = params.gamma != 0.0;
    double x = x0, u = p0, iv = 0.0;
    if (pot.linear_force()) {
        const double k = pot.linear_coeff();
        double g = k * x;
        for (std::size_t step = 0; step < n_steps; ++step) {
            iv += hdt * g;
            const double f = friction ? -g - c * (k * u) : -g;
            const double uh = u + hdt * f;
            x = x + dt * (uh * invM) + deta[step] * invM;
            g = k * x;
            iv += hdt * g;
            const double f1 = friction ? -g - c * (k * uh) : -g;
            u = uh + hdt * f1;
        }
        if (!std::isfinite(x) || !std::isfinite(u))
            throw IntegrationError("non-finite state", n_steps);
        return Endpoint{x, iv};
    }
    double grad = pot.grad1(x);
    for (std::size_t step = 0; step < n_steps; ++step) {
        iv += hdt * grad;
        const double f = friction ? -grad - c * (pot.hess1(x) * u) : -grad;
        const double uh = u + hdt * f;
        x = x + dt * (uh * invM) + deta[step] * invM;
        grad = pot.grad1(x);
        iv += hdt * grad;
        const double f1 = friction ? -grad - c * (pot.hess1(x) * uh) : -grad;
        u = uh + hdt * f1;
    }
    if (!std::isfinite(x) || !std::isfinite(u))
        throw IntegrationError("non-finite state", n_steps);
    return Endpoint{x, iv};
}

NoisePath make_path(const SpectrumSpec& noise, const PhysicalParams& params, std::size_t n_steps,
                    double dt, std::uint64_t seed, std::uint64_t stream) {
    if (noise.mode == SpectrumMode::Flat)
        return white_path(params, n_steps, dt, 1, seed, stream);
    return colored_path(noise, n_steps, dt, 1, seed, stream);
}

}  // namespace

WignerEstimate evaluate_transport(const WignerGaussian& w0, double x, double p, double t,
                                  const PhysicalParams& params, const Potential& pot,
                                  const SpectrumSpec& noise, double dt, std::size_t n_samples,
                                  std::uint64_t seed) {
    if (pot.dims() != 1) throw ValidationError("potential", "transport estimator is 1-D");
    if (n_samples < 1) throw ValidationError("n_samples", "must be >= 1");
    const std::size_t n_steps = steps_for_time(t, dt);

    WignerEstimate est;
    est.x = x;
    est.p = p;
    est.t = t;
    est.n_samples = n_samples;
    if (n_steps == 0) {
        est.value = w0.value(x, p);
        est.stderr_ = 0.0;
        return est;
    }
    double sum = 0.0, sum2 = 0.0;
    for (std::uint64_t s = 0; s < n_samples; ++s) {
        const NoisePath path = make_path(noise, params, n_steps, dt, seed, s);
        Endpoint e;
        try {
            e = evolve_endpoint(params, pot, x, p, path.increments.data(), n_steps, dt);
        } catch (const IntegrationError& err) {
            throw IntegrationError(std::string(err.what()) + " (sample " + std::to_string(s) +
                                       " of " + std::to_string(n_samples) + ")",
                                   err.step(), s);
        }
        const double val = w0.value(e.x, p - e.iv);
        sum += val;
        sum2 += val * val;
    }
    const double n = static_cast<double>(n_samples);
    est.value = sum / n;
    est.stderr_ = std::sqrt(std::max(0.0, sum2 / n - est.value * est.value) / n);
    return est;
}

WignerGrid transport_grid(const WignerGaussian& w0, const std::vector<double>& xs,
                          const std::vector<double>& ps, double t, const PhysicalParams& params,
                          const Potential& pot, const SpectrumSpec& noise, double dt,
                          std::size_t n_samples, std::uint64_t seed, int workers) {
    if (pot.dims() != 1) throw ValidationError("potential", "transport estimator is 1-D");
    if (n_samples < 1) throw ValidationError("n_samples", "must be >= 1");
    const std::size_t n_steps = steps_for_time(t, dt);
    const std::size_t nq = xs.size() * ps.size();

    WignerGrid grid;
    grid.x = xs;
    grid.p = ps;
    grid.t = t;
    grid.n_samples = n_samples;
    grid.seed = seed;
    grid.value.assign(nq, 0.0);
    grid.stderr_.assign(nq, 0.0);

    if (n_steps == 0) {
        for (std::size_t ix = 0; ix < xs.size(); ++ix)
            for (std::size_t ip = 0; ip < ps.size(); ++ip)
                grid.value[ix * ps.size() + ip] = w0.value(xs[ix], ps[ip]);
        return grid;
    }

    // parallel over samples, queries inner: one noise path per sample is
    // shared by every query point (common random numbers)
    struct Partial {
        std::vector<double> sum, sum2;
    };
    std::vector<double> sum(nq, 0.0), sum2(nq, 0.0);

    auto produce = [&](std::size_t, std::size_t s0, std::size_t s1) {
        Partial part;
        part.sum.assign(nq, 0.0);
        part.sum2.assign(nq, 0.0);
        for (std::uint64_t s = s0; s < s1; ++s) {
            const NoisePath path = make_path(noise, params, n_steps, dt, seed, s);
            std::size_t q = 0;
            for (std::size_t ix = 0; ix < xs.size(); ++ix) {
                for (std::size_t ip = 0; ip < ps.size(); ++ip, ++q) {
                    const Endpoint e = evolve_endpoint(params, pot, xs[ix], ps[ip],
                                                       path.increments.data(), n_steps, dt);
                    const double val = w0.value(e.x, ps[ip] - e.iv);
                    part.sum[q] += val;
                    part.sum2[q] += val * val;
                }
            }
        }
        return part;
    };
    auto consume = [&](std::size_t, Partial&& part) {
        for (std::size_t q = 0; q < nq; ++q) {
            sum[q] += part.sum[q];
            sum2[q] += part.sum2[q];
        }
    };
    ordered_block_reduce<Partial>(n_samples, 256, workers, produce, consume);

    const double n = static_cast<double>(n_samples);
    for (std::size_t q = 0; q < nq; ++q) {
        const double mean = sum[q] / n;
        grid.value[q] = mean;
        grid.stderr_[q] = std::sqrt(std::max(0.0, sum2[q] / n - mean * mean) / n);
    }
    return grid;
}

InitialSampler sampler_from_packet(const WignerGaussian& w0, std::uint64_t seed) {
    const double sx = std::sqrt(w0.var_x());
    const double sp = std::sqrt(w0.var_p());
    const double xbar = w0.xbar;
    const double k = w0.k;
    return [=](std::uint64_t i) {
        double z[2];
        kernels::fill_gaussian(seed, i, kernels::tags::kInitial, 0, z);
        return make_state1(xbar + sx * z[0], k + sp * z[1]);
    };
}

EnsembleMoments evolve_ensemble_forward(const WignerGaussian& w0, const PhysicalParams& params,
                                        const Potential& pot, const SpectrumSpec& noise,
                                        const IntegratorSpec& spec, std::size_t n_traj,
                                        std::uint64_t seed, int workers) {
    EnsembleOptions opts;
    opts.n_traj = n_traj;
    opts.base_seed = seed;
    opts.workers = workers;
    return run_ensemble(params, pot, sampler_from_packet(w0, seed), noise, spec, opts);
}

std::vector<double> momentum_width(const EnsembleMoments& m) {
    if (m.dims != 1) throw ValidationError("moments", "momentum width reader is 1-D");
    return m.var_p;
}

std::vector<double> oracle_momentum_width(const EnsembleMoments& m, const PhysicalParams& params,
                                          double omega) {
    if (m.dims != 1) throw ValidationError("moments", "momentum width oracle is 1-D");
    const double pref = params.mass * params.mass * omega * omega * omega * omega;
    std::vector<double> out(m.size(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 1; k < m.size(); ++k) {
        acc += 0.5 * m.dt * (m.var_x[k - 1] + m.var_x[k]);
        out[k] = pref * acc;
    }
    return out;
}

void write_wigner_csv(const std::string& path, const WignerGrid& grid,
                      const std::string& convention_tag) {
    CsvWriter csv(path);
    csv.meta({{"t", format_double(grid.t)},
              {"n_samples", std::to_string(grid.n_samples)},
              {"seed", std::to_string(grid.seed)},
              {"convention", convention_tag}});
    csv.header({"x", "p", "value", "stderr"});
    for (std::size_t ix = 0; ix < grid.x.size(); ++ix)
        for (std::size_t ip = 0; ip < grid.p.size(); ++ip) {
            const std::size_t q = ix * grid.p.size() + ip;
            csv.row({grid.x[ix], grid.p[ip], grid.value[q], grid.stderr_[q]});
        }
}

}  // namespace qbm
