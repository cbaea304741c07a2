#include "qbm/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "qbm/config.hpp"
#include "qbm/io.hpp"
#include "qbm/kernels.hpp"
#include "qbm/parallel.hpp"

namespace qbm {

void validate_spec(const IntegratorSpec& spec) {
    if (!(spec.dt > 0.0) || !std::isfinite(spec.dt))
        throw ValidationError("dt", "must be > 0");
    if (spec.scheme == Scheme::DirectThirdOrder) {
        if (spec.order_reduction)
            throw ValidationError("order_reduction", "DirectThirdOrder integrates unreduced");
        if (!(spec.runaway_threshold > 0.0) || !std::isfinite(spec.runaway_threshold))
            throw ValidationError("runaway_threshold", "needs a finite positive guard");
    } else if (!spec.order_reduction) {
        throw ValidationError("order_reduction",
                              "EulerMaruyama/SplitStep are defined with order reduction on");
    }
}

namespace {

void check_grid(const NoisePath& noise, const IntegratorSpec& spec, std::size_t dims) {
    if (noise.dims != dims) throw ValidationError("noise", "dimension mismatch");
    if (noise.steps() != spec.n_steps)
        throw ValidationError("noise", "step count does not match the integrator grid");
    if (std::fabs(noise.dt - spec.dt) > 1e-12 * std::max(noise.dt, spec.dt))
        throw ValidationError("noise", "dt does not match the integrator grid");
}

inline void store_state(Trajectory& traj, std::size_t row, std::size_t d, const double* x,
                        const double* u, const double* eta) {
    for (std::size_t i = 0; i < d; ++i) {
        traj.x[row * d + i] = x[i];
        traj.p[row * d + i] = u[i] + eta[i];
    }
}

void splitstep_loop(const PhysicalParams& params, const Potential& pot, const NoisePath& noise,
                    const IntegratorSpec& spec, Trajectory& traj, std::vector<double>& x,
                    std::vector<double>& u, std::vector<double>& eta) {
    const std::size_t d = traj.dims;
    const std::size_t n = spec.n_steps;
    const double dt = spec.dt;
    const double hdt = 0.5 * dt;
    const double invM = 1.0 / params.mass;
    const double c = params.gamma * invM;
    const bool friction = params.gamma != 0.0;

    std::vector<double> grad(d), hess(d * d), hu(d), uh(d), ivacc(d, 0.0);
    pot.gradient(x, grad);
    if (friction) pot.hessian(x, hess);

    store_state(traj, 0, d, x.data(), u.data(), eta.data());
    for (std::size_t step = 0; step < n; ++step) {
        if (traj.has_grad_accum()) {
            for (std::size_t i = 0; i < d; ++i) {
                ivacc[i] += grad[i] * dt;
                traj.grad_v_accum[(step + 1) * d + i] = ivacc[i];
            }
        }
        if (friction) {
            for (std::size_t i = 0; i < d; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += hess[i * d + j] * u[j];
                hu[i] = s;
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            const double f = friction ? -grad[i] - c * hu[i] : -grad[i];
            uh[i] = u[i] + hdt * f;
        }
        const double* de = noise.increments.data() + step * d;
        for (std::size_t i = 0; i < d; ++i) x[i] = x[i] + dt * (uh[i] * invM) + de[i] * invM;
        pot.gradient(x, grad);
        if (friction) {
            pot.hessian(x, hess);
            for (std::size_t i = 0; i < d; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += hess[i * d + j] * uh[j];
                hu[i] = s;
            }
        }
        for (std::size_t i = 0; i < d; ++i) {
            const double f1 = friction ? -grad[i] - c * hu[i] : -grad[i];
            u[i] = uh[i] + hdt * f1;
            eta[i] += de[i];
        }
        for (std::size_t i = 0; i < d; ++i)
            if (!std::isfinite(x[i]) || !std::isfinite(u[i]))
                throw IntegrationError("non-finite state", step + 1);
        store_state(traj, step + 1, d, x.data(), u.data(), eta.data());
    }
}

void euler_loop(const PhysicalParams& params, const Potential& pot, const NoisePath& noise,
                const IntegratorSpec& spec, Trajectory& traj, std::vector<double>& x,
                std::vector<double>& u, std::vector<double>& eta) {
    const std::size_t d = traj.dims;
    const std::size_t n = spec.n_steps;
    const double dt = spec.dt;
    const double invM = 1.0 / params.mass;
    const double c = params.gamma * invM;
    const bool friction = params.gamma != 0.0;

    std::vector<double> grad(d), hess(d * d), hu(d), ivacc(d, 0.0);
    pot.gradient(x, grad);
    if (friction) pot.hessian(x, hess);

    store_state(traj, 0, d, x.data(), u.data(), eta.data());
    for (std::size_t step = 0; step < n; ++step) {
        if (traj.has_grad_accum()) {
            for (std::size_t i = 0; i < d; ++i) {
                ivacc[i] += grad[i] * dt;
                traj.grad_v_accum[(step + 1) * d + i] = ivacc[i];
            }
        }
        if (friction) {
            for (std::size_t i = 0; i < d; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += hess[i * d + j] * u[j];
                hu[i] = s;
            }
        }
        const double* de = noise.increments.data() + step * d;
        for (std::size_t i = 0; i < d; ++i) {
            const double f = friction ? -grad[i] - c * hu[i] : -grad[i];
            x[i] = x[i] + dt * (u[i] * invM) + de[i] * invM;
            u[i] = u[i] + dt * f;
            eta[i] += de[i];
        }
        pot.gradient(x, grad);
        if (friction) pot.hessian(x, hess);
        for (std::size_t i = 0; i < d; ++i)
            if (!std::isfinite(x[i]) || !std::isfinite(u[i]))
                throw IntegrationError("non-finite state", step + 1);
        store_state(traj, step + 1, d, x.data(), u.data(), eta.data());
    }
}

// Unreduced third-order dynamics; exists to demonstrate the runaway family.
void direct3_loop(const PhysicalParams& params, const Potential& pot, const NoisePath& noise,
                  const IntegratorSpec& spec, Trajectory& traj, std::vector<double>& x,
                  std::vector<double>& p0) {
    const std::size_t d = traj.dims;
    const std::size_t n = spec.n_steps;
    const double dt = spec.dt;
    const double M = params.mass;
    if (params.gamma <= 0.0)
        throw ValidationError("gamma", "DirectThirdOrder requires gamma > 0");
    const double mg = M * params.gamma;

    std::vector<double> grad(d), v(d), a(d), ivacc(d, 0.0);
    pot.gradient(x, grad);
    for (std::size_t i = 0; i < d; ++i) {
        a[i] = -grad[i] / M;
        v[i] = p0[i] / M + params.gamma * a[i];
    }

    auto store = [&](std::size_t row) {
        for (std::size_t i = 0; i < d; ++i) {
            traj.x[row * d + i] = x[i];
            traj.p[row * d + i] = M * v[i];
        }
    };
    store(0);
    for (std::size_t step = 0; step < n; ++step) {
        if (traj.has_grad_accum()) {
            for (std::size_t i = 0; i < d; ++i) {
                ivacc[i] += grad[i] * dt;
                traj.grad_v_accum[(step + 1) * d + i] = ivacc[i];
            }
        }
        const double* de = noise.increments.data() + step * d;
        for (std::size_t i = 0; i < d; ++i) {
            x[i] += v[i] * dt;
            v[i] += a[i] * dt;
            a[i] += ((M * a[i] + grad[i]) * dt - de[i]) / mg;
        }
        pot.gradient(x, grad);
        for (std::size_t i = 0; i < d; ++i) {
            if (!std::isfinite(x[i]) || !std::isfinite(a[i]))
                throw IntegrationError("non-finite state", step + 1);
            if (std::fabs(a[i]) > spec.runaway_threshold)
                throw IntegrationError("runaway detected", step + 1);
        }
        store(step + 1);
    }
}

}  // namespace

Trajectory integrate(const PhysicalParams& params, const Potential& pot,
                     const PhaseState& initial, const NoisePath& noise,
                     const IntegratorSpec& spec) {
    validate_spec(spec);
    const std::size_t d = pot.dims();
    if (initial.x.size() != d || initial.p.size() != d)
        throw ValidationError("initial", "dimension mismatch with potential");
    for (double v : initial.x) detail::require_finite(v, "initial.x");
    for (double v : initial.p) detail::require_finite(v, "initial.p");
    check_grid(noise, spec, d);

    Trajectory traj;
    traj.t0 = noise.t0;
    traj.dt = spec.dt;
    traj.dims = d;
    traj.x.resize((spec.n_steps + 1) * d);
    traj.p.resize((spec.n_steps + 1) * d);
    if (spec.record_grad_v) traj.grad_v_accum.assign((spec.n_steps + 1) * d, 0.0);

    std::vector<double> x = initial.x;
    std::vector<double> u = initial.p;
    std::vector<double> eta(d, 0.0);

    switch (spec.scheme) {
        case Scheme::SplitStep:
            splitstep_loop(params, pot, noise, spec, traj, x, u, eta);
            break;
        case Scheme::EulerMaruyama:
            euler_loop(params, pot, noise, spec, traj, x, u, eta);
            break;
        case Scheme::DirectThirdOrder:
            direct3_loop(params, pot, noise, spec, traj, x, u);
            break;
    }
    return traj;
}

InitialSampler fixed_initial(PhaseState s) {
    return [s](std::uint64_t) { return s; };
}

namespace {

struct BlockPartial {
    std::vector<double> sums;  // 7 arrays of rows*d: x, x2, x3, x4, p, p2, xp
    std::vector<std::size_t> failed;
    std::vector<Trajectory> retained;
    std::size_t n_ok = 0;
};

kernels::MomentSums sums_view(std::vector<double>& s, std::size_t len) {
    return kernels::MomentSums{s.data(),           s.data() + len,     s.data() + 2 * len,
                               s.data() + 3 * len, s.data() + 4 * len, s.data() + 5 * len,
                               s.data() + 6 * len};
}

}  // namespace

EnsembleMoments run_ensemble(const PhysicalParams& params, const Potential& pot,
                             const InitialSampler& initial, const SpectrumSpec& noise,
                             const IntegratorSpec& spec, const EnsembleOptions& opts,
                             std::vector<Trajectory>* retained_out) {
    validate_spec(spec);
    if (opts.n_traj < 1) throw ValidationError("n_traj", "must be >= 1");
    const std::size_t d = pot.dims();
    const std::size_t rows = spec.n_steps + 1;
    const std::size_t len = rows * d;

    const bool white = noise.mode == SpectrumMode::Flat;
    const bool fast = white && d == 1 && pot.linear_force() &&
                      spec.scheme == Scheme::SplitStep && opts.retain == 0;
    const double w = params.noise_strength;
    const double noise_scale = std::sqrt(w * spec.dt);

    std::vector<double> total(7 * len, 0.0);
    std::vector<std::size_t> failed;
    std::vector<Trajectory> retained;
    std::size_t n_ok = 0;

    constexpr std::size_t kBlock = 64;

    auto run_generic = [&](std::uint64_t t, BlockPartial& part) {
        PhaseState init = initial(t);
        NoisePath path =
            white ? white_path(params, spec.n_steps, spec.dt, d, opts.base_seed, t)
                  : colored_path(noise, spec.n_steps, spec.dt, d, opts.base_seed, t);
        try {
            Trajectory traj = integrate(params, pot, init, path, spec);
            if (t < opts.retain) part.retained.push_back(traj);
            if (d == 1) {
                auto sv = sums_view(part.sums, len);
                kernels::accumulate_moments(traj.x.data(), traj.p.data(), rows, sv);
            } else {
                std::vector<double> xi(rows), pi(rows);
                for (std::size_t i = 0; i < d; ++i) {
                    for (std::size_t k = 0; k < rows; ++k) {
                        xi[k] = traj.x[k * d + i];
                        pi[k] = traj.p[k * d + i];
                    }
                    // per-dimension views interleave as [k*d+i]; accumulate into
                    // strided slices via a contiguous staging pass
                    std::vector<double> stage(7 * rows, 0.0);
                    auto sv = sums_view(stage, rows);
                    kernels::accumulate_moments(xi.data(), pi.data(), rows, sv);
                    for (std::size_t j = 0; j < 7; ++j)
                        for (std::size_t k = 0; k < rows; ++k)
                            part.sums[j * len + k * d + i] += stage[j * rows + k];
                }
            }
            ++part.n_ok;
        } catch (const IntegrationError& e) {
            if (opts.fail_fast)
                throw IntegrationError(std::string(e.what()) + " (trajectory " +
                                           std::to_string(t) + ")",
                                       e.step(), t);
            part.failed.push_back(t);
        }
    };

    auto produce = [&](std::size_t, std::size_t i0, std::size_t i1) {
        BlockPartial part;
        part.sums.assign(7 * len, 0.0);
        std::uint64_t t = i0;
        if (fast) {
            const double k = pot.linear_coeff();
            std::vector<double> deta(spec.n_steps * 4);
            std::vector<double> lane_z(spec.n_steps);
            std::vector<double> xs(rows * 4), ps(rows * 4);
            for (; t + 4 <= i1; t += 4) {
                kernels::BatchState s{};
                bool lane_ok = true;
                for (std::size_t lane = 0; lane < 4; ++lane) {
                    PhaseState init = initial(t + lane);
                    if (init.x.size() != 1) throw ValidationError("initial", "dimension mismatch");
                    s.x[lane] = init.x[0];
                    s.u[lane] = init.p[0];
                    s.eta[lane] = 0.0;
                    if (w > 0.0) {
                        kernels::fill_gaussian(opts.base_seed, t + lane, kernels::tags::kWhite, 0,
                                               lane_z);
                        for (std::size_t st = 0; st < spec.n_steps; ++st)
                            deta[st * 4 + lane] = lane_z[st] * noise_scale;
                    } else {
                        for (std::size_t st = 0; st < spec.n_steps; ++st) deta[st * 4 + lane] = 0.0;
                    }
                }
                kernels::batch_splitstep_linear(s, k, params.mass, params.gamma, spec.dt,
                                                spec.n_steps, deta.data(), xs.data(), ps.data());
                for (std::size_t lane = 0; lane < 4; ++lane)
                    if (!std::isfinite(s.x[lane]) || !std::isfinite(s.u[lane])) lane_ok = false;
                if (!lane_ok) {
                    // rare: fall back to per-trajectory integration for exact error reporting
                    for (std::size_t lane = 0; lane < 4; ++lane) run_generic(t + lane, part);
                    continue;
                }
                std::vector<double> lx(rows), lp(rows);
                for (std::size_t lane = 0; lane < 4; ++lane) {
                    for (std::size_t r = 0; r < rows; ++r) {
                        lx[r] = xs[r * 4 + lane];
                        lp[r] = ps[r * 4 + lane];
                    }
                    auto sv = sums_view(part.sums, len);
                    kernels::accumulate_moments(lx.data(), lp.data(), rows, sv);
                    ++part.n_ok;
                }
            }
        }
        for (; t < i1; ++t) run_generic(t, part);
        return part;
    };

    auto consume = [&](std::size_t, BlockPartial&& part) {
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += part.sums[i];
        failed.insert(failed.end(), part.failed.begin(), part.failed.end());
        for (auto& tr : part.retained) retained.push_back(std::move(tr));
        n_ok += part.n_ok;
    };

    ordered_block_reduce<BlockPartial>(opts.n_traj, kBlock, opts.workers, produce, consume);

    if (n_ok == 0) throw IntegrationError("all trajectories failed", 0);

    EnsembleMoments m;
    m.t0 = 0.0;
    m.dt = spec.dt;
    m.dims = d;
    m.n_traj = n_ok;
    m.failed = std::move(failed);
    m.mean_x.resize(len);
    m.mean_p.resize(len);
    m.var_x.resize(len);
    m.var_p.resize(len);
    m.cov_xp.resize(len);
    m.se_mean_x.resize(len);
    m.se_var_x.resize(len);
    const double n = static_cast<double>(n_ok);
    for (std::size_t i = 0; i < len; ++i) {
        const double sx = total[i];
        const double sx2 = total[len + i];
        const double sx3 = total[2 * len + i];
        const double sx4 = total[3 * len + i];
        const double sp = total[4 * len + i];
        const double sp2 = total[5 * len + i];
        const double sxp = total[6 * len + i];
        const double mx = sx / n;
        const double mp = sp / n;
        const double vx = std::max(0.0, sx2 / n - mx * mx);
        const double vp = std::max(0.0, sp2 / n - mp * mp);
        const double m4 =
            std::max(0.0, (sx4 - 4.0 * mx * sx3 + 6.0 * mx * mx * sx2) / n - 3.0 * mx * mx * mx * mx);
        m.mean_x[i] = mx;
        m.mean_p[i] = mp;
        m.var_x[i] = vx;
        m.var_p[i] = vp;
        m.cov_xp[i] = sxp / n - mx * mp;
        m.se_mean_x[i] = std::sqrt(vx / n);
        m.se_var_x[i] = std::sqrt(std::max(0.0, m4 - vx * vx) / n);
    }
    if (retained_out) *retained_out = std::move(retained);
    return m;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::pair<std::string, std::string>>& meta) {
    CsvWriter csv(path);
    auto kv = meta;
    kv.emplace_back("dt", format_double(traj.dt));
    kv.emplace_back("dims", std::to_string(traj.dims));
    csv.meta(kv);
    std::vector<std::string> cols = {"t"};
    const std::size_t d = traj.dims;
    for (std::size_t i = 1; i <= d; ++i) cols.push_back("x_" + std::to_string(i));
    for (std::size_t i = 1; i <= d; ++i) cols.push_back("p_" + std::to_string(i));
    for (std::size_t i = 1; i <= d; ++i) cols.push_back("intgradv_" + std::to_string(i));
    csv.header(cols);
    const bool acc = traj.has_grad_accum();
    std::vector<double> row(1 + 3 * d);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        row[0] = traj.time_at(k);
        for (std::size_t i = 0; i < d; ++i) {
            row[1 + i] = traj.x[k * d + i];
            row[1 + d + i] = traj.p[k * d + i];
            row[1 + 2 * d + i] = acc ? traj.grad_v_accum[k * d + i] : 0.0;
        }
        csv.row(row);
    }
}

void write_moments_csv(const std::string& path, const EnsembleMoments& m,
                       const std::vector<std::pair<std::string, std::string>>& meta) {
    CsvWriter csv(path);
    auto kv = meta;
    kv.emplace_back("dt", format_double(m.dt));
    kv.emplace_back("n_traj", std::to_string(m.n_traj));
    csv.meta(kv);
    const std::size_t d = m.dims;
    std::vector<std::string> cols = {"t"};
    auto push = [&](const std::string& base) {
        if (d == 1) {
            cols.push_back(base);
        } else {
            for (std::size_t i = 1; i <= d; ++i) cols.push_back(base + "_" + std::to_string(i));
        }
    };
    push("mean_x");
    push("mean_p");
    push("var_x");
    push("var_p");
    push("cov_xp");
    push("se_var_x");
    csv.header(cols);
    std::vector<double> row(1 + 6 * d);
    for (std::size_t k = 0; k < m.size(); ++k) {
        row[0] = m.time_at(k);
        for (std::size_t i = 0; i < d; ++i) {
            row[1 + 0 * d + i] = m.mean_x[k * d + i];
            row[1 + 1 * d + i] = m.mean_p[k * d + i];
            row[1 + 2 * d + i] = m.var_x[k * d + i];
            row[1 + 3 * d + i] = m.var_p[k * d + i];
            row[1 + 4 * d + i] = m.cov_xp[k * d + i];
            row[1 + 5 * d + i] = m.se_var_x[k * d + i];
        }
        csv.row(row);
    }
}

}  // namespace qbm
