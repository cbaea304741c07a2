// qbmsim - command-line front end for the thermal photon-bath Langevin toolkit.
//
// Subcommands: simulate, width, wigner, noise, semiclassical.
// Exit codes: 0 success, 2 configuration/validation error, 3 integration error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qbm/analytic.hpp"
#include "qbm/config.hpp"
#include "qbm/greenfn.hpp"
#include "qbm/io.hpp"
#include "qbm/langevin.hpp"
#include "qbm/noise.hpp"
#include "qbm/wigner.hpp"

using namespace qbm;

namespace {

struct Common {
    std::string config_path;
    std::string out = "out.csv";
    std::uint64_t seed = 0;
    int workers = 0;
};

Config load_config(const Common& c) {
    if (c.config_path.empty()) throw ValidationError("config", "missing --config");
    return Config::load(c.config_path);
}

Scheme scheme_from(const Config& cfg) {
    const std::string s = cfg.get_string("scheme", "splitstep");
    if (s == "splitstep") return Scheme::SplitStep;
    if (s == "euler") return Scheme::EulerMaruyama;
    if (s == "direct3") return Scheme::DirectThirdOrder;
    throw ValidationError("scheme", "unknown scheme: " + s);
}

SpectrumSpec noise_from(const Config& cfg, const PhysicalParams& params) {
    SpectrumSpec spec;
    spec.params = params;
    const std::string mode = cfg.get_string("noise.mode", "white");
    if (mode == "white") {
        spec.mode = SpectrumMode::Flat;
    } else if (mode == "truncated") {
        spec.mode = SpectrumMode::Truncated;
        spec.order = static_cast<int>(cfg.get_size("noise.order", 1));
    } else if (mode == "coth") {
        spec.mode = SpectrumMode::FullCoth;
    } else {
        throw ValidationError("noise.mode", "unknown mode: " + mode);
    }
    spec.cutoff = cfg.get_double("noise.cutoff", 0.0);
    return spec;
}

std::vector<double> parse_list(const std::string& s, const std::string& field) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        const std::string tok = s.substr(pos, next - pos);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw ValidationError(field, "not a number: " + tok);
        out.push_back(v);
        pos = next + 1;
    }
    if (out.empty()) throw ValidationError(field, "empty list");
    return out;
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t next = s.find(',', pos);
        if (next == std::string::npos) next = s.size();
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

PhaseState initial_from(const Config& cfg, std::size_t dims) {
    auto xs = cfg.has("x0") ? parse_list(cfg.get_string("x0"), "x0")
                            : std::vector<double>(dims, 0.0);
    auto ps = cfg.has("p0") ? parse_list(cfg.get_string("p0"), "p0")
                            : std::vector<double>(dims, 0.0);
    if (xs.size() != dims) throw ValidationError("x0", "dimension mismatch");
    if (ps.size() != dims) throw ValidationError("p0", "dimension mismatch");
    return make_state(std::move(xs), std::move(ps));
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos || dot == 0) return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Common& c) {
    const auto t_start = std::chrono::steady_clock::now();
    const Config cfg = load_config(c);
    const auto params = params_from_config(cfg);
    const auto pot = potential_from_config(cfg, params);
    const std::size_t dims = pot.dims();

    IntegratorSpec spec;
    spec.scheme = scheme_from(cfg);
    if (spec.scheme == Scheme::DirectThirdOrder) {
        spec.order_reduction = false;
        spec.runaway_threshold = cfg.get_double("runaway_threshold", 1e8);
    }
    spec.dt = cfg.get_double("dt", 1e-3);
    const double t_max = cfg.get_double("t_max", 1.0);
    spec.n_steps = static_cast<std::size_t>(std::llround(t_max / spec.dt));
    if (spec.n_steps < 1) throw ValidationError("t_max", "needs at least one step");

    const auto noise = noise_from(cfg, params);
    const std::size_t n_traj = cfg.get_size("n_traj", 1);
    const auto initial = initial_from(cfg, dims);

    std::vector<std::pair<std::string, std::string>> meta = {
        {"seed", std::to_string(c.seed)},
        {"scheme", cfg.get_string("scheme", "splitstep")},
        {"noise", cfg.get_string("noise.mode", "white")}};

    if (n_traj == 1) {
        const NoisePath path =
            noise.mode == SpectrumMode::Flat
                ? white_path(params, spec.n_steps, spec.dt, dims, c.seed, 0)
                : colored_path(noise, spec.n_steps, spec.dt, dims, c.seed, 0);
        const auto traj = integrate(params, pot, initial, path, spec);
        write_trajectory_csv(c.out, traj, meta);
        const std::size_t last = traj.size() - 1;
        std::printf("final_x=%s\n", format_double(traj.x[last * dims]).c_str());
        std::printf("final_p=%s\n", format_double(traj.p[last * dims]).c_str());
    } else {
        EnsembleOptions opts;
        opts.n_traj = n_traj;
        opts.base_seed = c.seed;
        opts.workers = c.workers;
        opts.fail_fast = cfg.get_size("fail_fast", 1) != 0;
        const auto m = run_ensemble(params, pot, fixed_initial(initial), noise, spec, opts);
        write_moments_csv(c.out, m, meta);
        const std::size_t last = m.size() - 1;
        std::printf("final_mean_x=%s\n", format_double(m.mean_x[last * dims]).c_str());
        std::printf("final_var_x=%s\n", format_double(m.var_x[last * dims]).c_str());
        std::printf("final_var_p=%s\n", format_double(m.var_p[last * dims]).c_str());
        std::printf("trajectories=%zu\n", m.n_traj);
        std::printf("failed=%zu\n", m.failed.size());
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        std::fprintf(stderr, "wall_seconds=%.3f traj_per_sec=%.0f\n", secs,
                     static_cast<double>(m.n_traj) / secs);
    }
    return 0;
}

int cmd_width(const Common& c, const std::string& gammas_arg, double tmax, std::size_t points,
              bool with_mc) {
    if (!(tmax > 0.0)) throw ValidationError("tmax", "must be > 0");
    if (points < 2) throw ValidationError("points", "need at least 2 grid points");
    const auto tokens = split_tokens(gammas_arg);
    if (tokens.empty()) throw ValidationError("gammas", "empty list");
    std::vector<double> gammas;
    for (const auto& tok : tokens) gammas.push_back(parse_list(tok, "gammas")[0]);

    std::vector<double> taus(points);
    for (std::size_t j = 0; j < points; ++j)
        taus[j] = tmax * static_cast<double>(j + 1) / static_cast<double>(points);
    const auto curve = width_curve(gammas, taus);

    // optional Monte Carlo overlay from the semiclassical pipeline; the
    // gamma = 0 column has no realization (w = 2 M gamma kB T vanishes)
    std::vector<std::vector<double>> mc_f, mc_se;
    std::vector<bool> has_mc(gammas.size(), false);
    if (with_mc) {
        const Config cfg = load_config(c);
        const auto base = params_from_config(cfg);
        const double omega = cfg.get_double("potential.omega", 1.0);
        const double dt = cfg.get_double("dt", 1e-3);
        const std::size_t n_traj = cfg.get_size("n_traj", 10000);
        mc_f.resize(gammas.size());
        mc_se.resize(gammas.size());
        for (std::size_t i = 0; i < gammas.size(); ++i) {
            const double g = gammas[i];
            if (g <= 0.0) continue;
            const double gamma_phys = g / omega;
            // any strength works, the shape divides w out; aim at w = 1
            const double temperature = 1.0 / (2.0 * base.mass * gamma_phys * base.kb);
            const auto p = make_params(base.mass, gamma_phys, temperature, base.hbar, base.kb);
            const auto n_steps =
                static_cast<std::size_t>(std::llround(tmax / omega / dt));
            const auto mc = composite_width_mc(p, omega, 1.0, 0.0, dt, n_steps,
                                               n_traj, c.seed + i, c.workers);
            const double to_f = 2.0 * p.mass * p.mass * omega / p.noise_strength;
            mc_f[i].resize(points);
            mc_se[i].resize(points);
            for (std::size_t j = 0; j < points; ++j) {
                const auto k = static_cast<std::size_t>(
                    std::llround(taus[j] / omega / dt));
                mc_f[i][j] = mc.var_x[std::min(k, mc.var_x.size() - 1)] * to_f;
                mc_se[i][j] = mc.se_var_x[std::min(k, mc.se_var_x.size() - 1)] * to_f;
            }
            has_mc[i] = true;
        }
    }

    CsvWriter csv(c.out);
    std::vector<std::pair<std::string, std::string>> meta = {
        {"seed", std::to_string(c.seed)}, {"tmax", format_double(tmax)}};
    if (with_mc) meta.emplace_back("mc", "1");
    csv.meta(meta);
    std::vector<std::string> cols = {"omega_t"};
    for (const auto& tok : tokens) cols.push_back("f_gamma_" + tok);
    for (std::size_t i = 0; i < tokens.size(); ++i)
        if (has_mc[i]) {
            cols.push_back("mc_f_gamma_" + tokens[i]);
            cols.push_back("mc_se_f_gamma_" + tokens[i]);
        }
    csv.header(cols);
    std::vector<double> row;
    for (std::size_t j = 0; j < points; ++j) {
        row.clear();
        row.push_back(taus[j]);
        for (std::size_t i = 0; i < gammas.size(); ++i) row.push_back(curve.f[i][j]);
        for (std::size_t i = 0; i < gammas.size(); ++i)
            if (has_mc[i]) {
                row.push_back(mc_f[i][j]);
                row.push_back(mc_se[i][j]);
            }
        csv.row(row);
    }
    return 0;
}

int cmd_wigner(const Common& c, const std::string& grid_arg, double time, std::size_t samples,
               double window) {
    const Config cfg = load_config(c);
    const auto params = params_from_config(cfg);
    const auto pot = potential_from_config(cfg, params);
    if (pot.dims() != 1) throw ValidationError("dims", "wigner transport is 1-D");
    const auto noise = noise_from(cfg, params);
    const double dt = cfg.get_double("dt", 1e-3);

    const auto w0 = gaussian_packet(cfg.get_double("packet.xbar", 0.0),
                                    cfg.get_double("packet.k", 0.0),
                                    cfg.get_double("packet.sigma", 1.0), params.hbar);

    std::size_t nx = 0, np = 0;
    {
        const auto xpos = grid_arg.find('x');
        if (xpos == std::string::npos) throw ValidationError("grid", "expected NXxNP");
        nx = std::strtoull(grid_arg.substr(0, xpos).c_str(), nullptr, 10);
        np = std::strtoull(grid_arg.substr(xpos + 1).c_str(), nullptr, 10);
        if (nx < 2 || np < 2) throw ValidationError("grid", "grid must be at least 2x2");
    }

    // window: packet widths inflated by free-particle spreading and drift
    const double M = params.mass;
    const double sig_t = w0.sigma * (1.0 + 2.0 * params.noise_strength * time / (M * M));
    const double sx = std::sqrt(0.5 * sig_t + w0.var_p() * time * time / (M * M));
    const double sp = std::sqrt(w0.var_p() + params.noise_strength * time);
    std::vector<double> xs(nx), ps(np);
    for (std::size_t i = 0; i < nx; ++i)
        xs[i] = w0.xbar - window * sx +
                2.0 * window * sx * static_cast<double>(i) / static_cast<double>(nx - 1);
    for (std::size_t i = 0; i < np; ++i)
        ps[i] = w0.k - window * sp +
                2.0 * window * sp * static_cast<double>(i) / static_cast<double>(np - 1);

    const auto grid =
        transport_grid(w0, xs, ps, time, params, pot, noise, dt, samples, c.seed, c.workers);
    write_wigner_csv(c.out, grid, "backward-args");
    std::printf("grid=%zux%zu samples=%zu\n", nx, np, samples);
    return 0;
}

int cmd_noise(const Common& c, const std::string& spec_arg, std::size_t n, double dt_arg) {
    PhysicalParams params = make_params(1.0, 0.5, 1.0, 1.0, 1.0);  // w = 1 default bath
    double dt = dt_arg;
    if (!c.config_path.empty()) {
        const Config cfg = Config::load(c.config_path);
        params = params_from_config(cfg);
        dt = cfg.get_double("dt", dt_arg);
    }

    SpectrumSpec spec;
    spec.params = params;
    if (spec_arg == "white") {
        spec.mode = SpectrumMode::Flat;
    } else if (spec_arg.rfind("truncated", 0) == 0) {
        spec.mode = SpectrumMode::Truncated;
        const auto colon = spec_arg.find(':');
        spec.order = colon == std::string::npos
                         ? 1
                         : static_cast<int>(std::strtol(spec_arg.c_str() + colon + 1, nullptr, 10));
    } else if (spec_arg == "coth") {
        spec.mode = SpectrumMode::FullCoth;
    } else {
        throw ValidationError("spec", "expected white, truncated[:m] or coth");
    }

    const auto path = spec.mode == SpectrumMode::Flat
                          ? white_path(params, n, dt, 1, c.seed, 0)
                          : colored_path(spec, n, dt, 1, c.seed, 0);
    write_noise_csv(c.out, path);

    // band-averaged periodogram against the model spectrum
    std::size_t seg = 256;
    while (seg * 8 <= n && seg < 16384) seg *= 2;
    const auto pg = welch_spectrum(path.increments, dt, seg);
    const std::size_t n_bands = 32;
    const std::size_t per_band = (pg.omega.size() - 1) / n_bands;

    CsvWriter csv(with_suffix(c.out, "_spectrum"));
    csv.meta({{"seed", std::to_string(c.seed)},
              {"n", std::to_string(n)},
              {"dt", format_double(dt)},
              {"spec", spec_arg}});
    csv.header({"omega", "s_emp", "s_model"});
    for (std::size_t b = 0; b < n_bands && per_band > 0; ++b) {
        double om = 0.0, emp = 0.0, model = 0.0;
        for (std::size_t j = 1 + b * per_band; j < 1 + (b + 1) * per_band; ++j) {
            om += pg.omega[j];
            emp += pg.power[j];
            model += spec.mode == SpectrumMode::Flat ? params.noise_strength
                                                     : spectrum(spec, pg.omega[j]);
        }
        const double inv = 1.0 / static_cast<double>(per_band);
        csv.row({om * inv, emp * inv, model * inv});
    }
    return 0;
}

int cmd_semiclassical(const Common& c, double tmax_arg) {
    const Config cfg = load_config(c);
    const auto params = params_from_config(cfg);
    const auto pot = potential_from_config(cfg, params);
    if (pot.dims() != 1) throw ValidationError("dims", "semiclassical pipeline is 1-D");

    const double dt = cfg.get_double("dt", 1e-3);
    const double tmax = tmax_arg > 0.0 ? tmax_arg : cfg.get_double("t_max", 10.0);
    const auto n_steps = static_cast<std::size_t>(std::llround(tmax / dt));
    const double x0 = cfg.get_double("x0", 1.0);
    const double p0 = cfg.get_double("p0", 0.0);

    const auto orbit = solve_classical(params, pot, x0, p0, 0.0, dt, n_steps);
    const auto green = build_green(orbit.track);
    const auto diss = compute_B(green, orbit, params, cfg.get_double("c1", 0.0),
                                cfg.get_double("c2", 0.0));
    const auto path = white_path(params, n_steps, dt, 1, c.seed, 0);
    const auto q = compute_Q(green, path, params);

    const std::vector<std::pair<std::string, std::string>> meta = {
        {"seed", std::to_string(c.seed)}, {"dt", format_double(dt)}};

    {
        CsvWriter csv(with_suffix(c.out, "_orbit"));
        csv.meta(meta);
        csv.header({"t", "xcl", "vcl", "omega2"});
        for (std::size_t k = 0; k < orbit.size(); ++k)
            csv.row({orbit.time_at(k), orbit.x[k], orbit.v[k], orbit.track.omega2[k]});
    }
    {
        CsvWriter csv(with_suffix(c.out, "_green"));
        csv.meta(meta);
        csv.header({"t", "xi1", "xi2", "wronskian"});
        for (std::size_t k = 0; k < green.size(); ++k)
            csv.row({green.time_at(k), green.xi1[k], green.xi2[k], green.wronskian(k)});
    }
    {
        CsvWriter csv(with_suffix(c.out, "_qb"));
        csv.meta(meta);
        csv.header({"t", "A", "B_masked", "Q"});
        for (std::size_t k = 0; k < green.size(); ++k)
            csv.row({green.time_at(k), diss.A[k], diss.B[k], q[k]});
    }

    // growth-rate report
    try {
        const auto rate = growth_rate(green);
        std::printf("growth_rate=%s\n", format_double(rate.lambda).c_str());
        std::printf("growth_rate_stderr=%s\n", format_double(rate.stderr_).c_str());
    } catch (const ValidationError& e) {
        std::printf("growth_rate=unavailable (%s)\n", e.what());
    }

    // composite solution vs direct SDE on the same noise path
    IntegratorSpec ispec;
    ispec.scheme = Scheme::SplitStep;
    ispec.dt = dt;
    ispec.n_steps = n_steps;
    const auto traj = integrate(params, pot, make_state1(x0, p0), path, ispec);

    std::vector<double> comp;
    if (pot.linear_force() && pot.linear_coeff() > 0.0) {
        const double omega = std::sqrt(pot.linear_coeff() / params.mass);
        const auto secular = compute_B(green, orbit, params, 0.5 * omega * omega, 0.0);
        comp = composite_solution(orbit, secular, q, params, 1.0);
        std::printf("composite_b=secular\n");
    } else {
        comp = composite_solution(orbit, diss, q, params, 1.0);
        std::printf("composite_b=retarded\n");
    }
    double amp = 0.0;
    for (double v : orbit.x) amp = std::max(amp, std::fabs(v));
    double rms = 0.0;
    for (std::size_t k = 0; k < comp.size(); ++k)
        rms += (comp[k] - traj.x[k]) * (comp[k] - traj.x[k]);
    rms = std::sqrt(rms / static_cast<double>(comp.size()));
    std::printf("composite_vs_sde_rms_relative=%s\n",
                format_double(amp > 0.0 ? rms / amp : rms).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Langevin and Wigner-function toolkit for a particle in a thermal photon bath"};
    app.require_subcommand(1);
    app.fallthrough();  // common options may follow the subcommand

    Common common;
    app.add_option("--config", common.config_path, "key=value configuration file");
    app.add_option("--seed", common.seed, "base RNG seed");
    app.add_option("--workers", common.workers, "worker threads (0 = hardware)");
    app.add_option("--out", common.out, "output CSV path");

    auto* sim = app.add_subcommand("simulate", "trajectory or ensemble run");

    auto* width = app.add_subcommand("width", "fluctuation-width curves f_gamma(omega t)");
    std::string gammas = "0,0.02,0.05";
    double tmax = 30.0;
    std::size_t points = 600;
    bool with_mc = false;
    width->add_option("--gammas", gammas, "comma list of gamma*omega values");
    width->add_option("--tmax", tmax, "maximum omega*t");
    width->add_option("--points", points, "grid points");
    width->add_flag("--mc", with_mc, "append Monte Carlo overlay columns");

    auto* wig = app.add_subcommand("wigner", "transported Wigner function on a grid");
    std::string grid = "41x41";
    double wtime = 1.0;
    std::size_t samples = 10000;
    double window = 6.0;
    wig->add_option("--grid", grid, "grid as NXxNP");
    wig->add_option("--time", wtime, "evaluation time");
    wig->add_option("--samples", samples, "noise samples per grid point");
    wig->add_option("--window", window, "half-width in packet widths");

    auto* noise_cmd = app.add_subcommand("noise", "noise path and periodogram");
    std::string spec_arg = "white";
    std::size_t n_samples = 65536;
    double dt_arg = 0.01;
    noise_cmd->add_option("--spec", spec_arg, "white | truncated[:m] | coth");
    noise_cmd->add_option("--n", n_samples, "number of increments");
    noise_cmd->add_option("--dt", dt_arg, "time step (overridden by config)");

    auto* semi = app.add_subcommand("semiclassical", "orbit, Green function, Q/B pipeline");
    double semi_tmax = 0.0;
    semi->add_option("--tmax", semi_tmax, "override config t_max");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(common);
        if (width->parsed()) return cmd_width(common, gammas, tmax, points, with_mc);
        if (wig->parsed()) return cmd_wigner(common, grid, wtime, samples, window);
        if (noise_cmd->parsed()) return cmd_noise(common, spec_arg, n_samples, dt_arg);
        if (semi->parsed()) return cmd_semiclassical(common, semi_tmax);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.field().c_str(),
                     e.what() + e.field().size() + 2);
        return 2;
    } catch (const IntegrationError& e) {
        std::fprintf(stderr, "error: integration: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", e.what());
        return 1;
    }
    return 0;
}
