#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qbm/core.hpp"
#include "qbm/noise.hpp"

namespace qbm {

enum class Scheme { EulerMaruyama, SplitStep, DirectThirdOrder };

struct IntegratorSpec {
    Scheme scheme = Scheme::SplitStep;
    double dt = 1e-3;
    std::size_t n_steps = 0;
    bool order_reduction = true;       // required on for EulerMaruyama/SplitStep
    double runaway_threshold = 1e8;    // |acceleration| guard, DirectThirdOrder only
    bool record_grad_v = true;
};

void validate_spec(const IntegratorSpec& spec);

/// Integrates the order-reduced equation of motion driven by a noise path.
/// State (x, u): du = [-grad V(x) - (gamma/M) Hess V(x) u] dt, dx = (u/M) dt + deta/M.
/// The reported momentum is p = u + eta(t), so dp = f dt + deta and, for the
/// free particle, x(t) = x + (p0/M)(t - t0) + eta(t)/M exactly.
/// DirectThirdOrder integrates the unreduced third-order equation with a
/// runaway guard and exists to demonstrate the runaway family.
Trajectory integrate(const PhysicalParams& params, const Potential& pot,
                     const PhaseState& initial, const NoisePath& noise,
                     const IntegratorSpec& spec);

/// Per-step ensemble statistics (per dimension, layout [k*dims + i]).
struct EnsembleMoments {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t dims = 1;
    std::size_t n_traj = 0;
    std::vector<double> mean_x, mean_p;
    std::vector<double> var_x, var_p, cov_xp;
    std::vector<double> se_mean_x, se_var_x;
    std::vector<std::size_t> failed;  // trajectory indices skipped (fail_fast off)

    std::size_t size() const { return dims == 0 ? 0 : mean_x.size() / dims; }
    double time_at(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
};

/// Must be a pure function of the trajectory index: it is invoked
/// concurrently from worker threads and its values pin the ensemble.
using InitialSampler = std::function<PhaseState(std::uint64_t trajectory_index)>;

InitialSampler fixed_initial(PhaseState s);

struct EnsembleOptions {
    std::size_t n_traj = 1;
    std::uint64_t base_seed = 0;
    int workers = 0;      // <= 0: hardware concurrency
    bool fail_fast = true;
    std::size_t retain = 0;  // keep the first `retain` trajectories
};

/// Runs n_traj independent trajectories (noise stream = trajectory index) and
/// reduces moments with a fixed block structure, so results are bit-identical
/// for any worker count.
EnsembleMoments run_ensemble(const PhysicalParams& params, const Potential& pot,
                             const InitialSampler& initial, const SpectrumSpec& noise,
                             const IntegratorSpec& spec, const EnsembleOptions& opts,
                             std::vector<Trajectory>* retained = nullptr);

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          const std::vector<std::pair<std::string, std::string>>& meta = {});
void write_moments_csv(const std::string& path, const EnsembleMoments& m,
                       const std::vector<std::pair<std::string, std::string>>& meta = {});

}  // namespace qbm
