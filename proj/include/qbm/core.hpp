#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbm {

/// Thrown on invalid user input; `field` names the offending parameter.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Thrown when a trajectory integration fails (runaway, overflow).
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& message, std::size_t step,
                     std::optional<std::size_t> trajectory = {})
        : std::runtime_error(message), step_(step), trajectory_(trajectory) {}
    std::size_t step() const { return step_; }
    std::optional<std::size_t> trajectory() const { return trajectory_; }

private:
    std::size_t step_;
    std::optional<std::size_t> trajectory_;
};

/// Bath and particle constants. Units are caller-chosen; nothing here assumes SI.
/// `noise_strength` (w = 2 M gamma kB T) is always derived, never stored independently.
struct PhysicalParams {
    double mass = 1.0;
    double gamma = 0.0;        // friction time constant
    double temperature = 0.0;
    double hbar = 1.0;
    double kb = 1.0;
    double alpha = 1.0 / 137.036;
    std::optional<double> lightspeed;

    double noise_strength = 0.0;               // w = 2 M gamma kB T
    std::optional<double> bohr_temperature;    // T_H = alpha^2 M c^2 / kB, needs lightspeed
};

PhysicalParams make_params(double mass, double gamma, double temperature, double hbar,
                           double kb, std::optional<double> alpha = {},
                           std::optional<double> lightspeed = {});

/// Potential energy surface as a (value, gradient, Hessian) triple.
/// Free/Harmonic support any dimension; Quartic/Tabulated are 1-D.
class Potential {
public:
    using ValueFn = std::function<double(std::span<const double>)>;
    using GradFn = std::function<void(std::span<const double>, std::span<double>)>;
    using HessFn = std::function<void(std::span<const double>, std::span<double>)>;

    static Potential free_particle(std::size_t dims = 1);
    static Potential harmonic(double mass, double omega, std::size_t dims = 1);
    static Potential quartic(double a, double b);
    static Potential tabulated(std::vector<double> grid, std::vector<double> values);
    static Potential custom(std::size_t dims, ValueFn v, GradFn g, HessFn h);

    std::size_t dims() const { return dims_; }

    double value(std::span<const double> x) const;
    void gradient(std::span<const double> x, std::span<double> out) const;
    void hessian(std::span<const double> x, std::span<double> out) const;  // row-major dims x dims

    // 1-D conveniences
    double value1(double x) const;
    double grad1(double x) const;
    double hess1(double x) const;

    /// True when the force is exactly -k x with constant k (free: k = 0, harmonic: k = M w^2).
    bool linear_force() const { return linear_; }
    double linear_coeff() const { return linear_coeff_; }

private:
    Potential() = default;
    std::size_t dims_ = 1;
    ValueFn v_;
    GradFn g_;
    HessFn h_;
    bool linear_ = false;
    double linear_coeff_ = 0.0;
};

struct PotentialEval {
    double value;
    std::vector<double> grad;
    std::vector<double> hess;
};

PotentialEval potential_eval(const Potential& p, std::span<const double> x);

/// A point in phase space. x and p must have the same dimension and be finite.
struct PhaseState {
    std::vector<double> x;
    std::vector<double> p;
};

PhaseState make_state(std::vector<double> x, std::vector<double> p);
PhaseState make_state1(double x, double p);

/// Uniform-step time series of phase states (SoA layout, index [k*dims + i]).
/// `grad_v_accum`, when recorded, is the running left-Riemann integral of
/// grad V along the trajectory and starts at zero.
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t dims = 1;
    std::vector<double> x;
    std::vector<double> p;
    std::vector<double> grad_v_accum;  // empty when not recorded

    std::size_t size() const { return dims == 0 ? 0 : x.size() / dims; }
    double time_at(std::size_t k) const { return t0 + dt * static_cast<double>(k); }
    bool has_grad_accum() const { return !grad_v_accum.empty(); }
};

namespace detail {
void require_finite(double v, const char* field);
}

}  // namespace qbm
