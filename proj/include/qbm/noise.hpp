#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qbm/core.hpp"

namespace qbm {

enum class NoiseKind { White, ColoredTruncated, ColoredCoth };

/// Discretized noise realization. increments[k*dims + i] is the change of the
/// noise variable over [t_k, t_{k+1}); the path itself starts at zero,
/// eta(t_k) = sum of the first k increments.
struct NoisePath {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t dims = 1;
    std::vector<double> increments;
    NoiseKind kind = NoiseKind::White;
    int trunc_order = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::size_t steps() const { return dims == 0 ? 0 : increments.size() / dims; }
};

enum class SpectrumMode { Flat, Truncated, FullCoth };

/// Bath spectral density specification. `cutoff` == 0 means "Nyquist of the
/// grid it is attached to" (pi/dt); a grid requires cutoff <= pi/dt.
struct SpectrumSpec {
    PhysicalParams params;
    SpectrumMode mode = SpectrumMode::Flat;
    int order = 1;        // truncation order m >= 1
    double cutoff = 0.0;  // omega_max
};

/// Noise power density S(omega). Flat: w. Truncated(m): w times the even
/// polynomial truncation of (x coth x), x = hbar*omega/(2 kB T). FullCoth:
/// w * x * coth(x) with the omega -> 0 limit equal to w.
double spectrum(const SpectrumSpec& spec, double omega);

NoisePath white_path(const PhysicalParams& params, std::size_t n, double dt, std::size_t dims,
                     std::uint64_t seed, std::uint64_t stream);

/// Spectral synthesis over the run length (circulant embedding): white complex
/// spectrum scaled by sqrt(S), inverse transformed to increments.
NoisePath colored_path(const SpectrumSpec& spec, std::size_t n, double dt, std::size_t dims,
                       std::uint64_t seed, std::uint64_t stream);

void write_noise_csv(const std::string& path, const NoisePath& noise);
NoisePath read_noise_csv(const std::string& path);

/// Welch power spectral density of an increment sequence (Hann window, 50%
/// overlap). With increments of variance w*dt the flat level estimates w.
struct Periodogram {
    std::vector<double> omega;  // bin centers up to pi/dt
    std::vector<double> power;
};

Periodogram welch_spectrum(const std::vector<double>& samples, double dt,
                           std::size_t segment_len);

}  // namespace qbm
