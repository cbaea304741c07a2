#pragma once

#include <cstdint>
#include <cstddef>
#include <span>

namespace qbm::kernels {

/// Instruction-set variants. Avx2 is selected at runtime when the CPU supports
/// it; the scalar path is the reference every variant must match bit-for-bit.
enum class Isa { Scalar, Avx2 };

// Substream tags keep unrelated random uses of one (seed, stream) disjoint.
namespace tags {
inline constexpr std::uint64_t kWhite = 0x5748495445ull;
inline constexpr std::uint64_t kSpectrum = 0x5350454354ull;
inline constexpr std::uint64_t kInitial = 0x494e4954ull;
}  // namespace tags

Isa active_isa();
void set_isa(Isa isa);   // test hook; overrides detection
Isa detect_isa();        // cpuid + QBM_KERNELS env (scalar|avx2|auto)

// ---------------------------------------------------------------------------
// Threefry-4x64-20 counter-based generator.
// One block = 4 output words from (key, counter). Streams are random-access:
// block b of a stream is reproducible regardless of scheduling.
// ---------------------------------------------------------------------------

/// Fills out[0..4*n_blocks) with the outputs of counters ctr0, ctr0+1, ...
/// key[4] is held fixed. Scalar and AVX2 variants produce identical words.
void threefry_blocks(const std::uint64_t key[4], std::uint64_t ctr0, std::size_t n_blocks,
                     std::uint64_t* out);

/// Reference single-block implementation (always scalar).
void threefry_block_scalar(const std::uint64_t key[4], const std::uint64_t ctr[4],
                           std::uint64_t out[4]);

/// Maps a 64-bit word to a double in (0, 1).
double u64_to_unit(std::uint64_t r);

/// Standard normal deviates by absolute index within a (seed, stream, tag)
/// substream: out[i] = z_{index0 + i}. Box-Muller on Threefry words; the
/// transform is shared scalar code so all ISA variants agree bitwise.
void fill_gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag,
                   std::uint64_t index0, std::span<double> out);

// ---------------------------------------------------------------------------
// Lockstep split-step update for linear-force potentials (force = -k x,
// friction coefficient c = gamma k / M on the mild momentum u).
// 4 trajectories advance together; arithmetic per lane is identical to the
// generic scalar integrator so results are bit-equal.
// ---------------------------------------------------------------------------

struct BatchState {
    double x[4];
    double u[4];
    double eta[4];
};

/// Advances 4 lanes n_steps times. deta is [step*4 + lane]. Writes per-step
/// positions and reported momenta (u + eta) to xs/ps, layout [step*4 + lane],
/// rows 0..n_steps inclusive (row 0 = initial state).
void batch_splitstep_linear(BatchState& s, double k, double mass, double gamma, double dt,
                            std::size_t n_steps, const double* deta, double* xs, double* ps);

/// Scalar reference for the same update (used by equivalence tests).
void batch_splitstep_linear_scalar(BatchState& s, double k, double mass, double gamma,
                                   double dt, std::size_t n_steps, const double* deta,
                                   double* xs, double* ps);

// ---------------------------------------------------------------------------
// Moment accumulation: per-step power sums over one trajectory's series.
// ---------------------------------------------------------------------------

/// sums layout: 7 contiguous arrays of length n (x, x2, x3, x4, p, p2, xp).
struct MomentSums {
    double* x;
    double* x2;
    double* x3;
    double* x4;
    double* p;
    double* p2;
    double* xp;
};

/// sums[j][k] += f(x[k], p[k]) for k in [0, n).
void accumulate_moments(const double* x, const double* p, std::size_t n, const MomentSums& sums);
void accumulate_moments_scalar(const double* x, const double* p, std::size_t n,
                               const MomentSums& sums);

}  // namespace qbm::kernels
