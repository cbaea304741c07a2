#pragma once

#include "qbm/kernels.hpp"

namespace qbm::kernels::detail {

inline constexpr std::uint64_t kThreefryParity = 0x1BD11BDAA9FC1A22ull;
inline constexpr unsigned kRot[8][2] = {{14, 16}, {52, 57}, {23, 40}, {5, 37},
                                        {25, 33}, {46, 12}, {58, 22}, {32, 32}};

// Counter layout contract: block b of a stream uses ctr = {b, 0, 0, 0}.
void threefry_blocks_scalar(const std::uint64_t key[4], std::uint64_t ctr0, std::size_t n_blocks,
                            std::uint64_t* out);

// Definitions live in the -mavx2 translation unit; call only when the CPU
// supports AVX2.
void threefry_blocks_avx2(const std::uint64_t key[4], std::uint64_t ctr0, std::size_t n_blocks,
                          std::uint64_t* out);
void batch_splitstep_linear_avx2(BatchState& s, double k, double mass, double gamma, double dt,
                                 std::size_t n_steps, const double* deta, double* xs, double* ps);
void accumulate_moments_avx2(const double* x, const double* p, std::size_t n,
                             const MomentSums& sums);

}  // namespace qbm::kernels::detail
