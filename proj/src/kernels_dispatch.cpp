#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_detail.hpp"

namespace qbm::kernels {

namespace {

std::atomic<int> g_isa{-1};  // -1: undetected

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

}  // namespace

Isa detect_isa() {
    const char* env = std::getenv("QBM_KERNELS");
    if (env) {
        if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Isa::Avx2;
        if (std::strcmp(env, "avx2") == 0) return Isa::Scalar;  // requested but unsupported
    }
    return cpu_has_avx2() ? Isa::Avx2 : Isa::Scalar;
}

Isa active_isa() {
    int v = g_isa.load(std::memory_order_relaxed);
    if (v < 0) {
        v = static_cast<int>(detect_isa());
        g_isa.store(v, std::memory_order_relaxed);
    }
    return static_cast<Isa>(v);
}

void set_isa(Isa isa) {
    if (isa == Isa::Avx2 && !cpu_has_avx2()) isa = Isa::Scalar;
    g_isa.store(static_cast<int>(isa), std::memory_order_relaxed);
}

void threefry_blocks(const std::uint64_t key[4], std::uint64_t ctr0, std::size_t n_blocks,
                     std::uint64_t* out) {
    if (active_isa() == Isa::Avx2)
        detail::threefry_blocks_avx2(key, ctr0, n_blocks, out);
    else
        detail::threefry_blocks_scalar(key, ctr0, n_blocks, out);
}

void batch_splitstep_linear(BatchState& s, double k, double mass, double gamma, double dt,
                            std::size_t n_steps, const double* deta, double* xs, double* ps) {
    if (active_isa() == Isa::Avx2)
        detail::batch_splitstep_linear_avx2(s, k, mass, gamma, dt, n_steps, deta, xs, ps);
    else
        batch_splitstep_linear_scalar(s, k, mass, gamma, dt, n_steps, deta, xs, ps);
}

void accumulate_moments(const double* x, const double* p, std::size_t n, const MomentSums& sums) {
    if (active_isa() == Isa::Avx2)
        detail::accumulate_moments_avx2(x, p, n, sums);
    else
        accumulate_moments_scalar(x, p, n, sums);
}

}  // namespace qbm::kernels
