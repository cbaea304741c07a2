// AVX2 kernel variants. This translation unit is the only one compiled with
// -mavx2; entry points are reached through the runtime dispatcher.

#include <immintrin.h>

#include "kernels_detail.hpp"

namespace qbm::kernels::detail {

namespace {

inline __m256i rotl64(__m256i v, int s) {
    return _mm256_or_si256(_mm256_slli_epi64(v, s), _mm256_srli_epi64(v, 64 - s));
}

// Matches scalar unary minus exactly (including zero signs).
inline __m256d neg(__m256d v) { return _mm256_xor_pd(v, _mm256_set1_pd(-0.0)); }

}  // namespace

// 4 independent counters per pass, one register per state word.
void threefry_blocks_avx2(const std::uint64_t key[4], std::uint64_t ctr0, std::size_t n_blocks,
                          std::uint64_t* out) {
    const std::uint64_t ks4 = kThreefryParity ^ key[0] ^ key[1] ^ key[2] ^ key[3];
    const std::uint64_t ks[5] = {key[0], key[1], key[2], key[3], ks4};

    std::size_t b = 0;
    for (; b + 4 <= n_blocks; b += 4) {
        const std::uint64_t c = ctr0 + b;
        __m256i x0 = _mm256_add_epi64(
            _mm256_setr_epi64x(static_cast<long long>(c), static_cast<long long>(c + 1),
                               static_cast<long long>(c + 2), static_cast<long long>(c + 3)),
            _mm256_set1_epi64x(static_cast<long long>(ks[0])));
        __m256i x1 = _mm256_set1_epi64x(static_cast<long long>(ks[1]));
        __m256i x2 = _mm256_set1_epi64x(static_cast<long long>(ks[2]));
        __m256i x3 = _mm256_set1_epi64x(static_cast<long long>(ks[3]));

        for (unsigned d = 0; d < 20; ++d) {
            const int r0 = static_cast<int>(kRot[d % 8][0]);
            const int r1 = static_cast<int>(kRot[d % 8][1]);
            if ((d & 1u) == 0) {
                x0 = _mm256_add_epi64(x0, x1);
                x1 = rotl64(x1, r0);
                x1 = _mm256_xor_si256(x1, x0);
                x2 = _mm256_add_epi64(x2, x3);
                x3 = rotl64(x3, r1);
                x3 = _mm256_xor_si256(x3, x2);
            } else {
                x0 = _mm256_add_epi64(x0, x3);
                x3 = rotl64(x3, r0);
                x3 = _mm256_xor_si256(x3, x0);
                x2 = _mm256_add_epi64(x2, x1);
                x1 = rotl64(x1, r1);
                x1 = _mm256_xor_si256(x1, x2);
            }
            if ((d & 3u) == 3u) {
                const std::uint64_t inj = (d >> 2) + 1;
                x0 = _mm256_add_epi64(x0, _mm256_set1_epi64x(static_cast<long long>(ks[inj % 5])));
                x1 = _mm256_add_epi64(x1,
                                      _mm256_set1_epi64x(static_cast<long long>(ks[(inj + 1) % 5])));
                x2 = _mm256_add_epi64(x2,
                                      _mm256_set1_epi64x(static_cast<long long>(ks[(inj + 2) % 5])));
                x3 = _mm256_add_epi64(
                    x3, _mm256_set1_epi64x(static_cast<long long>(ks[(inj + 3) % 5] + inj)));
            }
        }

        alignas(32) std::uint64_t w0[4], w1[4], w2[4], w3[4];
        _mm256_store_si256(reinterpret_cast<__m256i*>(w0), x0);
        _mm256_store_si256(reinterpret_cast<__m256i*>(w1), x1);
        _mm256_store_si256(reinterpret_cast<__m256i*>(w2), x2);
        _mm256_store_si256(reinterpret_cast<__m256i*>(w3), x3);
        for (std::size_t lane = 0; lane < 4; ++lane) {
            std::uint64_t* o = out + 4 * (b + lane);
            o[0] = w0[lane];
            o[1] = w1[lane];
            o[2] = w2[lane];
            o[3] = w3[lane];
        }
    }
    if (b < n_blocks) threefry_blocks_scalar(key, ctr0 + b, n_blocks - b, out + 4 * b);
}

// Identical operation sequence to the scalar reference, one lane per element.
// No FMA: the scalar path compiles with contraction off, so mul/add must stay
// separate here for bit equality.
void batch_splitstep_linear_avx2(BatchState& s, double k, double mass, double gamma, double dt,
                                 std::size_t n_steps, const double* deta, double* xs, double* ps) {
    const double invM_s = 1.0 / mass;
    const __m256d kk = _mm256_set1_pd(k);
    const __m256d invM = _mm256_set1_pd(invM_s);
    const __m256d c = _mm256_set1_pd(gamma * invM_s);
    const __m256d hdt = _mm256_set1_pd(0.5 * dt);
    const __m256d vdt = _mm256_set1_pd(dt);

    __m256d x = _mm256_loadu_pd(s.x);
    __m256d u = _mm256_loadu_pd(s.u);
    __m256d eta = _mm256_loadu_pd(s.eta);

    _mm256_storeu_pd(xs, x);
    _mm256_storeu_pd(ps, _mm256_add_pd(u, eta));

    for (std::size_t step = 0; step < n_steps; ++step) {
        const __m256d de = _mm256_loadu_pd(deta + step * 4);
        const __m256d g = _mm256_mul_pd(kk, x);
        const __m256d hu = _mm256_mul_pd(kk, u);
        const __m256d f = _mm256_sub_pd(neg(g), _mm256_mul_pd(c, hu));
        const __m256d uh = _mm256_add_pd(u, _mm256_mul_pd(hdt, f));
        const __m256d x1 = _mm256_add_pd(
            _mm256_add_pd(x, _mm256_mul_pd(vdt, _mm256_mul_pd(uh, invM))),
            _mm256_mul_pd(de, invM));
        const __m256d g1 = _mm256_mul_pd(kk, x1);
        const __m256d hu1 = _mm256_mul_pd(kk, uh);
        const __m256d f1 = _mm256_sub_pd(neg(g1), _mm256_mul_pd(c, hu1));
        const __m256d u1 = _mm256_add_pd(uh, _mm256_mul_pd(hdt, f1));
        const __m256d eta1 = _mm256_add_pd(eta, de);
        x = x1;
        u = u1;
        eta = eta1;
        _mm256_storeu_pd(xs + (step + 1) * 4, x);
        _mm256_storeu_pd(ps + (step + 1) * 4, _mm256_add_pd(u, eta));
    }

    _mm256_storeu_pd(s.x, x);
    _mm256_storeu_pd(s.u, u);
    _mm256_storeu_pd(s.eta, eta);
}

void accumulate_moments_avx2(const double* x, const double* p, std::size_t n,
                             const MomentSums& sums) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d pv = _mm256_loadu_pd(p + i);
        const __m256d x2 = _mm256_mul_pd(xv, xv);
        _mm256_storeu_pd(sums.x + i, _mm256_add_pd(_mm256_loadu_pd(sums.x + i), xv));
        _mm256_storeu_pd(sums.x2 + i, _mm256_add_pd(_mm256_loadu_pd(sums.x2 + i), x2));
        _mm256_storeu_pd(sums.x3 + i,
                         _mm256_add_pd(_mm256_loadu_pd(sums.x3 + i), _mm256_mul_pd(x2, xv)));
        _mm256_storeu_pd(sums.x4 + i,
                         _mm256_add_pd(_mm256_loadu_pd(sums.x4 + i), _mm256_mul_pd(x2, x2)));
        _mm256_storeu_pd(sums.p + i, _mm256_add_pd(_mm256_loadu_pd(sums.p + i), pv));
        _mm256_storeu_pd(sums.p2 + i,
                         _mm256_add_pd(_mm256_loadu_pd(sums.p2 + i), _mm256_mul_pd(pv, pv)));
        _mm256_storeu_pd(sums.xp + i,
                         _mm256_add_pd(_mm256_loadu_pd(sums.xp + i), _mm256_mul_pd(xv, pv)));
    }
    if (i < n) {
        MomentSums tail{sums.x + i,  sums.x2 + i, sums.x3 + i, sums.x4 + i,
                        sums.p + i,  sums.p2 + i, sums.xp + i};
        accumulate_moments_scalar(x + i, p + i, n - i, tail);
    }
}

}  // namespace qbm::kernels::detail
