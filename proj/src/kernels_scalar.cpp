#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "kernels_detail.hpp"

namespace qbm::kernels {

void threefry_block_scalar(const std::uint64_t key[4], const std::uint64_t ctr[4],
                           std::uint64_t out[4]) {
    using detail::kRot;
    std::uint64_t ks[5] = {key[0], key[1], key[2], key[3],
                           detail::kThreefryParity ^ key[0] ^ key[1] ^ key[2] ^ key[3]};
    std::uint64_t x0 = ctr[0] + ks[0];
    std::uint64_t x1 = ctr[1] + ks[1];
    std::uint64_t x2 = ctr[2] + ks[2];
    std::uint64_t x3 = ctr[3] + ks[3];
    for (unsigned d = 0; d < 20; ++d) {
        const unsigned r0 = kRot[d % 8][0];
        const unsigned r1 = kRot[d % 8][1];
        if ((d & 1u) == 0) {
            x0 += x1; x1 = std::rotl(x1, static_cast<int>(r0)); x1 ^= x0;
            x2 += x3; x3 = std::rotl(x3, static_cast<int>(r1)); x3 ^= x2;
        } else {
            x0 += x3; x3 = std::rotl(x3, static_cast<int>(r0)); x3 ^= x0;
            x2 += x1; x1 = std::rotl(x1, static_cast<int>(r1)); x1 ^= x2;
        }
        if ((d & 3u) == 3u) {
            const std::uint64_t inj = (d >> 2) + 1;
            x0 += ks[inj % 5];
            x1 += ks[(inj + 1) % 5];
            x2 += ks[(inj + 2) % 5];
            x3 += ks[(inj + 3) % 5] + inj;
        }
    }
    out[0] = x0;
    out[1] = x1;
    out[2] = x2;
    out[3] = x3;
}

namespace detail {

void threefry_blocks_scalar(const std::uint64_t key[4], std::uint64_t ctr0, std::size_t n_blocks,
                            std::uint64_t* out) {
    std::uint64_t ctr[4] = {0, 0, 0, 0};
    for (std::size_t b = 0; b < n_blocks; ++b) {
        ctr[0] = ctr0 + b;
        threefry_block_scalar(key, ctr, out + 4 * b);
    }
}

}  // namespace detail

double u64_to_unit(std::uint64_t r) {
    return static_cast<double>(r >> 11) * 0x1p-53 + 0x1p-54;
}

void fill_gaussian(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag,
                   std::uint64_t index0, std::span<double> out) {
    if (out.empty()) return;
    const std::uint64_t key[4] = {seed, stream, tag, 0};
    const std::uint64_t first_block = index0 >> 2;
    const std::uint64_t last_block = (index0 + out.size() - 1) >> 2;

    constexpr std::size_t kChunk = 512;  // blocks per batch
    std::uint64_t words[kChunk * 4];
    double z[4];

    std::size_t written = 0;
    for (std::uint64_t b = first_block; b <= last_block; b += kChunk) {
        const std::size_t nb =
            static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, last_block - b + 1));
        threefry_blocks(key, b, nb, words);
        for (std::size_t i = 0; i < nb; ++i) {
            const std::uint64_t* w = words + 4 * i;
            // Box-Muller, two pairs per block. Shared scalar transform so all
            // ISA variants produce identical deviates.
            const double u0 = u64_to_unit(w[0]);
            const double a0 = 2.0 * std::numbers::pi * u64_to_unit(w[1]);
            const double r0 = std::sqrt(-2.0 * std::log(u0));
            z[0] = r0 * std::cos(a0);
            z[1] = r0 * std::sin(a0);
            const double u1 = u64_to_unit(w[2]);
            const double a1 = 2.0 * std::numbers::pi * u64_to_unit(w[3]);
            const double r1 = std::sqrt(-2.0 * std::log(u1));
            z[2] = r1 * std::cos(a1);
            z[3] = r1 * std::sin(a1);

            const std::uint64_t gbase = (b + i) << 2;
            for (std::size_t lane = 0; lane < 4 && written < out.size(); ++lane) {
                const std::uint64_t g = gbase + lane;
                if (g < index0) continue;
                out[written++] = z[lane];
            }
        }
    }
}

void batch_splitstep_linear_scalar(BatchState& s, double k, double mass, double gamma, double dt,
                                   std::size_t n_steps, const double* deta, double* xs,
                                   double* ps) {
    const double invM = 1.0 / mass;
    const double c = gamma * invM;
    const double hdt = 0.5 * dt;
    for (std::size_t lane = 0; lane < 4; ++lane) {
        xs[lane] = s.x[lane];
        ps[lane] = s.u[lane] + s.eta[lane];
    }
    for (std::size_t step = 0; step < n_steps; ++step) {
        for (std::size_t lane = 0; lane < 4; ++lane) {
            const double x = s.x[lane];
            const double u = s.u[lane];
            const double de = deta[step * 4 + lane];
            const double g = k * x;
            const double hu = k * u;
            const double f = -g - c * hu;
            const double uh = u + hdt * f;
            const double x1 = x + dt * (uh * invM) + de * invM;
            const double g1 = k * x1;
            const double hu1 = k * uh;
            const double f1 = -g1 - c * hu1;
            const double u1 = uh + hdt * f1;
            const double eta1 = s.eta[lane] + de;
            s.x[lane] = x1;
            s.u[lane] = u1;
            s.eta[lane] = eta1;
            xs[(step + 1) * 4 + lane] = x1;
            ps[(step + 1) * 4 + lane] = u1 + eta1;
        }
    }
}

void accumulate_moments_scalar(const double* x, const double* p, std::size_t n,
                               const MomentSums& sums) {
    for (std::size_t i = 0; i < n; ++i) {
        const double xv = x[i];
        const double pv = p[i];
        const double x2 = xv * xv;
        sums.x[i] += xv;
        sums.x2[i] += x2;
        sums.x3[i] += x2 * xv;
        sums.x4[i] += x2 * x2;
        sums.p[i] += pv;
        sums.p2[i] += pv * pv;
        sums.xp[i] += xv * pv;
    }
}

}  // namespace qbm::kernels
