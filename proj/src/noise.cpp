#include "qbm/noise.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "qbm/config.hpp"
#include "qbm/io.hpp"
#include "qbm/kernels.hpp"

namespace qbm {

namespace {

// Even-series coefficients of x coth x (2^{2j} B_{2j} / (2j)!).
constexpr double kCothSeries[] = {1.0,        1.0 / 3.0,  -1.0 / 45.0,
                                  2.0 / 945.0, -1.0 / 4725.0, 2.0 / 93555.0};
constexpr int kMaxTruncOrder = 5;

double x_coth_x(double x) {
    x = std::fabs(x);
    if (x < 1e-4) return 1.0 + x * x / 3.0 - x * x * x * x / 45.0;
    if (x > 20.0) return x;  // coth -> 1 to machine precision
    return x * std::cosh(x) / std::sinh(x);
}

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

const char* kind_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::White: return "white";
        case NoiseKind::ColoredTruncated: return "truncated";
        case NoiseKind::ColoredCoth: return "coth";
    }
    return "white";
}

}  // namespace

double spectrum(const SpectrumSpec& spec, double omega) {
    detail::require_finite(omega, "omega");
    const double w = spec.params.noise_strength;
    if (spec.mode == SpectrumMode::Flat) return w;
    const double kt = spec.params.kb * spec.params.temperature;
    if (kt <= 0.0)
        throw ValidationError("temperature",
                              "colored spectrum degenerates at T = 0; use the flat mode");
    const double x = spec.params.hbar * omega / (2.0 * kt);
    if (spec.mode == SpectrumMode::FullCoth) return w * x_coth_x(x);
    if (spec.order < 1 || spec.order > kMaxTruncOrder)
        throw ValidationError("order", "truncation order must be in [1, " +
                                           std::to_string(kMaxTruncOrder) + "]");
    const double x2 = x * x;
    double sum = 0.0, pow = 1.0;
    for (int j = 0; j <= spec.order; ++j) {
        sum += kCothSeries[j] * pow;
        pow *= x2;
    }
    return w * sum;
}

NoisePath white_path(const PhysicalParams& params, std::size_t n, double dt, std::size_t dims,
                     std::uint64_t seed, std::uint64_t stream) {
    if (n < 1) throw ValidationError("n", "must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt", "must be > 0");
    if (dims < 1) throw ValidationError("dims", "must be >= 1");

    NoisePath path;
    path.dt = dt;
    path.dims = dims;
    path.kind = NoiseKind::White;
    path.seed = seed;
    path.stream = stream;
    path.increments.assign(n * dims, 0.0);

    const double w = params.noise_strength;
    if (w > 0.0) {
        kernels::fill_gaussian(seed, stream, kernels::tags::kWhite, 0, path.increments);
        const double scale = std::sqrt(w * dt);
        for (double& v : path.increments) v *= scale;
    }
    return path;
}

NoisePath colored_path(const SpectrumSpec& spec, std::size_t n, double dt, std::size_t dims,
                       std::uint64_t seed, std::uint64_t stream) {
    if (n < 8) throw ValidationError("n", "spectral synthesis needs n >= 8");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt", "must be > 0");
    if (dims < 1) throw ValidationError("dims", "must be >= 1");
    const double nyquist = std::numbers::pi / dt;
    if (spec.cutoff > nyquist * (1.0 + 1e-12))
        throw ValidationError("cutoff", "omega_max exceeds the grid Nyquist pi/dt");
    const double omega_max = spec.cutoff > 0.0 ? spec.cutoff : nyquist;

    NoisePath path;
    path.dt = dt;
    path.dims = dims;
    path.kind = spec.mode == SpectrumMode::FullCoth ? NoiseKind::ColoredCoth
               : spec.mode == SpectrumMode::Truncated ? NoiseKind::ColoredTruncated
                                                      : NoiseKind::White;
    path.trunc_order = spec.mode == SpectrumMode::Truncated ? spec.order : 0;
    path.seed = seed;
    path.stream = stream;
    path.increments.assign(n * dims, 0.0);

    if (spec.mode != SpectrumMode::Flat && spec.params.kb * spec.params.temperature <= 0.0)
        throw ValidationError("temperature",
                              "colored spectrum degenerates at T = 0; use the flat mode");
    const double w = spec.params.noise_strength;
    if (w == 0.0) return path;

    const std::size_t nc = n / 2 + 1;
    fftw_complex* in;
    double* out;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        in = fftw_alloc_complex(nc);
        out = fftw_alloc_real(n);
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    }

    std::vector<double> z(2 * nc);
    const double dn = static_cast<double>(n);
    for (std::size_t comp = 0; comp < dims; ++comp) {
        kernels::fill_gaussian(seed, stream, kernels::tags::kSpectrum + comp, 0, z);
        for (std::size_t j = 0; j < nc; ++j) {
            const double omega = 2.0 * std::numbers::pi * static_cast<double>(j) / (dn * dt);
            double s = omega <= omega_max ? spectrum(spec, omega) : 0.0;
            if (s < 0.0) s = 0.0;  // truncated series can dip negative near the cutoff
            const double amp = std::sqrt(s * dt / dn);
            const bool edge = (j == 0) || (n % 2 == 0 && j == n / 2);
            if (edge) {
                in[j][0] = amp * z[2 * j];
                in[j][1] = 0.0;
            } else {
                in[j][0] = amp * z[2 * j] * std::numbers::sqrt2 / 2.0;
                in[j][1] = amp * z[2 * j + 1] * std::numbers::sqrt2 / 2.0;
            }
        }
        fftw_execute(plan);
        for (std::size_t k = 0; k < n; ++k) path.increments[k * dims + comp] = out[k];
    }

    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    return path;
}

Periodogram welch_spectrum(const std::vector<double>& samples, double dt,
                           std::size_t segment_len) {
    if (segment_len < 8 || samples.size() < segment_len)
        throw ValidationError("segment", "series shorter than the Welch segment");
    const std::size_t L = segment_len;
    const std::size_t hop = L / 2;
    const std::size_t n_bins = L / 2 + 1;

    std::vector<double> window(L);
    double wsum2 = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(L)));
        wsum2 += window[i] * window[i];
    }

    double* in;
    fftw_complex* out;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        in = fftw_alloc_real(L);
        out = fftw_alloc_complex(n_bins);
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(L), in, out, FFTW_ESTIMATE);
    }

    Periodogram pg;
    pg.omega.resize(n_bins);
    pg.power.assign(n_bins, 0.0);
    for (std::size_t j = 0; j < n_bins; ++j)
        pg.omega[j] =
            2.0 * std::numbers::pi * static_cast<double>(j) / (static_cast<double>(L) * dt);

    std::size_t n_segments = 0;
    for (std::size_t start = 0; start + L <= samples.size(); start += hop) {
        for (std::size_t i = 0; i < L; ++i) in[i] = samples[start + i] * window[i];
        fftw_execute(plan);
        for (std::size_t j = 0; j < n_bins; ++j)
            pg.power[j] += out[j][0] * out[j][0] + out[j][1] * out[j][1];
        ++n_segments;
    }
    const double norm = 1.0 / (static_cast<double>(n_segments) * wsum2 * dt);
    for (double& p : pg.power) p *= norm;

    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_destroy_plan(plan);
        fftw_free(in);
        fftw_free(out);
    }
    return pg;
}

void write_noise_csv(const std::string& path, const NoisePath& noise) {
    CsvWriter csv(path);
    csv.meta({{"t0", format_double(noise.t0)},
              {"dt", format_double(noise.dt)},
              {"dims", std::to_string(noise.dims)},
              {"kind", kind_name(noise.kind)},
              {"order", std::to_string(noise.trunc_order)},
              {"seed", std::to_string(noise.seed)},
              {"stream", std::to_string(noise.stream)}});
    std::vector<std::string> cols = {"t"};
    for (std::size_t i = 1; i <= noise.dims; ++i) cols.push_back("deta_" + std::to_string(i));
    csv.header(cols);
    std::vector<double> row(noise.dims + 1);
    for (std::size_t k = 0; k < noise.steps(); ++k) {
        row[0] = noise.t0 + noise.dt * static_cast<double>(k);
        for (std::size_t i = 0; i < noise.dims; ++i) row[i + 1] = noise.increments[k * noise.dims + i];
        csv.row(row);
    }
}

NoisePath read_noise_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    NoisePath noise;
    for (const auto& [k, v] : t.meta) {
        if (k == "t0") noise.t0 = std::strtod(v.c_str(), nullptr);
        else if (k == "dt") noise.dt = std::strtod(v.c_str(), nullptr);
        else if (k == "dims") noise.dims = std::strtoull(v.c_str(), nullptr, 10);
        else if (k == "seed") noise.seed = std::strtoull(v.c_str(), nullptr, 10);
        else if (k == "stream") noise.stream = std::strtoull(v.c_str(), nullptr, 10);
        else if (k == "order") noise.trunc_order = static_cast<int>(std::strtol(v.c_str(), nullptr, 10));
        else if (k == "kind") {
            if (v == "white") noise.kind = NoiseKind::White;
            else if (v == "truncated") noise.kind = NoiseKind::ColoredTruncated;
            else if (v == "coth") noise.kind = NoiseKind::ColoredCoth;
            else throw ValidationError("kind", "unknown noise kind: " + v);
        }
    }
    if (noise.dims == 0) throw ValidationError("dims", "missing in noise CSV meta");
    noise.increments.reserve(t.rows.size() * noise.dims);
    for (const auto& row : t.rows) {
        if (row.size() != noise.dims + 1)
            throw ValidationError("file", "noise CSV row width mismatch");
        for (std::size_t i = 0; i < noise.dims; ++i) noise.increments.push_back(row[i + 1]);
    }
    return noise;
}

}  // namespace qbm
