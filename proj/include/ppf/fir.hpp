#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <thread>
#include <vector>

#include "ppf/coeff.hpp"
#include "ppf/errors.hpp"

// Keeps the reference loop nest genuinely scalar so it stays the serial
// baseline the optimized path is measured against.
#if defined(__GNUC__) && !defined(__clang__)
#define PPF_SCALAR_CODEGEN __attribute__((optimize("no-tree-vectorize", "no-tree-slp-vectorize")))
#else
#define PPF_SCALAR_CODEGEN
#endif

namespace ppf {

using ComplexSample = std::complex<float>;

/// Contiguous run of interleaved complex time-domain samples. Sample n
/// belongs to spectrum n / n_channels, channel n % n_channels.
struct SampleBlock {
    std::vector<ComplexSample> samples;
    std::size_t n_channels = 0;

    std::size_t n_spectra() const { return n_channels ? samples.size() / n_channels : 0; }

    void validate() const {
        if (n_channels == 0)
            throw config_error("SampleBlock: n_channels must be >= 1");
        if (samples.empty() || samples.size() % n_channels != 0)
            throw config_error("SampleBlock: sample count must be a positive multiple of n_channels");
    }
};

/// FIR output, spectrum-major: n_spectra_out rows of n_channels samples.
struct FilteredBlock {
    std::vector<ComplexSample> spectra;
    std::size_t n_channels = 0;
    std::size_t n_spectra_out = 0;
};

/// FLOPs for the FIR stage: one complex-by-real multiply-accumulate counts
/// as 2 multiplies + 2 adds.
inline std::uint64_t flops_for_fir(std::size_t n_channels, std::size_t n_taps,
                                   std::size_t n_spectra_out) {
    return static_cast<std::uint64_t>(n_spectra_out) * n_channels * n_taps * 4u;
}

namespace detail {

inline void check_fir_preconditions(const SampleBlock& input, const FilterCoefficients& coeffs) {
    input.validate();
    if (coeffs.n_channels == 0 || coeffs.n_taps == 0 ||
        coeffs.values.size() != coeffs.n_channels * coeffs.n_taps)
        throw config_error("fir: malformed coefficient set");
    if (input.n_channels != coeffs.n_channels)
        throw config_error("fir: input channel count does not match coefficients");
    if (input.n_spectra() < coeffs.n_taps)
        throw insufficient_history_error("fir: need at least n_taps input spectra");
}

// Coefficients quantized to f32 at the kernel boundary, so inline-generated
// and file-loaded filters drive bit-identical arithmetic.
inline std::vector<float> quantize_taps(const FilterCoefficients& coeffs) {
    std::vector<float> taps(coeffs.values.size());
    for (std::size_t k = 0; k < taps.size(); ++k)
        taps[k] = static_cast<float>(coeffs.values[k]);
    return taps;
}

// Register-block width (in floats) of the optimized kernel: the block's
// accumulators live in vector registers across the whole tap sweep.
inline constexpr std::size_t kFirBlock = 64;

// One output spectrum over `width` interleaved float lanes. The per-element
// operation sequence is fixed — a multiply for tap 0, then one fma per tap
// in ascending order, all in double — so results are bitwise identical to
// the scalar reference regardless of blocking, vector width or thread
// count. (fma(a, b, 0) rounds exactly like a * b.)
inline void accumulate_spectrum(const float* in, const float* taps_dup, std::size_t stride,
                                std::size_t n_taps, std::size_t width, float* out) {
    std::size_t k0 = 0;
    for (; k0 + kFirBlock <= width; k0 += kFirBlock) {
        double acc[kFirBlock];
        const float* x0 = in + k0;
        const float* w0 = taps_dup + k0;
        for (std::size_t j = 0; j < kFirBlock; ++j)
            acc[j] = static_cast<double>(w0[j]) * static_cast<double>(x0[j]);
        for (std::size_t t = 1; t < n_taps; ++t) {
            const float* x = in + t * stride + k0;
            const float* w = taps_dup + t * stride + k0;
            for (std::size_t j = 0; j < kFirBlock; ++j)
                acc[j] = std::fma(static_cast<double>(w[j]), static_cast<double>(x[j]), acc[j]);
        }
        for (std::size_t j = 0; j < kFirBlock; ++j)
            out[k0 + j] = static_cast<float>(acc[j]);
    }
    for (; k0 < width; ++k0) {
        double acc = static_cast<double>(taps_dup[k0]) * static_cast<double>(in[k0]);
        for (std::size_t t = 1; t < n_taps; ++t)
            acc = std::fma(static_cast<double>(taps_dup[t * stride + k0]),
                           static_cast<double>(in[t * stride + k0]), acc);
        out[k0] = static_cast<float>(acc);
    }
}

inline std::size_t clamp_workers(unsigned workers, std::size_t work_items) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    return std::min({static_cast<std::size_t>(workers), hw, std::max<std::size_t>(work_items, 1)});
}

} // namespace detail

/// Scalar reference implementation: the serial spectrum/channel/tap loop
/// nest, accumulating in double. Output spectrum s, channel c is
/// sum_t coeff[t][c] * in[s+t][c]; only fully valid windows are emitted, so
/// n_spectra_out = n_spectra_in - n_taps + 1.
PPF_SCALAR_CODEGEN inline FilteredBlock ppf_fir_reference(const SampleBlock& input,
                                                          const FilterCoefficients& coeffs) {
    detail::check_fir_preconditions(input, coeffs);
    const std::size_t n_channels = input.n_channels;
    const std::size_t n_taps = coeffs.n_taps;
    const std::size_t n_out = input.n_spectra() - n_taps + 1;
    const std::vector<float> taps = detail::quantize_taps(coeffs);

    FilteredBlock out;
    out.n_channels = n_channels;
    out.n_spectra_out = n_out;
    out.spectra.resize(n_out * n_channels);

    for (std::size_t s = 0; s < n_out; ++s) {
        for (std::size_t c = 0; c < n_channels; ++c) {
            double acc_re = 0.0;
            double acc_im = 0.0;
            for (std::size_t t = 0; t < n_taps; ++t) {
                const double w = taps[t * n_channels + c];
                const ComplexSample& z = input.samples[(s + t) * n_channels + c];
                acc_re = std::fma(w, static_cast<double>(z.real()), acc_re);
                acc_im = std::fma(w, static_cast<double>(z.imag()), acc_im);
            }
            out.spectra[s * n_channels + c] =
                ComplexSample(static_cast<float>(acc_re), static_cast<float>(acc_im));
        }
    }
    return out;
}

/// Optimized implementation: identical contract and identical per-output
/// accumulation order as the reference (ascending taps, double fma), with
/// the inner loop running contiguously along the channel axis and output
/// spectra partitioned across up to `workers` threads. Deterministic for a
/// fixed input regardless of the worker count.
inline FilteredBlock ppf_fir_optimized(const SampleBlock& input, const FilterCoefficients& coeffs,
                                       unsigned workers) {
    if (workers == 0)
        throw config_error("fir: workers must be >= 1");
    detail::check_fir_preconditions(input, coeffs);
    const std::size_t n_channels = input.n_channels;
    const std::size_t n_taps = coeffs.n_taps;
    const std::size_t n_out = input.n_spectra() - n_taps + 1;
    const std::vector<float> taps = detail::quantize_taps(coeffs);

    // Duplicate each tap weight for the re/im lanes so the hot loop is a
    // unit-stride multiply-accumulate over 2 * n_channels floats.
    const std::size_t width = 2 * n_channels;
    std::vector<float> taps_dup(n_taps * width);
    for (std::size_t t = 0; t < n_taps; ++t) {
        for (std::size_t c = 0; c < n_channels; ++c) {
            const float w = taps[t * n_channels + c];
            taps_dup[t * width + 2 * c] = w;
            taps_dup[t * width + 2 * c + 1] = w;
        }
    }

    FilteredBlock out;
    out.n_channels = n_channels;
    out.n_spectra_out = n_out;
    out.spectra.resize(n_out * n_channels);

    const float* in_flat = reinterpret_cast<const float*>(input.samples.data());
    float* out_flat = reinterpret_cast<float*>(out.spectra.data());

    auto run_range = [&](std::size_t s_begin, std::size_t s_end) {
        for (std::size_t s = s_begin; s < s_end; ++s)
            detail::accumulate_spectrum(in_flat + s * width, taps_dup.data(), width, n_taps,
                                        width, out_flat + s * width);
    };

    const std::size_t n_workers = detail::clamp_workers(workers, n_out);
    if (n_workers <= 1) {
        run_range(0, n_out);
        return out;
    }

    std::vector<std::thread> pool;
    pool.reserve(n_workers - 1);
    const std::size_t chunk = (n_out + n_workers - 1) / n_workers;
    for (std::size_t w = 1; w < n_workers; ++w) {
        const std::size_t begin = std::min(w * chunk, n_out);
        const std::size_t end = std::min(begin + chunk, n_out);
        pool.emplace_back(run_range, begin, end);
    }
    run_range(0, std::min(chunk, n_out));
    for (auto& t : pool)
        t.join();
    return out;
}

} // namespace ppf
