#pragma once

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "ppf/errors.hpp"
#include "ppf/fir.hpp"

namespace ppf {

/// Frequency-domain spectra after FIR + DFT, spectrum-major.
struct ChannelizedOutput {
    std::vector<ComplexSample> bins;
    std::size_t n_channels = 0;
    std::size_t n_spectra = 0;
};

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// FLOPs for the DFT stage: the usual 5 N log2 N per radix-2 transform, or
/// the 8 N^2 direct cost when N is not a power of two.
inline std::uint64_t flops_for_dft(std::size_t n_channels, std::size_t n_spectra) {
    const auto n = static_cast<std::uint64_t>(n_channels);
    if (is_power_of_two(n_channels)) {
        const std::uint64_t log2n = std::bit_width(n) - 1;
        return static_cast<std::uint64_t>(n_spectra) * 5u * n * log2n;
    }
    return static_cast<std::uint64_t>(n_spectra) * 8u * n * n;
}

/// Direct O(N^2) DFT, X[k] = sum_n x[n] exp(-2 pi i k n / N), no
/// normalization. Serves as the correctness oracle for the fast path.
inline std::vector<ComplexSample> dft_naive(std::span<const ComplexSample> spectrum) {
    const std::size_t n = spectrum.size();
    if (n == 0)
        throw config_error("dft_naive: empty spectrum");

    // roots[j] = exp(-2 pi i j / N); indexing by (k*n) mod N keeps the
    // argument reduction exact.
    std::vector<std::complex<double>> roots(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        roots[j] = {std::cos(angle), std::sin(angle)};
    }

    std::vector<ComplexSample> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc_re = 0.0;
        double acc_im = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const std::complex<double>& w = roots[(k * m) % n];
            const double xr = spectrum[m].real();
            const double xi = spectrum[m].imag();
            acc_re += xr * w.real() - xi * w.imag();
            acc_im += xr * w.imag() + xi * w.real();
        }
        out[k] = ComplexSample(static_cast<float>(acc_re), static_cast<float>(acc_im));
    }
    return out;
}

/// Precomputed tables for an iterative radix-2 decimation-in-time FFT of a
/// fixed power-of-two size. Reusable across rows and threads. Butterflies
/// run in single precision with explicit fma, which keeps per-element
/// rounding independent of the surrounding code path.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n) {
        if (!is_power_of_two(n))
            throw unsupported_size_error("fft: size must be a power of two");
        log2n_ = static_cast<unsigned>(std::bit_width(static_cast<std::uint64_t>(n)) - 1);

        bitrev_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (unsigned b = 0; b < log2n_; ++b)
                r |= ((i >> b) & 1u) << (log2n_ - 1 - b);
            bitrev_[i] = r;
        }

        // Stage with half-length h stores its h roots at [h-1, 2h-2].
        twiddle_re_.resize(n > 1 ? n - 1 : 0);
        twiddle_im_.resize(n > 1 ? n - 1 : 0);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            const std::size_t half = len / 2;
            for (std::size_t j = 0; j < half; ++j) {
                const double angle =
                    -2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(len);
                twiddle_re_[half - 1 + j] = static_cast<float>(std::cos(angle));
                twiddle_im_[half - 1 + j] = static_cast<float>(std::sin(angle));
            }
        }
    }

    std::size_t size() const { return n_; }

    /// Butterflies on separate re/im planes of size() floats each, in
    /// place. The split layout keeps the inner loop unit-stride.
    void transform_planes(float* re, float* im) const {
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t r = bitrev_[i];
            if (i < r) {
                std::swap(re[i], re[r]);
                std::swap(im[i], im[r]);
            }
        }
        for (std::size_t len = 2; len <= n_; len <<= 1) {
            const std::size_t half = len / 2;
            const float* wr = twiddle_re_.data() + (half - 1);
            const float* wi = twiddle_im_.data() + (half - 1);
            for (std::size_t base = 0; base < n_; base += len) {
                float* lo_re = re + base;
                float* lo_im = im + base;
                float* hi_re = lo_re + half;
                float* hi_im = lo_im + half;
                for (std::size_t j = 0; j < half; ++j) {
                    const float br = hi_re[j];
                    const float bi = hi_im[j];
                    const float tr = std::fma(br, wr[j], -(bi * wi[j]));
                    const float ti = std::fma(br, wi[j], bi * wr[j]);
                    hi_re[j] = lo_re[j] - tr;
                    hi_im[j] = lo_im[j] - ti;
                    lo_re[j] += tr;
                    lo_im[j] += ti;
                }
            }
        }
    }

    /// In-place transform of a buffer of size() values, using a caller
    /// scratch of 2 * size() floats.
    void transform(ComplexSample* a, float* scratch) const {
        float* re = scratch;
        float* im = scratch + n_;
        for (std::size_t i = 0; i < n_; ++i) {
            re[i] = a[i].real();
            im[i] = a[i].imag();
        }
        transform_planes(re, im);
        for (std::size_t i = 0; i < n_; ++i)
            a[i] = ComplexSample(re[i], im[i]);
    }

private:
    std::size_t n_;
    unsigned log2n_ = 0;
    std::vector<std::size_t> bitrev_;
    std::vector<float> twiddle_re_;
    std::vector<float> twiddle_im_;
};

/// Radix-2 FFT with the dft_naive contract. Throws unsupported_size_error
/// when the length is not a power of two.
inline std::vector<ComplexSample> fft(std::span<const ComplexSample> spectrum) {
    const std::size_t n = spectrum.size();
    if (n == 0)
        throw config_error("fft: empty spectrum");
    FftPlan plan(n);
    std::vector<ComplexSample> out(spectrum.begin(), spectrum.end());
    std::vector<float> scratch(2 * n);
    plan.transform(out.data(), scratch.data());
    return out;
}

/// Transform each row of the filtered block independently: fft for
/// power-of-two channel counts, dft_naive otherwise (unless the fallback is
/// disabled). Rows may be split across up to `workers` threads; per-row
/// results do not depend on the scheduling.
inline ChannelizedOutput channelize_block(const FilteredBlock& filtered, bool fft_fallback = true,
                                          unsigned workers = 1) {
    if (filtered.n_channels == 0)
        throw config_error("channelize_block: n_channels must be >= 1");
    if (filtered.spectra.size() != filtered.n_spectra_out * filtered.n_channels)
        throw config_error("channelize_block: malformed filtered block");
    if (workers == 0)
        throw config_error("channelize_block: workers must be >= 1");

    ChannelizedOutput out;
    out.n_channels = filtered.n_channels;
    out.n_spectra = filtered.n_spectra_out;
    if (out.n_spectra == 0)
        return out;
    out.bins.resize(out.n_spectra * out.n_channels);

    const std::size_t n = filtered.n_channels;
    const bool pow2 = is_power_of_two(n);
    if (!pow2 && !fft_fallback)
        throw unsupported_size_error("channelize_block: non-power-of-two channel count with fallback disabled");

    const FftPlan* plan = nullptr;
    FftPlan local_plan{1};
    if (pow2) {
        local_plan = FftPlan(n);
        plan = &local_plan;
    }

    auto run_rows = [&](std::size_t row_begin, std::size_t row_end) {
        std::vector<float> scratch(pow2 ? 2 * n : 0);
        for (std::size_t s = row_begin; s < row_end; ++s) {
            const ComplexSample* src = filtered.spectra.data() + s * n;
            ComplexSample* dst = out.bins.data() + s * n;
            if (pow2) {
                std::copy_n(src, n, dst);
                plan->transform(dst, scratch.data());
            } else {
                const auto row = dft_naive(std::span<const ComplexSample>(src, n));
                std::copy(row.begin(), row.end(), dst);
            }
        }
    };

    const std::size_t n_workers = detail::clamp_workers(workers, out.n_spectra);
    if (n_workers <= 1) {
        run_rows(0, out.n_spectra);
        return out;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_workers - 1);
    const std::size_t chunk = (out.n_spectra + n_workers - 1) / n_workers;
    for (std::size_t w = 1; w < n_workers; ++w) {
        const std::size_t begin = std::min(w * chunk, out.n_spectra);
        const std::size_t end = std::min(begin + chunk, out.n_spectra);
        pool.emplace_back(run_rows, begin, end);
    }
    run_rows(0, std::min(chunk, out.n_spectra));
    for (auto& t : pool)
        t.join();
    return out;
}

} // namespace ppf
