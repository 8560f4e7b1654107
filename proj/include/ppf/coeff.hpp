#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <vector>

#include "ppf/errors.hpp"

namespace ppf {

inline constexpr double kDefaultKaiserBeta = 9.0;

// Passband edge of the prototype lowpass, in units of half the channel
// spacing. 1.0 puts the cutoff exactly at the channel edge, which leaves a
// ~6 dB droop there; 1.5 widens the passband so the response stays flat
// across the whole bin while the stopband still starts well before the
// second neighbour.
inline constexpr double kDefaultCutoffScale = 1.5;

// bessel_i0 overflow guard: I0(x) exceeds double range shortly above 700.
inline constexpr double kBesselMaxArg = 700.0;

struct WindowSpec {
    enum class Kind { kaiser, rectangular };

    Kind kind = Kind::kaiser;
    double beta = kDefaultKaiserBeta;

    static WindowSpec kaiser(double beta) { return {Kind::kaiser, beta}; }
    static WindowSpec rectangular() { return {Kind::rectangular, 0.0}; }

    // Rectangular is the beta = 0 special case; both spellings share one
    // generation path.
    double effective_beta() const { return kind == Kind::rectangular ? 0.0 : beta; }

    void validate() const {
        if (!(beta >= 0.0) || !std::isfinite(beta))
            throw config_error("window beta must be finite and >= 0");
    }
};

/// Prototype FIR filter, length n_channels * n_taps, stored tap-major:
/// branch c, tap t lives at values[t * n_channels + c].
struct FilterCoefficients {
    std::size_t n_channels = 0;
    std::size_t n_taps = 0;
    std::vector<double> values;

    double at(std::size_t tap, std::size_t channel) const {
        return values[tap * n_channels + channel];
    }
};

/// Unnormalized sinc: sin(x)/x with sinc(0) = 1.
inline double sinc(double x) {
    if (x == 0.0)
        return 1.0;
    return std::sin(x) / x;
}

/// Modified Bessel function of the first kind, order zero, by power series.
/// Accurate to a few ulp on |x| <= 700; larger arguments overflow double.
inline double bessel_i0(double x) {
    if (!(std::fabs(x) <= kBesselMaxArg))
        throw std::domain_error("bessel_i0: |x| must be <= 700");
    const double y = x * x * 0.25;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 10000; ++k) {
        term *= y / (static_cast<double>(k) * static_cast<double>(k));
        sum += term;
        if (term < sum * 1e-17)
            break;
    }
    return sum;
}

/// Kaiser window of the given length. beta = 0 yields the rectangular
/// window. Symmetric by construction: the window argument is built from the
/// integer 2k - (L-1), which negates exactly under k -> L-1-k.
inline std::vector<double> kaiser_window(std::size_t length, double beta) {
    if (length == 0)
        throw config_error("kaiser_window: length must be >= 1");
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw config_error("kaiser_window: beta must be finite and >= 0");
    std::vector<double> w(length, 1.0);
    if (length == 1 || beta == 0.0)
        return w;
    const double denom = bessel_i0(beta);
    const double span = static_cast<double>(length - 1);
    for (std::size_t k = 0; k < length; ++k) {
        const double r = static_cast<double>(2 * static_cast<std::int64_t>(k) -
                                             static_cast<std::int64_t>(length - 1)) /
                         span;
        w[k] = bessel_i0(beta * std::sqrt(1.0 - r * r)) / denom;
    }
    return w;
}

/// Design the prototype lowpass: a sampled sinc truncated to
/// n_channels * n_taps points, shaped by the window and normalized to unit
/// coefficient sum. cutoff_scale widens the passband relative to half the
/// channel spacing.
inline FilterCoefficients generate_prototype(std::size_t n_channels, std::size_t n_taps,
                                             WindowSpec window,
                                             double cutoff_scale = kDefaultCutoffScale) {
    if (n_channels == 0 || n_taps == 0)
        throw config_error("generate_prototype: n_channels and n_taps must be >= 1");
    if (!(cutoff_scale > 0.0) || !std::isfinite(cutoff_scale))
        throw config_error("generate_prototype: cutoff_scale must be finite and > 0");
    window.validate();

    const std::size_t length = n_channels * n_taps;
    const std::vector<double> w = kaiser_window(length, window.effective_beta());

    FilterCoefficients coeffs;
    coeffs.n_channels = n_channels;
    coeffs.n_taps = n_taps;
    coeffs.values.resize(length);

    // sinc argument pi * (k - m) * scale / n_channels with m = (L-1)/2,
    // written over the integer numerator 2k - (L-1) so the sampled grid is
    // exactly symmetric about the midpoint.
    const double step = std::numbers::pi * cutoff_scale / (2.0 * static_cast<double>(n_channels));
    double sum = 0.0;
    for (std::size_t k = 0; k < length; ++k) {
        const double num = static_cast<double>(2 * static_cast<std::int64_t>(k) -
                                               static_cast<std::int64_t>(length - 1));
        const double v = sinc(num * step) * w[k];
        coeffs.values[k] = v;
        sum += v;
    }
    if (!std::isfinite(sum) || sum == 0.0)
        throw degenerate_filter_error("generate_prototype: coefficient sum vanished");
    for (double& v : coeffs.values)
        v /= sum;
    return coeffs;
}

// --- coefficient file format -------------------------------------------
//
// Binary, little-endian: magic "PPFC", u32 version = 1, u32 n_channels,
// u32 n_taps, f64 beta, then n_channels * n_taps f32 values in storage
// order. Text mode is one coefficient per line in decimal.

static_assert(std::endian::native == std::endian::little,
              "coefficient and stream codecs assume a little-endian host");

inline constexpr char kCoeffMagic[4] = {'P', 'P', 'F', 'C'};
inline constexpr std::uint32_t kCoeffFormatVersion = 1;

struct CoefficientFile {
    FilterCoefficients coeffs;
    double beta = 0.0;
};

namespace detail {

template <typename T>
void write_raw(std::ostream& os, const T& value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
bool read_raw(std::istream& is, T& value) {
    is.read(reinterpret_cast<char*>(&value), sizeof(T));
    return is.gcount() == static_cast<std::streamsize>(sizeof(T));
}

} // namespace detail

inline void write_coefficients(std::ostream& os, const FilterCoefficients& coeffs, double beta) {
    os.write(kCoeffMagic, 4);
    detail::write_raw(os, kCoeffFormatVersion);
    detail::write_raw(os, static_cast<std::uint32_t>(coeffs.n_channels));
    detail::write_raw(os, static_cast<std::uint32_t>(coeffs.n_taps));
    detail::write_raw(os, beta);
    for (double v : coeffs.values)
        detail::write_raw(os, static_cast<float>(v));
    if (!os)
        throw io_error("write_coefficients: write failed");
}

inline void write_coefficients_text(std::ostream& os, const FilterCoefficients& coeffs) {
    char line[64];
    for (double v : coeffs.values) {
        // max_digits10 so the f32 value survives the decimal round trip
        std::snprintf(line, sizeof(line), "%.9g\n", static_cast<double>(static_cast<float>(v)));
        os << line;
    }
    if (!os)
        throw io_error("write_coefficients_text: write failed");
}

inline CoefficientFile read_coefficients(std::istream& is) {
    char magic[4] = {};
    is.read(magic, 4);
    if (is.gcount() != 4 || magic[0] != 'P' || magic[1] != 'P' || magic[2] != 'F' ||
        magic[3] != 'C')
        throw decode_error("read_coefficients: bad magic", 0);
    std::uint32_t version = 0, n_channels = 0, n_taps = 0;
    double beta = 0.0;
    if (!detail::read_raw(is, version) || version != kCoeffFormatVersion)
        throw decode_error("read_coefficients: unsupported format version", 4);
    if (!detail::read_raw(is, n_channels) || !detail::read_raw(is, n_taps) ||
        !detail::read_raw(is, beta))
        throw decode_error("read_coefficients: truncated header", 8);
    if (n_channels == 0 || n_taps == 0)
        throw decode_error("read_coefficients: zero channel or tap count", 8);

    CoefficientFile file;
    file.beta = beta;
    file.coeffs.n_channels = n_channels;
    file.coeffs.n_taps = n_taps;
    file.coeffs.values.resize(static_cast<std::size_t>(n_channels) * n_taps);
    for (std::size_t k = 0; k < file.coeffs.values.size(); ++k) {
        float v = 0.0f;
        if (!detail::read_raw(is, v))
            throw decode_error("read_coefficients: truncated values", 20 + k * 4);
        file.coeffs.values[k] = v;
    }
    return file;
}

} // namespace ppf
