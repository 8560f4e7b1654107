#include "ppf/dft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "testing_util.hpp"

using ppf::ComplexSample;
using ppf::FilteredBlock;
using ppftest::norm_rel_err;
using ppftest::random_samples;

namespace {

FilteredBlock make_filtered(std::size_t n_channels, std::vector<ComplexSample> spectra) {
    FilteredBlock block;
    block.n_channels = n_channels;
    block.n_spectra_out = n_channels ? spectra.size() / n_channels : 0;
    block.spectra = std::move(spectra);
    return block;
}

} // namespace

TEST(DftNaive, ConstantInputConcentratesInBinZero) {
    const std::vector<ComplexSample> x(4, ComplexSample(1.0f, 0.0f));
    const auto bins = ppf::dft_naive(x);
    ASSERT_EQ(bins.size(), 4u);
    EXPECT_NEAR(bins[0].real(), 4.0f, 1e-6);
    EXPECT_NEAR(bins[0].imag(), 0.0f, 1e-6);
    for (std::size_t k = 1; k < 4; ++k)
        EXPECT_NEAR(std::abs(std::complex<double>(bins[k])), 0.0, 1e-6);
}

TEST(DftNaive, ComplexExponentialIsOrthogonal) {
    const std::size_t n = 8, k0 = 3;
    std::vector<ComplexSample> x(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k0 * m) / n;
        x[m] = ComplexSample(static_cast<float>(std::cos(angle)),
                             static_cast<float>(std::sin(angle)));
    }
    const auto bins = ppf::dft_naive(x);
    for (std::size_t k = 0; k < n; ++k) {
        const double mag = std::abs(std::complex<double>(bins[k]));
        if (k == k0)
            EXPECT_NEAR(mag, 8.0, 1e-5);
        else
            EXPECT_NEAR(mag, 0.0, 1e-5);
    }
}

TEST(DftNaive, ParsevalIdentity) {
    std::mt19937 rng(211);
    const auto x = random_samples(rng, 16);
    const auto bins = ppf::dft_naive(x);
    double time_energy = 0.0, freq_energy = 0.0;
    for (const auto& z : x)
        time_energy += std::norm(std::complex<double>(z));
    for (const auto& z : bins)
        freq_energy += std::norm(std::complex<double>(z));
    EXPECT_LT(std::fabs(time_energy - freq_energy / 16.0) / time_energy, 1e-6);
}

TEST(Fft, SizeOneIsIdentity) {
    const std::vector<ComplexSample> x{ComplexSample(0.25f, -1.5f)};
    const auto bins = ppf::fft(x);
    ASSERT_EQ(bins.size(), 1u);
    EXPECT_EQ(bins[0], x[0]);
}

TEST(Fft, DeltaTransformsToAllOnes) {
    std::vector<ComplexSample> x(8, ComplexSample(0.0f, 0.0f));
    x[0] = ComplexSample(1.0f, 0.0f);
    const auto bins = ppf::fft(x);
    for (const auto& z : bins) {
        EXPECT_NEAR(z.real(), 1.0f, 1e-6);
        EXPECT_NEAR(z.imag(), 0.0f, 1e-6);
    }
}

TEST(Fft, MatchesNaiveOnPowerOfTwoSizes) {
    std::mt19937 rng(223);
    for (std::size_t n = 1; n <= 512; n *= 2) {
        const auto x = random_samples(rng, n);
        const auto fast = ppf::fft(x);
        const auto direct = ppf::dft_naive(x);
        EXPECT_LT(norm_rel_err(fast, direct), 1e-5) << "n=" << n;
    }
}

TEST(Fft, RejectsNonPowerOfTwo) {
    std::mt19937 rng(227);
    const auto x = random_samples(rng, 12);
    EXPECT_THROW(ppf::fft(x), ppf::unsupported_size_error);
}

TEST(Fft, LinearityProperty) {
    std::mt19937 rng(229);
    const std::size_t n = 64;
    const auto x = random_samples(rng, n);
    const auto y = random_samples(rng, n);
    const ComplexSample alpha(0.5f, 1.0f), beta(-2.0f, 0.25f);

    std::vector<ComplexSample> combined(n);
    for (std::size_t i = 0; i < n; ++i)
        combined[i] = alpha * x[i] + beta * y[i];

    const auto fx = ppf::fft(x);
    const auto fy = ppf::fft(y);
    const auto fc = ppf::fft(combined);
    std::vector<ComplexSample> want(n);
    for (std::size_t i = 0; i < n; ++i)
        want[i] = alpha * fx[i] + beta * fy[i];
    EXPECT_LT(norm_rel_err(fc, want), 1e-5);
}

TEST(ChannelizeBlock, EmptyInputYieldsEmptyOutput) {
    const auto out = ppf::channelize_block(make_filtered(4, {}));
    EXPECT_EQ(out.n_spectra, 0u);
    EXPECT_TRUE(out.bins.empty());
}

TEST(ChannelizeBlock, ConstantRow) {
    const auto out =
        ppf::channelize_block(make_filtered(4, std::vector<ComplexSample>(4, {1.0f, 0.0f})));
    ASSERT_EQ(out.bins.size(), 4u);
    EXPECT_NEAR(out.bins[0].real(), 4.0f, 1e-6);
    for (std::size_t k = 1; k < 4; ++k)
        EXPECT_NEAR(std::abs(std::complex<double>(out.bins[k])), 0.0, 1e-6);
}

TEST(ChannelizeBlock, MatchesPerRowNaive) {
    std::mt19937 rng(233);
    const std::size_t nc = 64, rows = 16;
    const auto block = make_filtered(nc, random_samples(rng, nc * rows));
    const auto out = ppf::channelize_block(block, true, 2);
    ASSERT_EQ(out.n_spectra, rows);
    for (std::size_t s = 0; s < rows; ++s) {
        const auto want = ppf::dft_naive(
            std::span<const ComplexSample>(block.spectra.data() + s * nc, nc));
        EXPECT_LT(norm_rel_err({out.bins.data() + s * nc, nc}, want), 1e-5) << "row " << s;
    }
}

TEST(ChannelizeBlock, RowPermutationPermutesOutput) {
    std::mt19937 rng(239);
    const std::size_t nc = 16, rows = 8;
    const auto block = make_filtered(nc, random_samples(rng, nc * rows));
    const auto base = ppf::channelize_block(block);

    std::vector<std::size_t> perm(rows);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), rng);
    FilteredBlock shuffled = block;
    for (std::size_t s = 0; s < rows; ++s)
        std::copy_n(block.spectra.begin() + static_cast<std::ptrdiff_t>(perm[s] * nc), nc,
                    shuffled.spectra.begin() + static_cast<std::ptrdiff_t>(s * nc));

    const auto got = ppf::channelize_block(shuffled);
    for (std::size_t s = 0; s < rows; ++s)
        EXPECT_EQ(0, std::memcmp(got.bins.data() + s * nc, base.bins.data() + perm[s] * nc,
                                 nc * sizeof(ComplexSample)));
}

TEST(ChannelizeBlock, NonPowerOfTwoUsesNaiveFallback) {
    std::mt19937 rng(241);
    const std::size_t nc = 6, rows = 4;
    const auto block = make_filtered(nc, random_samples(rng, nc * rows));
    const auto out = ppf::channelize_block(block, true);
    for (std::size_t s = 0; s < rows; ++s) {
        const auto want = ppf::dft_naive(
            std::span<const ComplexSample>(block.spectra.data() + s * nc, nc));
        for (std::size_t k = 0; k < nc; ++k)
            EXPECT_EQ(out.bins[s * nc + k], want[k]);
    }
    EXPECT_THROW(ppf::channelize_block(block, false), ppf::unsupported_size_error);
}

TEST(ChannelizeBlock, DeterministicAcrossWorkers) {
    std::mt19937 rng(251);
    const std::size_t nc = 32, rows = 21;
    const auto block = make_filtered(nc, random_samples(rng, nc * rows));
    const auto base = ppf::channelize_block(block, true, 1);
    for (unsigned workers : {2u, 5u}) {
        const auto got = ppf::channelize_block(block, true, workers);
        EXPECT_EQ(0, std::memcmp(got.bins.data(), base.bins.data(),
                                 base.bins.size() * sizeof(ComplexSample)));
    }
}

TEST(FlopsForDft, Examples) {
    EXPECT_EQ(ppf::flops_for_dft(1, 5), 0u);
    EXPECT_EQ(ppf::flops_for_dft(1024, 1), 51'200u);
    EXPECT_EQ(ppf::flops_for_dft(8, 100), 12'000u);
    // non-power-of-two falls back to the 8 N^2 direct count
    EXPECT_EQ(ppf::flops_for_dft(3, 2), 144u);
    EXPECT_EQ(ppf::flops_for_dft(6, 10), 2'880u);
}
