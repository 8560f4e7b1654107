#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <vector>

#include "ppf/coeff.hpp"
#include "ppf/dft.hpp"
#include "ppf/errors.hpp"
#include "ppf/fir.hpp"

namespace ppf {

inline constexpr std::size_t kDefaultBlockSpectra = 4096;
inline constexpr std::uint64_t kDefaultReferenceRate = 6'500'000'000ull;

/// Full channelizer configuration; governs every stage.
struct PpfConfig {
    std::size_t n_channels = 0;
    std::size_t n_taps = 0;
    WindowSpec window;
    std::size_t block_spectra = kDefaultBlockSpectra;
    std::uint64_t reference_rate_bytes_per_sec = kDefaultReferenceRate;
    bool fft_fallback = true;

    void validate() const {
        if (n_channels == 0)
            throw config_error("config: n_channels must be >= 1");
        if (n_taps == 0)
            throw config_error("config: n_taps must be >= 1");
        if (block_spectra < n_taps)
            throw config_error("config: block_spectra must be >= n_taps");
        if (reference_rate_bytes_per_sec == 0)
            throw config_error("config: reference rate must be > 0");
        window.validate();
    }
};

/// Mutable per-stream bookkeeping. history holds the most recent
/// n_taps - 1 complete input spectra (fewer near the stream head).
struct StreamState {
    std::vector<ComplexSample> history;
    std::uint64_t spectra_processed = 0;
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;
    std::uint64_t dropped_samples = 0;
};

/// Prepend the carried history to a block and retain the trailing
/// n_taps - 1 spectra as the next history. The returned block is the FIR
/// input whose valid windows are exactly the ones newly completed by this
/// block.
inline SampleBlock carry_history(StreamState& state, const SampleBlock& block,
                                 std::size_t n_taps) {
    if (n_taps == 0)
        throw config_error("carry_history: n_taps must be >= 1");
    const std::size_t n_channels = block.n_channels;

    SampleBlock joined;
    joined.n_channels = n_channels;
    joined.samples.reserve(state.history.size() + block.samples.size());
    joined.samples.insert(joined.samples.end(), state.history.begin(), state.history.end());
    joined.samples.insert(joined.samples.end(), block.samples.begin(), block.samples.end());

    const std::size_t keep_spectra =
        std::min(n_taps - 1, joined.samples.size() / (n_channels ? n_channels : 1));
    const std::size_t keep = keep_spectra * n_channels;
    state.history.assign(joined.samples.end() - static_cast<std::ptrdiff_t>(keep),
                         joined.samples.end());
    return joined;
}

struct StreamOptions {
    unsigned workers = 1;
    // Pre-fill the history with zero spectra so the stream emits one output
    // spectrum per input spectrum from the very first sample.
    bool zero_prime = false;
    // Filter to apply instead of generating one from the config (e.g. a
    // coefficient file). Must match the config's channel and tap counts.
    const FilterCoefficients* coefficients = nullptr;
};

/// Stream raw interleaved f32 complex samples from source through FIR + DFT
/// and write channelized spectra to sink. Output is independent of
/// block_spectra partitioning and equals the one-shot computation over the
/// whole input.
inline StreamState process_stream(const PpfConfig& config, std::istream& source,
                                  std::ostream& sink, const StreamOptions& options = {}) {
    config.validate();
    if (options.workers == 0)
        throw config_error("process_stream: workers must be >= 1");

    const std::size_t n_channels = config.n_channels;
    const std::size_t sample_bytes = sizeof(float) * 2;
    const std::size_t spectrum_bytes = n_channels * sample_bytes;

    FilterCoefficients coeffs;
    if (options.coefficients != nullptr) {
        if (options.coefficients->n_channels != n_channels ||
            options.coefficients->n_taps != config.n_taps)
            throw config_error("process_stream: supplied coefficients do not match the config");
        coeffs = *options.coefficients;
    } else {
        coeffs = generate_prototype(n_channels, config.n_taps, config.window);
    }

    StreamState state;
    if (options.zero_prime)
        state.history.assign((config.n_taps - 1) * n_channels, ComplexSample(0.0f, 0.0f));

    std::vector<char> io_buf(config.block_spectra * spectrum_bytes);
    std::vector<char> byte_carry;           // partial sample, < 8 bytes
    std::vector<ComplexSample> sample_carry; // partial spectrum, < n_channels samples
    std::uint64_t stream_offset = 0;         // bytes consumed from source

    SampleBlock block;
    block.n_channels = n_channels;

    auto process_block = [&]() {
        const SampleBlock joined = carry_history(state, block, config.n_taps);
        if (joined.n_spectra() < config.n_taps)
            return;
        const FilteredBlock filtered = ppf_fir_optimized(joined, coeffs, options.workers);
        const ChannelizedOutput chan =
            channelize_block(filtered, config.fft_fallback, options.workers);
        if (!chan.bins.empty()) {
            sink.write(reinterpret_cast<const char*>(chan.bins.data()),
                       static_cast<std::streamsize>(chan.bins.size() * sample_bytes));
            if (!sink)
                throw io_error("process_stream: sink write failed");
        }
        state.spectra_processed += chan.n_spectra;
        state.bytes_out += chan.n_spectra * spectrum_bytes;
    };

    for (;;) {
        source.read(io_buf.data(), static_cast<std::streamsize>(io_buf.size()));
        const std::size_t got = static_cast<std::size_t>(source.gcount());
        if (got == 0) {
            if (source.bad())
                throw decode_error("process_stream: source read failed", stream_offset);
            break;
        }

        const char* data = io_buf.data();
        std::size_t avail = got;

        // complete a sample split across reads
        if (!byte_carry.empty()) {
            const std::size_t need = sample_bytes - byte_carry.size();
            const std::size_t take = std::min(need, avail);
            byte_carry.insert(byte_carry.end(), data, data + take);
            data += take;
            avail -= take;
            if (byte_carry.size() == sample_bytes) {
                ComplexSample z;
                std::memcpy(&z, byte_carry.data(), sample_bytes);
                sample_carry.push_back(z);
                byte_carry.clear();
            }
        }

        const std::size_t full_samples = avail / sample_bytes;
        const std::size_t tail = avail % sample_bytes;
        const std::size_t old_size = sample_carry.size();
        sample_carry.resize(old_size + full_samples);
        std::memcpy(sample_carry.data() + old_size, data, full_samples * sample_bytes);
        if (tail != 0)
            byte_carry.assign(data + full_samples * sample_bytes, data + avail);
        stream_offset += got;

        const std::size_t full_spectra = sample_carry.size() / n_channels;
        if (full_spectra != 0) {
            block.samples.assign(sample_carry.begin(),
                                 sample_carry.begin() +
                                     static_cast<std::ptrdiff_t>(full_spectra * n_channels));
            sample_carry.erase(sample_carry.begin(),
                               sample_carry.begin() +
                                   static_cast<std::ptrdiff_t>(full_spectra * n_channels));
            state.bytes_in += full_spectra * spectrum_bytes;
            process_block();
        }

        if (source.eof())
            break;
    }

    if (!byte_carry.empty())
        throw decode_error("process_stream: stream truncated mid-sample",
                           stream_offset - byte_carry.size());
    // trailing samples that never completed a spectrum are discarded
    state.dropped_samples += sample_carry.size();

    sink.flush();
    if (!sink)
        throw io_error("process_stream: sink flush failed");
    return state;
}

} // namespace ppf
