#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ppf/errors.hpp"
#include "ppf/pipeline.hpp"

namespace ppf {

/// Multiples of real-time: seconds of stream processed per second of wall
/// time.
inline double realtime_multiple(double data_seconds, double wall_seconds) {
    if (!(data_seconds > 0.0) || !(wall_seconds > 0.0))
        throw std::domain_error("realtime_multiple: arguments must be > 0");
    return data_seconds / wall_seconds;
}

/// Seconds of stream represented by `bytes` at the reference data rate.
inline double data_seconds(std::uint64_t bytes, std::uint64_t reference_rate_bytes_per_sec) {
    if (bytes == 0 || reference_rate_bytes_per_sec == 0)
        throw std::domain_error("data_seconds: arguments must be > 0");
    return static_cast<double>(bytes) / static_cast<double>(reference_rate_bytes_per_sec);
}

struct BenchmarkReport {
    PpfConfig config;
    double wall_compute_sec = 0.0;
    double wall_end_to_end_sec = 0.0;
    double data_seconds = 0.0;
    double m_b = 0.0;
    double m_c = 0.0;
    double gflops_per_sec = 0.0;
    double bandwidth_gb_per_sec = 0.0;
    unsigned workers = 1;
    std::uint64_t flops_fir = 0;
    std::uint64_t flops_dft = 0;
    std::uint64_t bytes_in = 0;
    std::uint64_t bytes_out = 0;
};

struct BenchOptions {
    unsigned repetitions = 5;     // timed repetitions; the median is reported
    std::uint64_t seed = 0x5eed5eedULL;
    std::function<double()> now;  // injectable timer; defaults to steady_clock
    std::filesystem::path scratch_dir = std::filesystem::temp_directory_path();
};

namespace detail {

inline double steady_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

inline double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const std::size_t n = xs.size();
    return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

inline std::vector<ComplexSample> synth_noise(std::size_t count, std::uint64_t seed) {
    std::mt19937 eng(static_cast<std::mt19937::result_type>(seed));
    std::normal_distribution<float> dist(0.0f, 1.0f);
    std::vector<ComplexSample> samples(count);
    for (auto& z : samples)
        z = ComplexSample(dist(eng), dist(eng));
    return samples;
}

inline std::filesystem::path scratch_file(const std::filesystem::path& dir,
                                          const char* suffix) {
    static std::atomic<std::uint64_t> counter{0};
    static const std::uint64_t run_tag = std::random_device{}();
    return dir / ("ppf-bench-" + std::to_string(run_tag) + "-" +
                  std::to_string(counter.fetch_add(1)) + suffix);
}

} // namespace detail

/// Run both timing modes on reproducible synthetic noise: compute-only
/// (input memory-resident, FIR + DFT) and end-to-end (decode from storage,
/// process, encode back to storage). Each timing is the median of
/// `repetitions` runs after one discarded warm-up.
inline BenchmarkReport run_benchmark(const PpfConfig& config, std::size_t total_spectra,
                                     unsigned workers, const BenchOptions& options = {}) {
    config.validate();
    if (workers == 0)
        throw config_error("run_benchmark: workers must be >= 1");
    if (total_spectra < config.n_taps)
        throw config_error("run_benchmark: total_spectra must be >= n_taps");
    if (options.repetitions == 0)
        throw config_error("run_benchmark: repetitions must be >= 1");
    const std::function<double()> now = options.now ? options.now : detail::steady_seconds;

    const std::size_t n_channels = config.n_channels;
    const std::size_t n_taps = config.n_taps;
    const std::size_t n_out = total_spectra - n_taps + 1;
    const std::size_t spectrum_bytes = n_channels * sizeof(float) * 2;

    const std::vector<ComplexSample> samples =
        detail::synth_noise(total_spectra * n_channels, options.seed);
    const FilterCoefficients coeffs =
        generate_prototype(n_channels, n_taps, config.window);

    BenchmarkReport report;
    report.config = config;
    report.workers = workers;
    report.bytes_in = static_cast<std::uint64_t>(total_spectra) * spectrum_bytes;
    report.bytes_out = static_cast<std::uint64_t>(n_out) * spectrum_bytes;
    report.flops_fir = flops_for_fir(n_channels, n_taps, n_out);
    report.flops_dft = flops_for_dft(n_channels, n_out);
    report.data_seconds = data_seconds(report.bytes_in, config.reference_rate_bytes_per_sec);

    // compute-only pass: block-partitioned FIR + DFT over the resident input
    double checksum = 0.0;
    auto compute_pass = [&]() {
        StreamState state;
        SampleBlock block;
        block.n_channels = n_channels;
        std::uint64_t emitted = 0;
        for (std::size_t s = 0; s < total_spectra; s += config.block_spectra) {
            const std::size_t n = std::min(config.block_spectra, total_spectra - s);
            block.samples.assign(samples.begin() + static_cast<std::ptrdiff_t>(s * n_channels),
                                 samples.begin() +
                                     static_cast<std::ptrdiff_t>((s + n) * n_channels));
            const SampleBlock joined = carry_history(state, block, n_taps);
            if (joined.n_spectra() < n_taps)
                continue;
            const FilteredBlock filtered = ppf_fir_optimized(joined, coeffs, workers);
            const ChannelizedOutput chan =
                channelize_block(filtered, config.fft_fallback, workers);
            emitted += chan.n_spectra;
            if (!chan.bins.empty())
                checksum += chan.bins.front().real();
        }
        return emitted;
    };

    if (compute_pass() != n_out) // warm-up, and a sanity check of the accounting
        throw std::logic_error("run_benchmark: compute pass emitted unexpected spectra count");
    std::vector<double> compute_times(options.repetitions);
    for (auto& t : compute_times) {
        const double t0 = now();
        compute_pass();
        const double t1 = now();
        t = t1 - t0;
    }

    // end-to-end pass: decode from file, process, encode to file
    const auto in_path = detail::scratch_file(options.scratch_dir, "-in.raw");
    const auto out_path = detail::scratch_file(options.scratch_dir, "-out.raw");
    {
        std::ofstream fout(in_path, std::ios::binary | std::ios::trunc);
        fout.write(reinterpret_cast<const char*>(samples.data()),
                   static_cast<std::streamsize>(samples.size() * sizeof(ComplexSample)));
        if (!fout)
            throw io_error("run_benchmark: cannot stage benchmark input file");
    }
    std::vector<double> e2e_times(options.repetitions);
    StreamOptions stream_options;
    stream_options.workers = workers;
    for (std::size_t rep = 0; rep <= e2e_times.size(); ++rep) {
        std::ifstream fin(in_path, std::ios::binary);
        std::ofstream fout(out_path, std::ios::binary | std::ios::trunc);
        if (!fin || !fout)
            throw io_error("run_benchmark: cannot open scratch files");
        if (rep == 0) { // warm-up
            process_stream(config, fin, fout, stream_options);
            continue;
        }
        const double t0 = now();
        const StreamState st = process_stream(config, fin, fout, stream_options);
        fout.close();
        const double t1 = now();
        if (st.spectra_processed != n_out)
            throw std::logic_error("run_benchmark: end-to-end pass emitted unexpected spectra count");
        e2e_times[rep - 1] = t1 - t0;
    }
    std::error_code ec;
    std::filesystem::remove(in_path, ec);
    std::filesystem::remove(out_path, ec);

    report.wall_compute_sec = detail::median(compute_times);
    // end-to-end includes the compute by definition; measurement noise on
    // small workloads must not report it faster
    report.wall_end_to_end_sec = std::max(detail::median(e2e_times), report.wall_compute_sec);
    report.m_c = realtime_multiple(report.data_seconds, report.wall_compute_sec);
    report.m_b = realtime_multiple(report.data_seconds, report.wall_end_to_end_sec);
    report.gflops_per_sec = static_cast<double>(report.flops_fir + report.flops_dft) /
                            report.wall_compute_sec / 1e9;
    report.bandwidth_gb_per_sec = static_cast<double>(report.bytes_in + report.bytes_out) /
                                  report.wall_compute_sec / 1e9;
    (void)checksum;
    return report;
}

struct SweepEntry {
    std::size_t n_channels = 0;
    std::size_t n_taps = 0;
    std::optional<BenchmarkReport> report;
    std::string error;
};

/// One benchmark per (n_channels, n_taps) shape, each fed the same total
/// byte count. Failures are recorded in place and the sweep continues.
inline std::vector<SweepEntry> sweep(const PpfConfig& base,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& shapes,
                                     std::uint64_t total_bytes, unsigned workers,
                                     const BenchOptions& options = {}) {
    if (shapes.empty())
        throw config_error("sweep: shape list must not be empty");
    std::vector<SweepEntry> entries;
    entries.reserve(shapes.size());
    for (const auto& [n_channels, n_taps] : shapes) {
        SweepEntry entry;
        entry.n_channels = n_channels;
        entry.n_taps = n_taps;
        try {
            PpfConfig config = base;
            config.n_channels = n_channels;
            config.n_taps = n_taps;
            const std::size_t spectrum_bytes = n_channels * sizeof(float) * 2;
            if (spectrum_bytes == 0 || total_bytes / spectrum_bytes == 0)
                throw config_error("sweep: total_bytes too small for one spectrum");
            entry.report = run_benchmark(config, total_bytes / spectrum_bytes, workers, options);
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

// --- report serialization ------------------------------------------------

inline nlohmann::json to_json(const BenchmarkReport& report) {
    return nlohmann::json{
        {"config",
         {{"n_channels", report.config.n_channels},
          {"n_taps", report.config.n_taps},
          {"window",
           {{"kind",
             report.config.window.kind == WindowSpec::Kind::rectangular ? "rectangular"
                                                                        : "kaiser"},
            {"beta", report.config.window.beta}}},
          {"block_spectra", report.config.block_spectra},
          {"reference_rate_bytes_per_sec", report.config.reference_rate_bytes_per_sec},
          {"fft_fallback", report.config.fft_fallback}}},
        {"wall_compute_sec", report.wall_compute_sec},
        {"wall_end_to_end_sec", report.wall_end_to_end_sec},
        {"data_seconds", report.data_seconds},
        {"m_b", report.m_b},
        {"m_c", report.m_c},
        {"gflops_per_sec", report.gflops_per_sec},
        {"bandwidth_gb_per_sec", report.bandwidth_gb_per_sec},
        {"workers", report.workers},
        {"flops_fir", report.flops_fir},
        {"flops_dft", report.flops_dft},
        {"bytes_in", report.bytes_in},
        {"bytes_out", report.bytes_out},
    };
}

inline std::string csv_header() {
    return "n_channels,n_taps,workers,m_b,m_c,gflops_per_sec,bandwidth_gb_per_sec";
}

inline std::string to_csv_row(const BenchmarkReport& report) {
    char row[256];
    std::snprintf(row, sizeof(row), "%zu,%zu,%u,%.9g,%.9g,%.9g,%.9g",
                  report.config.n_channels, report.config.n_taps, report.workers, report.m_b,
                  report.m_c, report.gflops_per_sec, report.bandwidth_gb_per_sec);
    return row;
}

} // namespace ppf
