#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "ppf/bench.hpp"
#include "ppf/coeff.hpp"
#include "ppf/errors.hpp"
#include "ppf/pipeline.hpp"

namespace ppf::cli {

// Stable exit codes: 0 success, 2 usage/config, 3 write failure,
// 4 malformed data.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitWriteFailure = 3;
inline constexpr int kExitBadData = 4;

namespace detail {

template <typename Fn>
int run_guarded(Fn&& fn, std::ostream& diag) {
    try {
        return fn();
    } catch (const decode_error& e) {
        diag << "error: " << e.what() << "\n";
        return kExitBadData;
    } catch (const io_error& e) {
        diag << "error: " << e.what() << "\n";
        return kExitWriteFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        diag << "error: " << e.what() << "\n";
        return kExitWriteFailure;
    } catch (const config_error& e) {
        diag << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        diag << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        diag << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace detail

struct CoeffArgs {
    std::size_t channels = 0;
    std::size_t taps = 0;
    double beta = kDefaultKaiserBeta;
    std::string out;      // empty: standard output
    bool text = false;
};

inline int cmd_coeff(const CoeffArgs& args, std::ostream& diag = std::cerr) {
    return detail::run_guarded(
        [&] {
            // generate before opening the output so config errors leave no file
            const FilterCoefficients coeffs =
                generate_prototype(args.channels, args.taps, WindowSpec::kaiser(args.beta));
            std::ofstream file;
            std::ostream* out = &std::cout;
            if (!args.out.empty()) {
                file.open(args.out, std::ios::binary | std::ios::trunc);
                if (!file)
                    throw io_error("coeff: cannot open output file " + args.out);
                out = &file;
            }
            if (args.text)
                write_coefficients_text(*out, coeffs);
            else
                write_coefficients(*out, coeffs, args.beta);
            out->flush();
            if (!*out)
                throw io_error("coeff: write failed");
            return kExitOk;
        },
        diag);
}

struct RunArgs {
    std::string input;
    std::string out;      // empty: standard output
    std::size_t channels = 0;
    std::size_t taps = 0;
    double beta = kDefaultKaiserBeta;
    std::string coeff_file;
    std::size_t block_spectra = kDefaultBlockSpectra;
    std::uint64_t rate_bytes = kDefaultReferenceRate;
    unsigned workers = 1;
    bool zero_prime = false;
    bool meta = false;
};

inline int cmd_run(const RunArgs& args, std::ostream& diag = std::cerr) {
    return detail::run_guarded(
        [&] {
            PpfConfig config;
            config.n_channels = args.channels;
            config.n_taps = args.taps;
            config.window = WindowSpec::kaiser(args.beta);
            config.block_spectra = args.block_spectra;
            config.reference_rate_bytes_per_sec = args.rate_bytes;
            double beta = args.beta;

            FilterCoefficients file_coeffs;
            bool have_file_coeffs = false;
            if (!args.coeff_file.empty()) {
                std::ifstream cf(args.coeff_file, std::ios::binary);
                if (!cf)
                    throw config_error("run: coefficient file not found: " + args.coeff_file);
                CoefficientFile loaded = read_coefficients(cf);
                if (args.channels != 0 && args.channels != loaded.coeffs.n_channels)
                    diag << "warning: --channels disagrees with coefficient file; file wins\n";
                if (args.taps != 0 && args.taps != loaded.coeffs.n_taps)
                    diag << "warning: --taps disagrees with coefficient file; file wins\n";
                config.n_channels = loaded.coeffs.n_channels;
                config.n_taps = loaded.coeffs.n_taps;
                beta = loaded.beta;
                file_coeffs = std::move(loaded.coeffs);
                have_file_coeffs = true;
            }
            config.block_spectra = std::max(config.block_spectra, config.n_taps);
            config.validate();
            if (args.meta && args.out.empty())
                throw config_error("run: --meta needs --out to name the sidecar file");

            std::ifstream input(args.input, std::ios::binary);
            if (!input)
                throw config_error("run: input file not found: " + args.input);

            std::ofstream file;
            std::ostream* sink = &std::cout;
            if (!args.out.empty()) {
                file.open(args.out, std::ios::binary | std::ios::trunc);
                if (!file)
                    throw io_error("run: cannot open output file " + args.out);
                sink = &file;
            }

            StreamOptions options;
            options.workers = args.workers;
            options.zero_prime = args.zero_prime;
            if (have_file_coeffs)
                options.coefficients = &file_coeffs;
            const StreamState state = process_stream(config, input, *sink, options);
            if (state.dropped_samples != 0)
                diag << "warning: discarded " << state.dropped_samples
                     << " trailing samples of a partial spectrum\n";

            if (args.meta) {
                std::ofstream meta(args.out + ".meta", std::ios::trunc);
                meta << "nChannels=" << config.n_channels << "\n"
                     << "nTaps=" << config.n_taps << "\n"
                     << "beta=" << beta << "\n"
                     << "spectraProcessed=" << state.spectra_processed << "\n"
                     << "bytesIn=" << state.bytes_in << "\n"
                     << "bytesOut=" << state.bytes_out << "\n";
                if (!meta)
                    throw io_error("run: cannot write sidecar metadata");
            }
            return kExitOk;
        },
        diag);
}

struct BenchArgs {
    std::vector<std::size_t> channels;
    std::vector<std::size_t> taps;
    std::uint64_t bytes = 65'000'000; // 10 ms of the reference stream
    unsigned workers = 1;
    unsigned reps = 5;
    double beta = kDefaultKaiserBeta;
    std::size_t block_spectra = kDefaultBlockSpectra;
    std::uint64_t rate_bytes = kDefaultReferenceRate;
    std::string format = "json";
    std::string out;      // empty: standard output
};

inline int cmd_bench(const BenchArgs& args, std::ostream& diag = std::cerr) {
    return detail::run_guarded(
        [&] {
            if (args.channels.empty() || args.taps.empty())
                throw config_error("bench: need at least one --channels and one --taps value");
            if (args.format != "json" && args.format != "csv")
                throw config_error("bench: format must be json or csv");

            PpfConfig base;
            base.window = WindowSpec::kaiser(args.beta);
            base.block_spectra = args.block_spectra;
            base.reference_rate_bytes_per_sec = args.rate_bytes;

            std::vector<std::pair<std::size_t, std::size_t>> shapes;
            for (std::size_t c : args.channels)
                for (std::size_t t : args.taps)
                    shapes.emplace_back(c, t);

            diag << "note: m_b times end-to-end storage decode/encode around the compute;\n"
                    "note: bandwidth counts both input and output bytes over compute time\n";

            BenchOptions options;
            options.repetitions = args.reps;

            std::ofstream file;
            std::ostream* out = &std::cout;
            if (!args.out.empty()) {
                file.open(args.out, std::ios::trunc);
                if (!file)
                    throw io_error("bench: cannot open output file " + args.out);
                out = &file;
            }

            const auto entries = sweep(base, shapes, args.bytes, args.workers, options);
            if (args.format == "csv")
                *out << csv_header() << "\n";
            std::size_t emitted = 0;
            for (const auto& entry : entries) {
                if (!entry.report) {
                    diag << "error: bench " << entry.n_channels << "x" << entry.n_taps << ": "
                         << entry.error << "\n";
                    continue;
                }
                if (args.format == "csv")
                    *out << to_csv_row(*entry.report) << "\n";
                else
                    *out << to_json(*entry.report).dump() << "\n";
                ++emitted;
            }
            out->flush();
            if (!*out)
                throw io_error("bench: write failed");
            return emitted != 0 ? kExitOk : kExitUsage;
        },
        diag);
}

struct InspectArgs {
    std::string input;
    std::size_t channels = 0;
    std::size_t top = 8;
    bool csv = false;
    std::string out;      // empty: standard output
};

inline int cmd_inspect(const InspectArgs& args, std::ostream& diag = std::cerr) {
    return detail::run_guarded(
        [&] {
            if (args.channels == 0)
                throw config_error("inspect: --channels must be >= 1");
            if (args.top == 0)
                throw config_error("inspect: --top must be >= 1");
            std::ifstream input(args.input, std::ios::binary | std::ios::ate);
            if (!input)
                throw config_error("inspect: input file not found: " + args.input);
            const std::uint64_t size = static_cast<std::uint64_t>(input.tellg());
            input.seekg(0);

            const std::size_t spectrum_bytes = args.channels * sizeof(ComplexSample);
            if (size % spectrum_bytes != 0)
                throw decode_error("inspect: file length is not a whole number of spectra",
                                   size - size % spectrum_bytes);
            const std::size_t n_spectra = size / spectrum_bytes;

            std::vector<ComplexSample> bins(n_spectra * args.channels);
            input.read(reinterpret_cast<char*>(bins.data()), static_cast<std::streamsize>(size));
            if (static_cast<std::uint64_t>(input.gcount()) != size)
                throw decode_error("inspect: short read", static_cast<std::size_t>(input.gcount()));

            std::ofstream file;
            std::ostream* out = &std::cout;
            if (!args.out.empty()) {
                file.open(args.out, std::ios::trunc);
                if (!file)
                    throw io_error("inspect: cannot open output file " + args.out);
                out = &file;
            }

            if (args.csv) {
                *out << "spectrum,channel,power\n";
                char row[96];
                for (std::size_t s = 0; s < n_spectra; ++s) {
                    for (std::size_t c = 0; c < args.channels; ++c) {
                        const ComplexSample z = bins[s * args.channels + c];
                        const double p = static_cast<double>(z.real()) * z.real() +
                                         static_cast<double>(z.imag()) * z.imag();
                        std::snprintf(row, sizeof(row), "%zu,%zu,%.9g\n", s, c, p);
                        *out << row;
                    }
                }
                out->flush();
                if (!*out)
                    throw io_error("inspect: write failed");
                return kExitOk;
            }

            std::vector<double> mean_power(args.channels, 0.0);
            for (std::size_t s = 0; s < n_spectra; ++s) {
                for (std::size_t c = 0; c < args.channels; ++c) {
                    const ComplexSample z = bins[s * args.channels + c];
                    mean_power[c] += static_cast<double>(z.real()) * z.real() +
                                     static_cast<double>(z.imag()) * z.imag();
                }
            }
            if (n_spectra != 0)
                for (double& p : mean_power)
                    p /= static_cast<double>(n_spectra);

            char row[96];
            *out << "spectra: " << n_spectra << "\n";
            *out << " channel     mean_power\n";
            for (std::size_t c = 0; c < args.channels; ++c) {
                std::snprintf(row, sizeof(row), "%8zu %14.6e\n", c, mean_power[c]);
                *out << row;
            }

            std::vector<std::size_t> order(args.channels);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return mean_power[a] > mean_power[b];
            });
            const std::size_t top = std::min(args.top, args.channels);
            *out << "top " << top << " channels by mean power:\n";
            *out << "    rank  channel     mean_power\n";
            for (std::size_t r = 0; r < top; ++r) {
                std::snprintf(row, sizeof(row), "%8zu %8zu %14.6e\n", r + 1, order[r],
                              mean_power[order[r]]);
                *out << row;
            }
            out->flush();
            if (!*out)
                throw io_error("inspect: write failed");
            return kExitOk;
        },
        diag);
}

} // namespace ppf::cli
