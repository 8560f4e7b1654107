// Polyphase filter bank channelizer CLI: coefficient design, stream
// processing, spectra inspection, and throughput benchmarking.

#include <CLI11.hpp>

#include "ppf/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ppf: streaming polyphase filter bank channelizer"};
    app.require_subcommand(1);

    ppf::cli::CoeffArgs coeff;
    auto* coeff_cmd = app.add_subcommand("coeff", "Design prototype FIR coefficients");
    coeff_cmd->add_option("--channels", coeff.channels, "Number of channels")->required();
    coeff_cmd->add_option("--taps", coeff.taps, "Number of taps")->required();
    coeff_cmd->add_option("--beta", coeff.beta, "Kaiser window shape parameter");
    coeff_cmd->add_option("--out", coeff.out, "Output file (default: standard output)");
    coeff_cmd->add_flag("--text", coeff.text, "Emit one coefficient per line in decimal");

    ppf::cli::RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Channelize a raw complex sample stream");
    run_cmd->add_option("input", run.input, "Input file: little-endian interleaved f32 complex")
        ->required();
    run_cmd->add_option("--out", run.out, "Output file (default: standard output)");
    run_cmd->add_option("--channels", run.channels, "Number of channels");
    run_cmd->add_option("--taps", run.taps, "Number of taps");
    run_cmd->add_option("--beta", run.beta, "Kaiser window shape parameter");
    run_cmd->add_option("--coeff-file", run.coeff_file, "Coefficient file (wins over inline flags)");
    run_cmd->add_option("--block-spectra", run.block_spectra, "Spectra per processing block");
    run_cmd->add_option("--rate-bytes", run.rate_bytes, "Reference data rate in bytes/s");
    run_cmd->add_option("--workers", run.workers, "Worker threads");
    run_cmd->add_flag("--zero-prime", run.zero_prime,
                      "Pre-fill the tap history with zeros (one output per input spectrum)");
    run_cmd->add_flag("--meta", run.meta, "Write a key=value sidecar next to --out");

    ppf::cli::BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Measure throughput over a config sweep");
    bench_cmd->add_option("--channels", bench.channels, "Channel counts (comma separated)")
        ->required()
        ->delimiter(',');
    bench_cmd->add_option("--taps", bench.taps, "Tap counts (comma separated)")
        ->required()
        ->delimiter(',');
    bench_cmd->add_option("--bytes", bench.bytes, "Input bytes per configuration");
    bench_cmd->add_option("--workers", bench.workers, "Worker threads");
    bench_cmd->add_option("--reps", bench.reps, "Timed repetitions per configuration");
    bench_cmd->add_option("--beta", bench.beta, "Kaiser window shape parameter");
    bench_cmd->add_option("--block-spectra", bench.block_spectra, "Spectra per processing block");
    bench_cmd->add_option("--rate-bytes", bench.rate_bytes, "Reference data rate in bytes/s");
    bench_cmd->add_option("--format", bench.format, "Report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    bench_cmd->add_option("--out", bench.out, "Output file (default: standard output)");

    ppf::cli::InspectArgs inspect;
    auto* inspect_cmd = app.add_subcommand("inspect", "Summarize channelized output power");
    inspect_cmd->add_option("input", inspect.input, "Channelized output file")->required();
    inspect_cmd->add_option("--channels", inspect.channels, "Number of channels")->required();
    inspect_cmd->add_option("--top", inspect.top, "How many top channels to list");
    inspect_cmd->add_flag("--csv", inspect.csv, "Emit per-spectrum per-channel power rows");
    inspect_cmd->add_option("--out", inspect.out, "Output file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ppf::cli::kExitUsage;
    }

    if (coeff_cmd->parsed())
        return ppf::cli::cmd_coeff(coeff);
    if (run_cmd->parsed())
        return ppf::cli::cmd_run(run);
    if (bench_cmd->parsed())
        return ppf::cli::cmd_bench(bench);
    if (inspect_cmd->parsed())
        return ppf::cli::cmd_inspect(inspect);
    return ppf::cli::kExitUsage;
}
