// sspalin: SSPA predistortion experiments from the command line.
//
//   sspalin simulate --modulation qam16 --out report.csv --spectra-out spectra.csv
//   sspalin sweep    --out report.csv
//   sspalin curves   --bins 64 --out curves.csv
//   sspalin identify --truth 1,0,-0.05,0.01,0.002,0 --mu 0.05 --out identify.csv
//
// Every flag can also come from `--config FILE` (key = value lines); flags win.
// Exit codes: 0 ok, 1 config error, 2 runtime or divergence error.

#include <sspa/harness.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <map>
#include <string>

namespace {

using sspa::harness::ConfigError;
using sspa::harness::ErrorKind;
using sspa::harness::ExperimentConfig;
using sspa::harness::StageError;

constexpr int exit_config = 1;
constexpr int exit_runtime = 2;

struct Flags {
    std::string config;
    std::map<std::string, std::string> values;
};

void add_flag(CLI::App& cmd, Flags& flags, const std::string& key, const std::string& help)
{
    cmd.add_option("--" + key, flags.values[key], help);
}

void add_shared(CLI::App& cmd, Flags& flags)
{
    cmd.add_option("--config", flags.config, "key = value settings file");
    add_flag(cmd, flags, "symbols", "symbols per record");
    add_flag(cmd, flags, "sps", "samples per symbol");
    add_flag(cmd, flags, "rolloff", "RRC rolloff");
    add_flag(cmd, flags, "span", "RRC span in symbols");
    add_flag(cmd, flags, "drive", "peak amplitude into the amplifier");
    add_flag(cmd, flags, "dpd-order", "number of odd-order terms");
    add_flag(cmd, flags, "mu", "NLMS step size");
    add_flag(cmd, flags, "eps", "NLMS regularizer");
    add_flag(cmd, flags, "passes", "training sweeps over the record");
    add_flag(cmd, flags, "gate", "training amplitude gate, fraction of peak");
    add_flag(cmd, flags, "target-gain", "desired linear gain G");
    add_flag(cmd, flags, "seed-train", "training record seed");
    add_flag(cmd, flags, "seed-eval", "evaluation record seed");
    add_flag(cmd, flags, "pa", "amplifier model: ghorbani | poly");
    add_flag(cmd, flags, "pa-poly", "polynomial PA coefficients a1r,a1i,a3r,a3i,...");
    add_flag(cmd, flags, "phase-unit", "AM/PM unit: degrees | radians");
    add_flag(cmd, flags, "segment-len", "Welch segment length");
    add_flag(cmd, flags, "out", "output CSV");
}

void apply_flags(ExperimentConfig& cfg, const CLI::App& cmd, const Flags& flags)
{
    if (!flags.config.empty()) {
        sspa::harness::load_config_file(cfg, flags.config);
    }
    for (const auto& [key, value] : flags.values) {
        if (cmd.count("--" + key) > 0) {
            sspa::harness::apply_setting(cfg, key, value);
        }
    }
}

void print_report(const sspa::harness::ExperimentReport& report)
{
    fmt::print("config digest {:016x}  seeds train={} eval={}\n", report.config_digest,
               report.seed_train, report.seed_eval);
    fmt::print("{:<6} {:>12} {:>12} {:>12} {:>10} {:>10}\n", "mod", "ACP before", "ACP after",
               "improvement", "EVM before", "EVM after");
    for (const auto& r : report.rows) {
        if (r.error) {
            fmt::print("{:<6} failed: {}\n", sspa::modem::to_string(r.modulation), *r.error);
            continue;
        }
        fmt::print("{:<6} {:>9.2f} dB {:>9.2f} dB {:>9.2f} dB {:>9.2f}% {:>9.2f}%\n",
                   sspa::modem::to_string(r.modulation), r.acp_before_db, r.acp_after_db,
                   r.improvement_db, r.evm_before_pct, r.evm_after_pct);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SSPA linearization by NLMS-trained polynomial predistortion"};
    app.require_subcommand(1);

    Flags sim_flags, sweep_flags, curve_flags, id_flags;

    auto* simulate = app.add_subcommand("simulate", "one modulation, before/after predistortion");
    add_shared(*simulate, sim_flags);
    add_flag(*simulate, sim_flags, "modulation", "bpsk | qpsk | psk8 | qam16");
    add_flag(*simulate, sim_flags, "spectra-out", "spectra CSV");

    auto* sweep = app.add_subcommand("sweep", "all four modulations");
    add_shared(*sweep, sweep_flags);
    add_flag(*sweep, sweep_flags, "spectra-out", "spectra CSV (suffixed per modulation)");

    auto* curves = app.add_subcommand("curves", "AM/AM and AM/PM curves of PA, PD and cascade");
    add_shared(*curves, curve_flags);
    add_flag(*curves, curve_flags, "modulation", "bpsk | qpsk | psk8 | qam16");
    add_flag(*curves, curve_flags, "bins", "amplitude bins");

    auto* identify = app.add_subcommand("identify", "NLMS fit of a synthetic polynomial PA");
    add_shared(*identify, id_flags);
    add_flag(*identify, id_flags, "modulation", "bpsk | qpsk | psk8 | qam16");
    add_flag(*identify, id_flags, "truth", "true coefficients a1r,a1i,a3r,a3i,...");
    add_flag(*identify, id_flags, "identify-order", "odd-order terms fitted (default max(truth, 3))");
    add_flag(*identify, id_flags, "noise", "RMS complex noise added to the PA output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    ExperimentConfig cfg;
    try {
        if (simulate->parsed()) {
            apply_flags(cfg, *simulate, sim_flags);
            print_report(sspa::harness::run_experiment(cfg));
        } else if (sweep->parsed()) {
            apply_flags(cfg, *sweep, sweep_flags);
            const auto report = sspa::harness::run_sweep(cfg);
            print_report(report);
            for (const auto& r : report.rows) {
                if (r.error) {
                    return exit_runtime;
                }
            }
        } else if (curves->parsed()) {
            apply_flags(cfg, *curves, curve_flags);
            const auto set = sspa::harness::run_curves(cfg);
            if (cfg.outputs.out.empty()) {
                sspa::harness::write_curves_csv(std::cout, set);
            }
        } else if (identify->parsed()) {
            apply_flags(cfg, *identify, id_flags);
            const auto rep = sspa::harness::run_identify(cfg, cfg.identify_truth);
            sspa::harness::write_identify_csv(std::cout, rep);
            fmt::print("excess MSE {:.3e}", rep.excess_mse);
            if (rep.misadjustment) {
                fmt::print("  misadjustment {:.4f}", *rep.misadjustment);
            }
            fmt::print("\n");
        }
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return exit_config;
    } catch (const StageError& e) {
        fmt::print(stderr, "error in {}\n", e.what());
        return e.kind() == ErrorKind::Config ? exit_config : exit_runtime;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_runtime;
    }
    return 0;
}
