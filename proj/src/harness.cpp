#include <sspa/harness.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace sspa::harness {

StageError::StageError(std::string stage, ErrorKind kind, const std::string& what)
    : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), kind_(kind)
{
}

namespace {

template <typename F>
auto run_stage(const char* name, F&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const dpd::DivergenceError& e) {
        throw StageError(name, ErrorKind::Divergence, e.what());
    } catch (const ConfigError& e) {
        throw StageError(name, ErrorKind::Config, e.what());
    } catch (const std::invalid_argument& e) {
        throw StageError(name, ErrorKind::Config, e.what());
    } catch (const std::out_of_range& e) {
        throw StageError(name, ErrorKind::Config, e.what());
    } catch (const std::exception& e) {
        throw StageError(name, ErrorKind::Runtime, e.what());
    }
}

template <typename F>
void checked(F&& fn)
{
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

double round6(double v) { return std::round(v * 1e6) / 1e6; }

std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw StageError("output", ErrorKind::Runtime,
                         fmt::format("cannot open '{}' for writing", path.string()));
    }
    return os;
}

std::filesystem::path with_suffix(const std::filesystem::path& p, std::string_view suffix)
{
    auto out = p;
    out.replace_filename(fmt::format("{}_{}{}", p.stem().string(), suffix,
                                     p.extension().string()));
    return out;
}

dpd::DpdTrainConfig indirect_config(const ExperimentConfig& cfg)
{
    auto d = cfg.dpd;
    d.mode = dpd::TrainMode::Indirect;
    return d;
}

std::vector<cplx> matched_symbols(const ExperimentConfig& cfg, const ComplexEnvelope& env,
                                  std::size_t n, cplx gain)
{
    auto rx = modem::matched_filter_downsample(env, cfg.pulse, n);
    const cplx inv = 1.0 / gain;
    for (auto& s : rx) {
        s *= inv;
    }
    return rx;
}

} // namespace

void ExperimentConfig::validate() const
{
    if (n_symbols == 0) {
        throw ConfigError("symbols must be >= 1");
    }
    checked([&] { pulse.validate(); });
    if (!(drive > 0.0 && drive <= 1.2)) {
        throw ConfigError(fmt::format(
            "drive {} outside (0, 1.2]; the SSPA model is only monotone up to 1.2", drive));
    }
    if (seed_train == seed_eval) {
        throw ConfigError("seed-train and seed-eval must differ for out-of-sample evaluation");
    }
    checked([&] { ghorbani.validate(); });
    checked([&] { poly.validate(); });
    checked([&] { dpd.validate(); });
    checked([&] { welch.validate(); });
    const auto p = channel_plan();
    checked([&] { p.validate(); });
    if (curve_bins < 2) {
        throw ConfigError("bins must be >= 2");
    }
    if (!(identify_noise >= 0.0)) {
        throw ConfigError("noise must be nonnegative");
    }
    if (identify_truth.empty() || identify_truth.front() == cplx{0.0, 0.0}) {
        throw ConfigError("truth needs a nonzero linear coefficient");
    }
    const std::size_t record_len = n_symbols * pulse.sps + pulse.num_taps() - 1;
    if (record_len < welch.segment_len) {
        throw ConfigError(fmt::format("record of {} samples is shorter than the Welch segment ({})",
                                      record_len, welch.segment_len));
    }
    const double fs = static_cast<double>(pulse.sps);
    const double df = fs / static_cast<double>(welch.segment_len);
    const double reach = p.adjacent_offset + p.channel_width / 2.0;
    if (p.main_center - reach < -fs / 2.0 + df || p.main_center + reach > fs / 2.0) {
        throw ConfigError(fmt::format("adjacent bands reach ±{} but the sampled span is ±{}",
                                      reach, fs / 2.0));
    }
}

metrics::ChannelPlan ExperimentConfig::channel_plan() const
{
    return plan ? *plan : metrics::ChannelPlan::for_rolloff(pulse.rolloff);
}

dpd::Amplifier ExperimentConfig::amplifier_fn() const
{
    if (amplifier == AmplifierKind::Polynomial) {
        return [c = poly](const ComplexEnvelope& e) { return pa::apply_poly_pa(e, c); };
    }
    return [p = ghorbani](const ComplexEnvelope& e) { return pa::apply_sspa(e, p); };
}

std::string canonical_text(const ExperimentConfig& cfg)
{
    const auto p = cfg.channel_plan();
    std::string s;
    auto put = [&s](std::string_view k, const std::string& v) {
        s += fmt::format("{} = {}\n", k, v);
    };
    auto reals = [](const auto& arr) {
        std::string out;
        for (double v : arr) {
            out += fmt::format("{}{:.17g}", out.empty() ? "" : ",", v);
        }
        return out;
    };
    auto complexes = [](const std::vector<cplx>& arr) {
        std::string out;
        for (const auto& v : arr) {
            out += fmt::format("{}{:.17g},{:.17g}", out.empty() ? "" : ",", v.real(), v.imag());
        }
        return out;
    };
    put("modulation", std::string(modem::to_string(cfg.modulation)));
    put("symbols", std::to_string(cfg.n_symbols));
    put("sps", std::to_string(cfg.pulse.sps));
    put("rolloff", fmt::format("{:.17g}", cfg.pulse.rolloff));
    put("span", std::to_string(cfg.pulse.span_symbols));
    put("drive", fmt::format("{:.17g}", cfg.drive));
    put("pa", cfg.amplifier == AmplifierKind::Ghorbani ? "ghorbani" : "poly");
    put("pa-poly", complexes(cfg.poly.a));
    put("ghorbani-x", reals(cfg.ghorbani.x));
    put("ghorbani-y", reals(cfg.ghorbani.y));
    put("phase-unit", cfg.ghorbani.phase_unit == pa::PhaseUnit::Degrees ? "degrees" : "radians");
    put("dpd-order", std::to_string(cfg.dpd.order_k));
    put("mu", fmt::format("{:.17g}", cfg.dpd.mu));
    put("eps", fmt::format("{:.17g}", cfg.dpd.eps));
    put("passes", std::to_string(cfg.dpd.passes));
    put("gate", fmt::format("{:.17g}", cfg.dpd.min_amplitude_fraction));
    put("target-gain", fmt::format("{:.17g}", cfg.dpd.target_gain));
    put("segment-len", std::to_string(cfg.welch.segment_len));
    put("overlap", fmt::format("{:.17g}", cfg.welch.overlap_fraction));
    put("channel-width", fmt::format("{:.17g}", p.channel_width));
    put("adjacent-offset", fmt::format("{:.17g}", p.adjacent_offset));
    put("seed-train", std::to_string(cfg.seed_train));
    put("seed-eval", std::to_string(cfg.seed_eval));
    put("bins", std::to_string(cfg.curve_bins));
    put("noise", fmt::format("{:.17g}", cfg.identify_noise));
    put("truth", complexes(cfg.identify_truth));
    put("identify-order", cfg.identify_order ? std::to_string(*cfg.identify_order) : "auto");
    return s;
}

std::uint64_t config_digest(const ExperimentConfig& cfg)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_text(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Record make_record(const ExperimentConfig& cfg, std::uint64_t seed)
{
    const modem::ModulationScheme scheme{cfg.modulation};
    Record r;
    r.symbols = modem::map_symbols(gen_bits(seed, cfg.n_symbols * scheme.bits_per_symbol()), scheme);
    const auto shaped = modem::pulse_shape(r.symbols, cfg.pulse);
    const double peak = envelope_stats(shaped).peak;
    r.envelope = scale_to_peak(shaped, cfg.drive);
    r.scale = cfg.drive / peak;
    return r;
}

Simulation simulate(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto amp = cfg.amplifier_fn();
    const auto train = run_stage("training record", [&] { return make_record(cfg, cfg.seed_train); });
    const auto pd = run_stage("predistorter training", [&] {
        return dpd::train_predistorter(train.envelope, amp, indirect_config(cfg));
    });

    Simulation sim;
    sim.eval = run_stage("evaluation record", [&] { return make_record(cfg, cfg.seed_eval); });
    const auto& x = sim.eval.envelope;
    const auto out_before = run_stage("amplifier", [&] { return amp(x); });
    const auto out_after =
        run_stage("amplifier", [&] { return amp(dpd::apply_predistorter(x, pd)); });

    run_stage("spectrum", [&] {
        sim.spectrum_before = metrics::welch_psd(out_before, cfg.welch);
        sim.spectrum_after = metrics::welch_psd(out_after, cfg.welch);
        const auto plan = cfg.channel_plan();
        sim.row.acp_before = metrics::measure_acp(sim.spectrum_before, plan);
        sim.row.acp_after = metrics::measure_acp(sim.spectrum_after, plan);
        return 0;
    });
    run_stage("evm", [&] {
        const cplx gain = sim.eval.scale * cfg.dpd.target_gain;
        const auto n = sim.eval.symbols.size();
        sim.row.evm_before_pct =
            metrics::measure_evm(sim.eval.symbols, matched_symbols(cfg, out_before, n, gain));
        sim.row.evm_after_pct =
            metrics::measure_evm(sim.eval.symbols, matched_symbols(cfg, out_after, n, gain));
        return 0;
    });

    sim.row.modulation = cfg.modulation;
    sim.row.acp_before_db = sim.row.acp_before.acp_db;
    sim.row.acp_after_db = sim.row.acp_after.acp_db;
    sim.row.improvement_db = sim.row.acp_before_db - sim.row.acp_after_db;
    sim.row.predistorter = pd;
    return sim;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg)
{
    auto sim = simulate(cfg);
    ExperimentReport report;
    report.config_digest = config_digest(cfg);
    report.seed_train = cfg.seed_train;
    report.seed_eval = cfg.seed_eval;
    report.rows.push_back(std::move(sim.row));
    if (!cfg.outputs.out.empty()) {
        auto os = open_output(cfg.outputs.out);
        write_report_csv(os, report);
    }
    if (!cfg.outputs.spectra.empty()) {
        auto os = open_output(cfg.outputs.spectra);
        write_spectra_csv(os, sim.spectrum_before, sim.spectrum_after);
    }
    return report;
}

ExperimentReport run_sweep(const ExperimentConfig& base)
{
    base.validate();
    ExperimentReport report;
    report.config_digest = config_digest(base);
    report.seed_train = base.seed_train;
    report.seed_eval = base.seed_eval;
    for (const auto m : modem::all_modulations) {
        auto cfg = base;
        cfg.modulation = m;
        try {
            auto sim = simulate(cfg);
            if (!base.outputs.spectra.empty()) {
                auto os = open_output(with_suffix(base.outputs.spectra, modem::to_string(m)));
                write_spectra_csv(os, sim.spectrum_before, sim.spectrum_after);
            }
            report.rows.push_back(std::move(sim.row));
        } catch (const StageError& e) {
            ExperimentRow row;
            row.modulation = m;
            row.error = e.what();
            report.rows.push_back(std::move(row));
        }
    }
    if (!base.outputs.out.empty()) {
        auto os = open_output(base.outputs.out);
        write_report_csv(os, report);
    }
    return report;
}

CurveSet run_curves(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto amp = cfg.amplifier_fn();
    const auto train = run_stage("training record", [&] { return make_record(cfg, cfg.seed_train); });
    CurveSet set;
    set.coeffs = run_stage("predistorter training", [&] {
        return dpd::train_predistorter(train.envelope, amp, indirect_config(cfg));
    });
    const auto eval = run_stage("evaluation record", [&] { return make_record(cfg, cfg.seed_eval); });
    const auto& x = eval.envelope;
    run_stage("curves", [&] {
        const auto pd_out = dpd::apply_predistorter(x, set.coeffs);
        const double top = envelope_stats(x).peak;
        set.pa = metrics::extract_am_curves(x, amp(x), cfg.curve_bins, top);
        set.predistorter = metrics::extract_am_curves(x, pd_out, cfg.curve_bins, top);
        set.cascade = metrics::extract_am_curves(x, amp(pd_out), cfg.curve_bins, top);
        return 0;
    });
    if (!cfg.outputs.out.empty()) {
        auto os = open_output(cfg.outputs.out);
        write_curves_csv(os, set);
    }
    return set;
}

IdentifyReport run_identify(const ExperimentConfig& cfg, const std::vector<cplx>& truth)
{
    cfg.validate();
    if (truth.empty() || truth.front() == cplx{0.0, 0.0}) {
        throw ConfigError("truth needs a nonzero linear coefficient");
    }
    const auto rec = run_stage("identification record", [&] { return make_record(cfg, cfg.seed_train); });
    const auto& x = rec.envelope;
    const pa::PolyPaCoeffs truth_pa{truth};
    const auto clean = pa::apply_poly_pa(x, truth_pa);

    // Box-Muller over raw mt19937_64 words keeps the noise reproducible
    // across standard libraries.
    std::vector<cplx> noise(x.size(), cplx{0.0, 0.0});
    double noise_power = 0.0;
    if (cfg.identify_noise > 0.0) {
        std::mt19937_64 rng(cfg.seed_eval ^ 0x9e3779b97f4a7c15ULL);
        auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
        const double sigma = cfg.identify_noise / std::sqrt(2.0);
        for (auto& v : noise) {
            const double r = std::sqrt(-2.0 * std::log(uniform()));
            const double t = 2.0 * 3.14159265358979323846 * uniform();
            v = {sigma * r * std::cos(t), sigma * r * std::sin(t)};
            noise_power += std::norm(v);
        }
        noise_power /= static_cast<double>(noise.size());
    }
    std::vector<cplx> noisy(clean.samples().begin(), clean.samples().end());
    for (std::size_t i = 0; i < noisy.size(); ++i) {
        noisy[i] += noise[i];
    }
    const ComplexEnvelope observed(std::move(noisy), x.sps());

    auto dcfg = cfg.dpd;
    dcfg.mode = dpd::TrainMode::Identify;
    dcfg.order_k = cfg.identify_order.value_or(std::max<std::size_t>(truth.size(), 3));
    if (dcfg.order_k < truth.size()) {
        throw ConfigError(fmt::format("identify-order {} cannot represent a {}-term truth",
                                      dcfg.order_k, truth.size()));
    }

    double excess = 0.0;
    const std::size_t last_pass = dcfg.passes - 1;
    const auto est = run_stage("identification", [&] {
        return dpd::identify_pa(x, observed, dcfg, [&](std::size_t pass, std::size_t n, cplx e) {
            if (pass == last_pass) {
                excess += std::norm(e - noise[n]);
            }
        });
    });

    IdentifyReport rep;
    rep.excess_mse = excess / static_cast<double>(x.size());
    if (noise_power > 0.0) {
        rep.misadjustment = rep.excess_mse / noise_power;
    }
    for (std::size_t k = 0; k < est.a.size(); ++k) {
        IdentifyRow row;
        row.power = 2 * k + 1;
        row.truth = k < truth.size() ? truth[k] : cplx{0.0, 0.0};
        row.estimate = est.a[k];
        row.abs_error = std::abs(row.estimate - row.truth);
        if (row.truth != cplx{0.0, 0.0}) {
            row.rel_error = row.abs_error / std::abs(row.truth);
        }
        rep.rows.push_back(row);
    }
    if (!cfg.outputs.out.empty()) {
        auto os = open_output(cfg.outputs.out);
        write_identify_csv(os, rep);
    }
    return rep;
}

void write_report_csv(std::ostream& os, const ExperimentReport& report)
{
    os << "modulation,acp_before_db,acp_after_db,improvement_db,evm_before_pct,evm_after_pct,"
          "seed_train,seed_eval\n";
    for (const auto& r : report.rows) {
        if (r.error) {
            fmt::print(os, "{},,,,,,{},{}\n", modem::to_string(r.modulation), report.seed_train,
                       report.seed_eval);
            continue;
        }
        const double before = round6(r.acp_before_db);
        const double after = round6(r.acp_after_db);
        fmt::print(os, "{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n",
                   modem::to_string(r.modulation), before, after, before - after,
                   r.evm_before_pct, r.evm_after_pct, report.seed_train, report.seed_eval);
    }
}

void write_spectra_csv(std::ostream& os, const metrics::Spectrum& before,
                       const metrics::Spectrum& after)
{
    if (before.freqs != after.freqs) {
        throw StageError("output", ErrorKind::Runtime, "spectra are on different frequency grids");
    }
    os << "freq,psd_before_db,psd_after_db\n";
    for (std::size_t i = 0; i < before.freqs.size(); ++i) {
        fmt::print(os, "{:.8f},{:.6f},{:.6f}\n", before.freqs[i], before.psd_db[i],
                   after.psd_db[i]);
    }
}

void write_curves_csv(std::ostream& os, const CurveSet& curves)
{
    os << "amplitude,pa_gain,pa_phase_rad,pd_gain,pd_phase_rad,cascade_gain,cascade_phase_rad\n";
    auto field = [](const std::optional<double>& v) {
        return v ? fmt::format("{:.9f}", *v) : std::string{};
    };
    for (std::size_t b = 0; b < curves.pa.bin_centers.size(); ++b) {
        fmt::print(os, "{:.9f},{},{},{},{},{},{}\n", curves.pa.bin_centers[b],
                   field(curves.pa.mean_gain[b]), field(curves.pa.mean_phase_shift[b]),
                   field(curves.predistorter.mean_gain[b]),
                   field(curves.predistorter.mean_phase_shift[b]),
                   field(curves.cascade.mean_gain[b]), field(curves.cascade.mean_phase_shift[b]));
    }
}

void write_identify_csv(std::ostream& os, const IdentifyReport& report)
{
    os << "power,true_re,true_im,est_re,est_im,abs_error,rel_error\n";
    for (const auto& r : report.rows) {
        fmt::print(os, "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e},{}\n", r.power, r.truth.real(),
                   r.truth.imag(), r.estimate.real(), r.estimate.imag(), r.abs_error,
                   r.rel_error ? fmt::format("{:.6e}", *r.rel_error) : std::string{});
    }
}

} // namespace sspa::harness
