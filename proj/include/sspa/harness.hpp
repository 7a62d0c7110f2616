#ifndef SSPA_HARNESS_HPP
#define SSPA_HARNESS_HPP

#include <sspa/dpd.hpp>
#include <sspa/metrics.hpp>
#include <sspa/modem.hpp>
#include <sspa/pamodel.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sspa::harness {

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ErrorKind { Config, Runtime, Divergence };

/// Failure inside one pipeline stage; the message is prefixed with the stage name.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, ErrorKind kind, const std::string& what);
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    std::string stage_;
    ErrorKind kind_;
};

enum class AmplifierKind { Ghorbani, Polynomial };

struct OutputPaths {
    std::filesystem::path out;     ///< report / curves / identification CSV
    std::filesystem::path spectra; ///< spectra CSV (simulate, sweep)
};

struct ExperimentConfig {
    modem::Modulation modulation{modem::Modulation::QAM16};
    std::size_t n_symbols{50'000};
    modem::PulseShapeConfig pulse{};
    double drive{1.0};
    AmplifierKind amplifier{AmplifierKind::Ghorbani};
    pa::GhorbaniParams ghorbani{};
    pa::PolyPaCoeffs poly{{cplx{1.0, 0.0}}};
    dpd::DpdTrainConfig dpd{};
    metrics::WelchConfig welch{};
    /// Unset means equal-width bands derived from the pulse rolloff.
    std::optional<metrics::ChannelPlan> plan{};
    std::uint64_t seed_train{1};
    std::uint64_t seed_eval{2};
    std::size_t curve_bins{64};
    /// RMS of complex white noise added to the PA output in identification runs.
    double identify_noise{0.0};
    std::vector<cplx> identify_truth{{1.0, 0.0}, {-0.05, 0.01}, {0.002, 0.0}};
    /// Odd-order terms fitted in identification runs; unset means
    /// max(truth length, 3).
    std::optional<std::size_t> identify_order{};
    OutputPaths outputs{};

    /// Throws ConfigError.
    void validate() const;
    [[nodiscard]] metrics::ChannelPlan channel_plan() const;
    [[nodiscard]] dpd::Amplifier amplifier_fn() const;
};

/// One row per key, `key = value`, in a fixed order; output paths excluded.
[[nodiscard]] std::string canonical_text(const ExperimentConfig& cfg);
/// FNV-1a over canonical_text.
[[nodiscard]] std::uint64_t config_digest(const ExperimentConfig& cfg);

/// Applies one `key = value` setting (keys match the CLI long flag names).
/// Throws ConfigError for unknown keys or unparsable values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; `#` starts a comment. Throws ConfigError with the line number.
[[nodiscard]] std::vector<std::pair<std::string, std::string>>
parse_config_text(std::string_view text);

void load_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

/// Every key apply_setting understands.
[[nodiscard]] const std::vector<std::string_view>& setting_keys();

[[nodiscard]] std::vector<cplx> parse_complex_list(std::string_view text);

struct ExperimentRow {
    modem::Modulation modulation{};
    double acp_before_db{0.0};
    double acp_after_db{0.0};
    double improvement_db{0.0};
    double evm_before_pct{0.0};
    double evm_after_pct{0.0};
    metrics::AcpReport acp_before{};
    metrics::AcpReport acp_after{};
    dpd::PredistorterCoeffs predistorter{};
    /// Set when the row failed; numeric fields are then meaningless.
    std::optional<std::string> error{};
};

struct ExperimentReport {
    std::vector<ExperimentRow> rows;
    std::uint64_t config_digest{0};
    std::uint64_t seed_train{0};
    std::uint64_t seed_eval{0};
};

/// A modulated, shaped and peak-scaled record with its reference symbols.
struct Record {
    std::vector<cplx> symbols;
    ComplexEnvelope envelope;
    double scale{1.0}; ///< factor applied by scale_to_peak
};

[[nodiscard]] Record make_record(const ExperimentConfig& cfg, std::uint64_t seed);

/// Full single-modulation chain without file output.
struct Simulation {
    ExperimentRow row;
    metrics::Spectrum spectrum_before;
    metrics::Spectrum spectrum_after;
    Record eval;
};

[[nodiscard]] Simulation simulate(const ExperimentConfig& cfg);

/// Runs `simulate` and writes the report (outputs.out) and spectra (outputs.spectra) CSVs.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// All four modulations in table order. Failed rows carry `error` and the
/// sweep continues. Spectra files get a `_<modulation>` suffix.
[[nodiscard]] ExperimentReport run_sweep(const ExperimentConfig& base);

struct CurveSet {
    metrics::AmCurve pa;
    metrics::AmCurve predistorter;
    metrics::AmCurve cascade;
    dpd::PredistorterCoeffs coeffs;
};

/// PA alone, predistorter alone and cascade over the evaluation record.
[[nodiscard]] CurveSet run_curves(const ExperimentConfig& cfg);

struct IdentifyRow {
    std::size_t power{1}; ///< 1, 3, 5, ...
    cplx truth{};
    cplx estimate{};
    double abs_error{0.0};
    std::optional<double> rel_error{}; ///< unset when the true coefficient is zero
};

struct IdentifyReport {
    std::vector<IdentifyRow> rows;
    /// Mean |d_clean − wᴴu|² over the final pass.
    double excess_mse{0.0};
    /// excess_mse / noise power; unset for noiseless runs.
    std::optional<double> misadjustment{};
};

/// Fits a polynomial PA to data generated by `truth`. The model order is
/// cfg.identify_order, or max(truth.size(), 3) when unset; missing truth
/// terms count as zero. Throws ConfigError if the order is below truth.size().
[[nodiscard]] IdentifyReport run_identify(const ExperimentConfig& cfg,
                                          const std::vector<cplx>& truth);

void write_report_csv(std::ostream& os, const ExperimentReport& report);
void write_spectra_csv(std::ostream& os, const metrics::Spectrum& before,
                       const metrics::Spectrum& after);
void write_curves_csv(std::ostream& os, const CurveSet& curves);
void write_identify_csv(std::ostream& os, const IdentifyReport& report);

} // namespace sspa::harness

#endif // SSPA_HARNESS_HPP
