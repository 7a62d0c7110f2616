#ifndef SSPA_METRICS_HPP
#define SSPA_METRICS_HPP

#include <sspa/sigcore.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace sspa::metrics {

enum class Window { Hann };

struct WelchConfig {
    std::size_t segment_len{4096};
    double overlap_fraction{0.5};
    Window window{Window::Hann};

    void validate() const;
};

/// Two-sided PSD; freqs in symbol-rate units over (−sps/2, sps/2], ascending.
/// Linear PSD integrates (over frequency) to the mean signal power.
struct Spectrum {
    std::vector<double> freqs;
    std::vector<double> psd_db;
};

struct ChannelPlan {
    double main_center{0.0};
    double channel_width{1.35};
    double adjacent_offset{1.35};

    /// Equal-width bands of (1 + rolloff) spaced by one channel width.
    [[nodiscard]] static ChannelPlan for_rolloff(double rolloff) noexcept
    {
        return {0.0, 1.0 + rolloff, 1.0 + rolloff};
    }
    void validate() const;
};

struct AcpReport {
    double p_main_db{0.0};
    double p_lower_db{0.0};
    double p_upper_db{0.0};
    double acp_db{0.0};
};

/// Per-bin means over uniform input-amplitude bins on (0, max|in|].
struct AmCurve {
    std::vector<double> bin_centers;
    std::vector<std::optional<double>> mean_gain;
    std::vector<std::optional<double>> mean_phase_shift; ///< radians
    std::vector<std::size_t> counts;
};

[[nodiscard]] Spectrum welch_psd(const ComplexEnvelope& env, const WelchConfig& cfg);

/// Band power of the linearly interpolated PSD over [lo, hi].
[[nodiscard]] double band_power(const Spectrum& spec, double lo, double hi);

[[nodiscard]] AcpReport measure_acp(const Spectrum& spec, const ChannelPlan& plan);

[[nodiscard]] AmCurve extract_am_curves(const ComplexEnvelope& env_in,
                                        const ComplexEnvelope& env_out, std::size_t n_bins);

/// Same, with the bin range (0, max_amplitude] fixed by the caller so several
/// curves can share one grid.
[[nodiscard]] AmCurve extract_am_curves(const ComplexEnvelope& env_in,
                                        const ComplexEnvelope& env_out, std::size_t n_bins,
                                        double max_amplitude);

/// RMS error vector magnitude in percent.
[[nodiscard]] double measure_evm(std::span<const cplx> ref_symbols,
                                 std::span<const cplx> rx_symbols);

} // namespace sspa::metrics

#endif // SSPA_METRICS_HPP
