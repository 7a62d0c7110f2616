#ifndef SSPA_MODEM_HPP
#define SSPA_MODEM_HPP

#include <sspa/sigcore.hpp>

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace sspa::modem {

enum class Modulation { BPSK, QPSK, PSK8, QAM16 };

/// Table order used by sweeps and reports.
inline constexpr std::array<Modulation, 4> all_modulations{Modulation::QAM16, Modulation::PSK8,
                                                           Modulation::QPSK, Modulation::BPSK};

struct ModulationScheme {
    Modulation kind{Modulation::QAM16};

    [[nodiscard]] constexpr std::size_t bits_per_symbol() const noexcept
    {
        switch (kind) {
        case Modulation::BPSK: return 1;
        case Modulation::QPSK: return 2;
        case Modulation::PSK8: return 3;
        case Modulation::QAM16: return 4;
        }
        return 0;
    }

    /// Occupied bandwidth in units of the bit rate F_b (F_b / bits_per_symbol).
    [[nodiscard]] constexpr double bandwidth_factor() const noexcept
    {
        return 1.0 / static_cast<double>(bits_per_symbol());
    }

    [[nodiscard]] constexpr std::size_t order() const noexcept
    {
        return std::size_t{1} << bits_per_symbol();
    }
};

[[nodiscard]] std::string_view to_string(Modulation m) noexcept;
/// Accepts the CLI spellings bpsk, qpsk, psk8, qam16.
[[nodiscard]] std::optional<Modulation> parse_modulation(std::string_view name) noexcept;

/// Points indexed by label; the label's bits (MSB first) are the symbol's bits.
struct Constellation {
    std::vector<cplx> points;
    std::size_t bits_per_symbol{0};
};

struct PulseShapeConfig {
    double rolloff{0.35};
    std::size_t sps{8};
    std::size_t span_symbols{10};

    [[nodiscard]] std::size_t num_taps() const noexcept { return span_symbols * sps + 1; }
    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

[[nodiscard]] Constellation build_constellation(ModulationScheme scheme);

/// Throws std::invalid_argument if the bit count is not a multiple of bits_per_symbol.
[[nodiscard]] std::vector<cplx> map_symbols(const BitStream& bits, ModulationScheme scheme);

/// Minimum-distance decisions; ties go to the lowest label.
[[nodiscard]] BitStream demap_symbols(std::span<const cplx> symbols, ModulationScheme scheme);

/// Unit-energy root-raised-cosine taps, `cfg.num_taps()` long and symmetric.
[[nodiscard]] std::vector<double> rrc_taps(const PulseShapeConfig& cfg);

/// Zero-stuffs by sps and filters; output is n·sps + num_taps − 1 samples.
[[nodiscard]] ComplexEnvelope pulse_shape(std::span<const cplx> symbols,
                                          const PulseShapeConfig& cfg);

/// Matched-filters and samples at the symbol instants after both filters'
/// group delay, so element k lines up with the k-th transmitted symbol.
[[nodiscard]] std::vector<cplx> matched_filter_downsample(const ComplexEnvelope& env,
                                                          const PulseShapeConfig& cfg,
                                                          std::size_t n_symbols);

/// Direct-form linear convolution, full length.
[[nodiscard]] std::vector<cplx> convolve(std::span<const cplx> x, std::span<const double> h);

} // namespace sspa::modem

#endif // SSPA_MODEM_HPP
