#include <sspa/modem.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sspa::modem {

std::string_view to_string(Modulation m) noexcept
{
    switch (m) {
    case Modulation::BPSK: return "bpsk";
    case Modulation::QPSK: return "qpsk";
    case Modulation::PSK8: return "psk8";
    case Modulation::QAM16: return "qam16";
    }
    return "?";
}

std::optional<Modulation> parse_modulation(std::string_view name) noexcept
{
    for (auto m : all_modulations) {
        if (to_string(m) == name) {
            return m;
        }
    }
    return std::nullopt;
}

void PulseShapeConfig::validate() const
{
    if (!(rolloff > 0.0 && rolloff <= 1.0)) {
        throw std::invalid_argument("pulse shape: rolloff must lie in (0, 1]");
    }
    if (sps < 2) {
        throw std::invalid_argument("pulse shape: sps must be >= 2");
    }
    if (span_symbols == 0 || span_symbols % 2 != 0) {
        throw std::invalid_argument("pulse shape: span_symbols must be a positive even integer");
    }
}

namespace {

// Gray-coded 4-level axis: first bit is the sign (0 → positive).
constexpr std::array<double, 4> qam16_axis{3.0, 1.0, -3.0, -1.0};

std::size_t gray_decode(std::size_t g) noexcept
{
    std::size_t b = g;
    for (std::size_t shift = 1; shift < 8 * sizeof(std::size_t); shift <<= 1) {
        b ^= b >> shift;
    }
    return b;
}

} // namespace

Constellation build_constellation(ModulationScheme scheme)
{
    Constellation c;
    c.bits_per_symbol = scheme.bits_per_symbol();
    const std::size_t m = scheme.order();
    c.points.resize(m);
    switch (scheme.kind) {
    case Modulation::BPSK:
        c.points = {cplx{1.0, 0.0}, cplx{-1.0, 0.0}};
        break;
    case Modulation::QPSK: {
        const double a = 1.0 / std::numbers::sqrt2;
        for (std::size_t label = 0; label < m; ++label) {
            const double i = (label & 2U) ? -a : a;
            const double q = (label & 1U) ? -a : a;
            c.points[label] = {i, q};
        }
        break;
    }
    case Modulation::PSK8:
        for (std::size_t label = 0; label < m; ++label) {
            const double angle = static_cast<double>(gray_decode(label)) * std::numbers::pi / 4.0;
            c.points[label] = std::polar(1.0, angle);
        }
        break;
    case Modulation::QAM16: {
        const double norm = 1.0 / std::sqrt(10.0);
        for (std::size_t label = 0; label < m; ++label) {
            c.points[label] = {qam16_axis[label >> 2] * norm, qam16_axis[label & 3U] * norm};
        }
        break;
    }
    }
    return c;
}

std::vector<cplx> map_symbols(const BitStream& bits, ModulationScheme scheme)
{
    const std::size_t bps = scheme.bits_per_symbol();
    if (bits.bits.size() % bps != 0) {
        throw std::invalid_argument("map_symbols: bit count " + std::to_string(bits.bits.size()) +
                                    " is not a multiple of " + std::to_string(bps));
    }
    const auto cons = build_constellation(scheme);
    std::vector<cplx> out;
    out.reserve(bits.bits.size() / bps);
    for (std::size_t i = 0; i < bits.bits.size(); i += bps) {
        std::size_t label = 0;
        for (std::size_t b = 0; b < bps; ++b) {
            label = (label << 1) | (bits.bits[i + b] & 1U);
        }
        out.push_back(cons.points[label]);
    }
    return out;
}

BitStream demap_symbols(std::span<const cplx> symbols, ModulationScheme scheme)
{
    const auto cons = build_constellation(scheme);
    const std::size_t bps = scheme.bits_per_symbol();
    BitStream out;
    out.bits.reserve(symbols.size() * bps);
    for (const auto& s : symbols) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t label = 0; label < cons.points.size(); ++label) {
            const double d = std::norm(s - cons.points[label]);
            if (d < best_d) {
                best_d = d;
                best = label;
            }
        }
        for (std::size_t b = bps; b-- > 0;) {
            out.bits.push_back(static_cast<std::uint8_t>((best >> b) & 1U));
        }
    }
    return out;
}

std::vector<double> rrc_taps(const PulseShapeConfig& cfg)
{
    cfg.validate();
    const double beta = cfg.rolloff;
    const double sps = static_cast<double>(cfg.sps);
    const std::size_t n = cfg.num_taps();
    const auto half = static_cast<std::ptrdiff_t>(n / 2);
    const double pi = std::numbers::pi;

    std::vector<double> taps(n);
    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(static_cast<std::ptrdiff_t>(i) - half) / sps;
        const double x = 4.0 * beta * t;
        double h = 0.0;
        if (t == 0.0) {
            h = 1.0 - beta + 4.0 * beta / pi;
        } else if (std::abs(1.0 - x * x) < 1e-10) {
            // limit at t = ±1/(4β)
            h = beta / std::numbers::sqrt2 *
                ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * beta)) +
                 (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * beta)));
        } else {
            h = (std::sin(pi * t * (1.0 - beta)) + x * std::cos(pi * t * (1.0 + beta))) /
                (pi * t * (1.0 - x * x));
        }
        taps[i] = h;
        energy += h * h;
    }
    const double g = 1.0 / std::sqrt(energy);
    for (auto& h : taps) {
        h *= g;
    }
    // force exact symmetry against rounding in the closed form
    for (std::size_t i = 0; i < n / 2; ++i) {
        taps[n - 1 - i] = taps[i];
    }
    return taps;
}

std::vector<cplx> convolve(std::span<const cplx> x, std::span<const double> h)
{
    if (x.empty() || h.empty()) {
        return {};
    }
    std::vector<cplx> y(x.size() + h.size() - 1, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < x.size(); ++i) {
        const cplx xi = x[i];
        if (xi == cplx{0.0, 0.0}) {
            continue;
        }
        cplx* out = y.data() + i;
        for (std::size_t k = 0; k < h.size(); ++k) {
            out[k] += xi * h[k];
        }
    }
    return y;
}

ComplexEnvelope pulse_shape(std::span<const cplx> symbols, const PulseShapeConfig& cfg)
{
    if (symbols.empty()) {
        throw std::invalid_argument("pulse_shape: no symbols");
    }
    const auto taps = rrc_taps(cfg);
    std::vector<cplx> up(symbols.size() * cfg.sps, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        up[k * cfg.sps] = symbols[k];
    }
    return {convolve(up, taps), cfg.sps};
}

std::vector<cplx> matched_filter_downsample(const ComplexEnvelope& env,
                                            const PulseShapeConfig& cfg,
                                            std::size_t n_symbols)
{
    if (env.sps() != cfg.sps) {
        throw std::invalid_argument("matched_filter_downsample: envelope sps " +
                                    std::to_string(env.sps()) + " does not match filter sps " +
                                    std::to_string(cfg.sps));
    }
    if (n_symbols == 0) {
        return {};
    }
    const auto taps = rrc_taps(cfg);
    const std::size_t delay = taps.size() - 1;
    const std::size_t last = (n_symbols - 1) * cfg.sps + delay;
    if (env.size() + taps.size() - 1 <= last) {
        throw std::invalid_argument("matched_filter_downsample: envelope of " +
                                    std::to_string(env.size()) + " samples is too short for " +
                                    std::to_string(n_symbols) + " symbols");
    }
    // evaluate the filter output only at the symbol instants
    const auto x = env.samples();
    std::vector<cplx> out(n_symbols);
    for (std::size_t k = 0; k < n_symbols; ++k) {
        const std::size_t idx = k * cfg.sps + delay;
        cplx acc{0.0, 0.0};
        for (std::size_t j = 0; j < taps.size(); ++j) {
            if (idx >= j && idx - j < x.size()) {
                acc += x[idx - j] * taps[j];
            }
        }
        out[k] = acc;
    }
    return out;
}

} // namespace sspa::modem
