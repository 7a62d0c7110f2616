#ifndef SSPA_SIGCORE_HPP
#define SSPA_SIGCORE_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sspa {

using cplx = std::complex<double>;

/// Complex baseband sample sequence with its samples-per-symbol rate.
///
/// The symbol rate is normalized to 1, so the sample rate equals `sps()`.
/// Construction rejects non-finite samples and `sps == 0`.
class ComplexEnvelope {
public:
    ComplexEnvelope() = default;
    ComplexEnvelope(std::vector<cplx> samples, std::size_t sps);

    [[nodiscard]] std::span<const cplx> samples() const noexcept { return samples_; }
    [[nodiscard]] std::size_t sps() const noexcept { return sps_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] bool empty() const noexcept { return samples_.empty(); }
    [[nodiscard]] const cplx& operator[](std::size_t i) const noexcept { return samples_[i]; }

    /// Moves the sample buffer out, leaving the envelope empty.
    [[nodiscard]] std::vector<cplx> release() && noexcept { return std::move(samples_); }

    friend bool operator==(const ComplexEnvelope&, const ComplexEnvelope&) = default;

private:
    std::vector<cplx> samples_;
    std::size_t sps_{1};
};

struct EnvelopeStats {
    double rms{0.0};
    double peak{0.0};
    double papr_db{0.0};
};

struct BitStream {
    std::vector<std::uint8_t> bits;
    std::uint64_t seed{0};
};

/// Deterministic bit source. Bits are taken LSB-first from successive
/// std::mt19937_64 outputs, whose sequence the standard fixes exactly, so
/// streams are reproducible across platforms and standard libraries.
[[nodiscard]] BitStream gen_bits(std::uint64_t seed, std::size_t n);

/// Throws std::invalid_argument on an empty envelope.
[[nodiscard]] EnvelopeStats envelope_stats(const ComplexEnvelope& env);

/// Scales by a positive real factor so the peak magnitude equals `target_peak`.
[[nodiscard]] ComplexEnvelope scale_to_peak(const ComplexEnvelope& env, double target_peak);

[[nodiscard]] ComplexEnvelope scale(const ComplexEnvelope& env, cplx factor);

/// 10·log10 of a power ratio, floored at 1e-300 so zero maps to -3000 dB.
[[nodiscard]] inline double to_db_power(double ratio) noexcept
{
    return 10.0 * std::log10(std::max(ratio, 1e-300));
}

} // namespace sspa

#endif // SSPA_SIGCORE_HPP
