#include <sspa/sigcore.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace sspa {

ComplexEnvelope::ComplexEnvelope(std::vector<cplx> samples, std::size_t sps)
    : samples_(std::move(samples)), sps_(sps)
{
    if (sps_ == 0) {
        throw std::invalid_argument("ComplexEnvelope: sps must be >= 1");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (!std::isfinite(samples_[i].real()) || !std::isfinite(samples_[i].imag())) {
            throw std::invalid_argument("ComplexEnvelope: non-finite sample at index " +
                                        std::to_string(i));
        }
    }
}

BitStream gen_bits(std::uint64_t seed, std::size_t n)
{
    BitStream out;
    out.seed = seed;
    out.bits.resize(n);
    std::mt19937_64 rng(seed);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % 64 == 0) {
            word = rng();
        }
        out.bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
    }
    return out;
}

EnvelopeStats envelope_stats(const ComplexEnvelope& env)
{
    if (env.empty()) {
        throw std::invalid_argument("envelope_stats: empty envelope");
    }
    double acc = 0.0;
    double peak = 0.0;
    for (const auto& s : env.samples()) {
        acc += std::norm(s);
        peak = std::max(peak, std::abs(s));
    }
    EnvelopeStats st;
    st.rms = std::sqrt(acc / static_cast<double>(env.size()));
    st.peak = peak;
    st.papr_db = st.rms > 0.0 ? 20.0 * std::log10(peak / st.rms) : 0.0;
    return st;
}

ComplexEnvelope scale(const ComplexEnvelope& env, cplx factor)
{
    std::vector<cplx> out(env.samples().begin(), env.samples().end());
    for (auto& s : out) {
        s *= factor;
    }
    return {std::move(out), env.sps()};
}

ComplexEnvelope scale_to_peak(const ComplexEnvelope& env, double target_peak)
{
    if (!(target_peak > 0.0)) {
        throw std::invalid_argument("scale_to_peak: target_peak must be positive");
    }
    if (env.empty()) {
        throw std::invalid_argument("scale_to_peak: empty envelope");
    }
    const double peak = envelope_stats(env).peak;
    if (peak == 0.0) {
        throw std::invalid_argument("scale_to_peak: all-zero envelope has no peak to scale");
    }
    if (peak == target_peak) {
        return env;
    }
    return scale(env, cplx{target_peak / peak, 0.0});
}

} // namespace sspa
