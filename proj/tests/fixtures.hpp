#ifndef SSPA_TESTS_FIXTURES_HPP
#define SSPA_TESTS_FIXTURES_HPP

#include "oracles.hpp"

#include <sspa/dpd.hpp>
#include <sspa/metrics.hpp>
#include <sspa/modem.hpp>

#include <cmath>
#include <vector>

namespace fixture {

// Shaped record (β 0.35, 8 sps, span 10) scaled to `drive` peak.
inline sspa::ComplexEnvelope shaped_record(sspa::modem::Modulation m, std::size_t n_symbols,
                                           std::uint64_t seed, double drive = 1.0)
{
    using namespace sspa;
    const modem::ModulationScheme sch{m};
    const auto sym = modem::map_symbols(gen_bits(seed, n_symbols * sch.bits_per_symbol()), sch);
    return scale_to_peak(modem::pulse_shape(sym, modem::PulseShapeConfig{}), drive);
}

struct Flatness {
    double max_gain_db{0.0};
    double max_phase_deg{0.0};
    std::size_t bins_checked{0};
};

// Worst per-bin deviation of a cascade from gain G over bins centered in [lo, hi].
inline Flatness flatness(const sspa::ComplexEnvelope& in, const sspa::ComplexEnvelope& out,
                         double gain, double lo, double hi, std::size_t n_bins = 64)
{
    const auto c = sspa::metrics::extract_am_curves(in, out, n_bins);
    Flatness f;
    for (std::size_t b = 0; b < n_bins; ++b) {
        if (!c.mean_gain[b] || c.bin_centers[b] < lo || c.bin_centers[b] > hi) {
            continue;
        }
        f.max_gain_db = std::max(f.max_gain_db, std::abs(20.0 * std::log10(*c.mean_gain[b] / gain)));
        f.max_phase_deg =
            std::max(f.max_phase_deg, std::abs(*c.mean_phase_shift[b]) * 180.0 / M_PI);
        ++f.bins_checked;
    }
    return f;
}

struct FloorComparison {
    double nlms{0.0};
    double ls{0.0};
};

// Weighted residual of the trained postdistorter against the least-squares
// optimum on the same gated, energy-normalized criterion NLMS minimizes.
inline FloorComparison ls_floor(const sspa::ComplexEnvelope& train,
                               const sspa::ComplexEnvelope& pa_out,
                               const sspa::dpd::DpdTrainConfig& cfg,
                               const sspa::dpd::PredistorterCoeffs& pd)
{
    std::vector<sspa::cplx> in, target;
    std::vector<double> wt;
    double peak = 0.0;
    for (const auto& v : pa_out.samples()) {
        peak = std::max(peak, std::abs(v / cfg.target_gain));
    }
    for (std::size_t n = 0; n < pa_out.size(); ++n) {
        const auto y = pa_out[n] / cfg.target_gain;
        if (std::abs(y) < cfg.min_amplitude_fraction * peak) {
            continue;
        }
        in.push_back(y);
        target.push_back(train[n]);
        double e = cfg.eps;
        for (const auto& r : oracle::odd_powers(y, cfg.order_k)) {
            e += std::norm(r);
        }
        wt.push_back(1.0 / e);
    }
    FloorComparison f;
    f.ls = oracle::weighted_ls(in, target, wt, cfg.order_k).residual;
    f.nlms = oracle::weighted_residual(in, target, wt, pd.w);
    return f;
}

} // namespace fixture

#endif
