#include <sspa/metrics.hpp>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sspa::metrics {

void WelchConfig::validate() const
{
    if (segment_len < 64 || (segment_len & (segment_len - 1)) != 0) {
        throw std::invalid_argument("welch: segment_len must be a power of two >= 64, got " +
                                    std::to_string(segment_len));
    }
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
        throw std::invalid_argument("welch: overlap_fraction must lie in [0, 1)");
    }
}

void ChannelPlan::validate() const
{
    if (!(channel_width > 0.0)) {
        throw std::invalid_argument("channel plan: channel_width must be positive");
    }
}

namespace {

// Plan creation in FFTW is not thread-safe; execution on distinct plans is.
std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};

class ForwardFft {
public:
    explicit ForwardFft(std::size_t n)
        : n_(n), buf_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)))
    {
        if (!buf_) {
            throw std::bad_alloc();
        }
        std::scoped_lock lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_.get(), buf_.get(), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
    }
    ~ForwardFft()
    {
        std::scoped_lock lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
    }
    ForwardFft(const ForwardFft&) = delete;
    ForwardFft& operator=(const ForwardFft&) = delete;

    void set(std::size_t i, cplx v) noexcept
    {
        buf_.get()[i][0] = v.real();
        buf_.get()[i][1] = v.imag();
    }
    [[nodiscard]] double power(std::size_t i) const noexcept
    {
        const auto& c = buf_.get()[i];
        return c[0] * c[0] + c[1] * c[1];
    }
    void execute() noexcept { fftw_execute(plan_); }
    [[nodiscard]] std::size_t size() const noexcept { return n_; }

private:
    std::size_t n_;
    std::unique_ptr<fftw_complex, FftwFree> buf_;
    fftw_plan plan_{};
};

std::vector<double> hann(std::size_t n)
{
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(n));
    }
    return w;
}

} // namespace

Spectrum welch_psd(const ComplexEnvelope& env, const WelchConfig& cfg)
{
    cfg.validate();
    const std::size_t len = cfg.segment_len;
    if (env.size() < len) {
        throw std::invalid_argument("welch_psd: envelope of " + std::to_string(env.size()) +
                                    " samples is shorter than one segment (" +
                                    std::to_string(len) + ")");
    }
    const auto step = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(static_cast<double>(len) *
                                                (1.0 - cfg.overlap_fraction))));
    const auto window = hann(len);
    double window_energy = 0.0;
    for (double w : window) {
        window_energy += w * w;
    }

    ForwardFft fft(len);
    std::vector<double> acc(len, 0.0);
    std::size_t n_segments = 0;
    const auto x = env.samples();
    for (std::size_t start = 0; start + len <= x.size(); start += step) {
        for (std::size_t i = 0; i < len; ++i) {
            fft.set(i, x[start + i] * window[i]);
        }
        fft.execute();
        for (std::size_t k = 0; k < len; ++k) {
            acc[k] += fft.power(k);
        }
        ++n_segments;
    }

    const double fs = static_cast<double>(env.sps());
    const double df = fs / static_cast<double>(len);
    // density normalization: Σ_k psd_k·df equals the mean power
    const double norm = 1.0 / (static_cast<double>(n_segments) * window_energy * fs);

    Spectrum spec;
    spec.freqs.resize(len);
    spec.psd_db.resize(len);
    for (std::size_t j = 0; j < len; ++j) {
        const std::size_t k = (j + len / 2 + 1) % len;
        const auto signed_k = k <= len / 2 ? static_cast<double>(k)
                                           : static_cast<double>(k) - static_cast<double>(len);
        spec.freqs[j] = signed_k * df;
        spec.psd_db[j] = to_db_power(acc[k] * norm);
    }
    return spec;
}

double band_power(const Spectrum& spec, double lo, double hi)
{
    const auto& f = spec.freqs;
    if (f.size() < 2 || f.size() != spec.psd_db.size()) {
        throw std::invalid_argument("band_power: malformed spectrum");
    }
    if (!(lo <= hi)) {
        throw std::invalid_argument("band_power: lower edge above upper edge");
    }
    if (lo < f.front() || hi > f.back()) {
        throw std::out_of_range("band_power: band [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "] lies outside the spectrum span [" +
                                std::to_string(f.front()) + ", " + std::to_string(f.back()) +
                                "]");
    }
    auto lin = [&](std::size_t i) { return std::pow(10.0, spec.psd_db[i] / 10.0); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double a = std::max(lo, f[i]);
        const double b = std::min(hi, f[i + 1]);
        if (b <= a) {
            continue;
        }
        const double p0 = lin(i);
        const double p1 = lin(i + 1);
        const double slope = (p1 - p0) / (f[i + 1] - f[i]);
        const double pa = p0 + slope * (a - f[i]);
        const double pb = p0 + slope * (b - f[i]);
        total += 0.5 * (pa + pb) * (b - a);
    }
    return total;
}

AcpReport measure_acp(const Spectrum& spec, const ChannelPlan& plan)
{
    plan.validate();
    const double half = plan.channel_width / 2.0;
    auto band = [&](double center, const char* name) {
        try {
            return band_power(spec, center - half, center + half);
        } catch (const std::out_of_range& e) {
            throw std::out_of_range(std::string("measure_acp: ") + name + " band: " + e.what());
        }
    };
    const double p_main = band(plan.main_center, "main");
    const double p_lower = band(plan.main_center - plan.adjacent_offset, "lower adjacent");
    const double p_upper = band(plan.main_center + plan.adjacent_offset, "upper adjacent");

    AcpReport r;
    r.p_main_db = to_db_power(p_main);
    r.p_lower_db = to_db_power(p_lower);
    r.p_upper_db = to_db_power(p_upper);
    r.acp_db = to_db_power(0.5 * (p_lower + p_upper) / p_main);
    return r;
}

AmCurve extract_am_curves(const ComplexEnvelope& env_in, const ComplexEnvelope& env_out,
                          std::size_t n_bins, double max_amplitude)
{
    if (env_in.size() != env_out.size()) {
        throw std::invalid_argument("extract_am_curves: input has " +
                                    std::to_string(env_in.size()) + " samples but output has " +
                                    std::to_string(env_out.size()));
    }
    if (n_bins < 2) {
        throw std::invalid_argument("extract_am_curves: n_bins must be >= 2");
    }
    if (!(max_amplitude > 0.0)) {
        throw std::invalid_argument("extract_am_curves: maximum amplitude must be positive");
    }

    const double width = max_amplitude / static_cast<double>(n_bins);
    std::vector<double> gain_sum(n_bins, 0.0);
    std::vector<double> phase_sum(n_bins, 0.0);
    AmCurve c;
    c.counts.assign(n_bins, 0);
    for (std::size_t i = 0; i < env_in.size(); ++i) {
        const double a = std::abs(env_in[i]);
        if (a == 0.0 || a > max_amplitude) {
            continue;
        }
        // bins are right-closed: b covers (b·width, (b+1)·width]
        const double slot = std::ceil(a / width) - 1.0;
        const auto bin = std::min(n_bins - 1, static_cast<std::size_t>(std::max(0.0, slot)));
        gain_sum[bin] += std::abs(env_out[i]) / a;
        phase_sum[bin] += std::arg(env_out[i] * std::conj(env_in[i]));
        ++c.counts[bin];
    }
    c.bin_centers.resize(n_bins);
    c.mean_gain.resize(n_bins);
    c.mean_phase_shift.resize(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        c.bin_centers[b] = (static_cast<double>(b) + 0.5) * width;
        if (c.counts[b] > 0) {
            const auto n = static_cast<double>(c.counts[b]);
            c.mean_gain[b] = gain_sum[b] / n;
            c.mean_phase_shift[b] = phase_sum[b] / n;
        }
    }
    return c;
}

AmCurve extract_am_curves(const ComplexEnvelope& env_in, const ComplexEnvelope& env_out,
                          std::size_t n_bins)
{
    double peak = 0.0;
    for (const auto& s : env_in.samples()) {
        peak = std::max(peak, std::abs(s));
    }
    if (peak == 0.0) {
        throw std::invalid_argument("extract_am_curves: input envelope is all zero");
    }
    return extract_am_curves(env_in, env_out, n_bins, peak);
}

double measure_evm(std::span<const cplx> ref_symbols, std::span<const cplx> rx_symbols)
{
    if (ref_symbols.empty()) {
        throw std::invalid_argument("measure_evm: no symbols");
    }
    if (ref_symbols.size() != rx_symbols.size()) {
        throw std::invalid_argument("measure_evm: " + std::to_string(ref_symbols.size()) +
                                    " reference symbols but " +
                                    std::to_string(rx_symbols.size()) + " received");
    }
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t i = 0; i < ref_symbols.size(); ++i) {
        err += std::norm(rx_symbols[i] - ref_symbols[i]);
        ref += std::norm(ref_symbols[i]);
    }
    if (ref == 0.0) {
        throw std::invalid_argument("measure_evm: reference has zero power");
    }
    return 100.0 * std::sqrt(err / ref);
}

} // namespace sspa::metrics
