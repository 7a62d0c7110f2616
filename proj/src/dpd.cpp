#include <sspa/dpd.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace sspa::dpd {

void NlmsState::validate() const
{
    if (!(mu > 0.0 && mu <= 2.0)) {
        throw std::invalid_argument("NLMS: mu must lie in (0, 2], got " + std::to_string(mu));
    }
    if (!(eps > 0.0)) {
        throw std::invalid_argument("NLMS: eps must be positive");
    }
    if (w.empty()) {
        throw std::invalid_argument("NLMS: weight vector is empty");
    }
}

DivergenceError::DivergenceError(double mu, std::uint64_t at_update)
    : std::runtime_error("NLMS diverged after " + std::to_string(at_update) +
                         " updates with mu = " + std::to_string(mu) + "; reduce mu"),
      mu_(mu)
{
}

void DpdTrainConfig::validate() const
{
    if (order_k < 1) {
        throw std::invalid_argument("DPD: order_k must be >= 1");
    }
    if (!(mu > 0.0 && mu <= 2.0)) {
        throw std::invalid_argument("DPD: mu must lie in (0, 2], got " + std::to_string(mu));
    }
    if (!(eps > 0.0)) {
        throw std::invalid_argument("DPD: eps must be positive");
    }
    if (!(target_gain > 0.0)) {
        throw std::invalid_argument("DPD: target gain must be positive");
    }
    if (passes < 1) {
        throw std::invalid_argument("DPD: passes must be >= 1");
    }
    if (!(min_amplitude_fraction >= 0.0 && min_amplitude_fraction < 1.0)) {
        throw std::invalid_argument("DPD: min_amplitude_fraction must lie in [0, 1)");
    }
}

void PredistorterCoeffs::validate() const
{
    if (w.empty() || w.front() == cplx{0.0, 0.0}) {
        throw std::invalid_argument("PredistorterCoeffs: w1 must exist and be nonzero");
    }
}

void poly_basis(cplx x, std::span<cplx> out) noexcept
{
    const double r2 = std::norm(x);
    cplx term = x;
    for (auto& o : out) {
        o = term;
        term *= r2;
    }
}

std::vector<cplx> poly_basis(cplx x, std::size_t order_k)
{
    if (order_k < 1) {
        throw std::invalid_argument("poly_basis: order_k must be >= 1");
    }
    std::vector<cplx> out(order_k);
    poly_basis(x, out);
    return out;
}

cplx nlms_update(NlmsState& state, std::span<const cplx> u, cplx d)
{
    if (u.size() != state.w.size()) {
        throw std::invalid_argument("nlms_step: regressor length " + std::to_string(u.size()) +
                                    " does not match weight length " +
                                    std::to_string(state.w.size()));
    }
    cplx y{0.0, 0.0};
    double energy = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        y += std::conj(state.w[k]) * u[k];
        energy += std::norm(u[k]);
    }
    const cplx e = d - y;
    const cplx g = state.mu * std::conj(e) / (state.eps + energy);
    double wnorm2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        state.w[k] += g * u[k];
        wnorm2 += std::norm(state.w[k]);
    }
    ++state.n_updates;
    if (!(wnorm2 <= divergence_norm * divergence_norm)) {
        throw DivergenceError(state.mu, state.n_updates);
    }
    return e;
}

std::pair<NlmsState, cplx> nlms_step(NlmsState state, std::span<const cplx> u, cplx d)
{
    state.validate();
    const cplx e = nlms_update(state, u, d);
    return {std::move(state), e};
}

namespace {

std::vector<cplx> conj_all(std::vector<cplx> w)
{
    for (auto& v : w) {
        v = std::conj(v);
    }
    return w;
}

} // namespace

pa::PolyPaCoeffs identify_pa(const ComplexEnvelope& env_in, const ComplexEnvelope& env_out,
                             const DpdTrainConfig& cfg, const StepObserver& observer)
{
    cfg.validate();
    if (cfg.mode != TrainMode::Identify) {
        throw std::invalid_argument("identify_pa: config mode must be identify");
    }
    if (env_in.empty()) {
        throw std::invalid_argument("identify_pa: empty input record");
    }
    if (env_in.size() != env_out.size()) {
        throw std::invalid_argument("identify_pa: input has " + std::to_string(env_in.size()) +
                                    " samples but output has " + std::to_string(env_out.size()));
    }

    NlmsState st{std::vector<cplx>(cfg.order_k, cplx{0.0, 0.0}), cfg.mu, cfg.eps, 0};
    std::vector<cplx> u(cfg.order_k);
    for (std::size_t pass = 0; pass < cfg.passes; ++pass) {
        for (std::size_t n = 0; n < env_in.size(); ++n) {
            poly_basis(env_in[n], u);
            const cplx e = nlms_update(st, u, env_out[n]);
            if (observer) {
                observer(pass, n, e);
            }
        }
    }
    return pa::PolyPaCoeffs{conj_all(std::move(st.w))};
}

PredistorterCoeffs train_predistorter(const ComplexEnvelope& env_in, const Amplifier& pa,
                                      const DpdTrainConfig& cfg)
{
    cfg.validate();
    if (cfg.mode != TrainMode::Indirect) {
        throw std::invalid_argument("train_predistorter: config mode must be indirect");
    }
    if (env_in.empty()) {
        throw std::invalid_argument("train_predistorter: empty training record");
    }
    const ComplexEnvelope y = pa(env_in);
    if (y.size() != env_in.size()) {
        throw std::invalid_argument("train_predistorter: amplifier changed the record length");
    }

    const double inv_gain = 1.0 / cfg.target_gain;
    double peak = 0.0;
    for (const auto& s : y.samples()) {
        peak = std::max(peak, std::abs(s) * inv_gain);
    }
    const double gate = cfg.min_amplitude_fraction * peak;

    NlmsState st{std::vector<cplx>(cfg.order_k, cplx{0.0, 0.0}), cfg.mu, cfg.eps, 0};
    st.w[0] = {1.0, 0.0};
    std::vector<cplx> u(cfg.order_k);
    for (std::size_t pass = 0; pass < cfg.passes; ++pass) {
        for (std::size_t n = 0; n < env_in.size(); ++n) {
            const cplx yn = y[n] * inv_gain;
            if (std::abs(yn) < gate) {
                continue;
            }
            poly_basis(yn, u);
            nlms_update(st, u, env_in[n]);
        }
    }
    return PredistorterCoeffs{conj_all(std::move(st.w))};
}

cplx apply_predistorter(cplx x, const PredistorterCoeffs& pd) noexcept
{
    const double r2 = std::norm(x);
    cplx acc{0.0, 0.0};
    for (auto it = pd.w.rbegin(); it != pd.w.rend(); ++it) {
        acc = acc * r2 + *it;
    }
    return x * acc;
}

ComplexEnvelope apply_predistorter(const ComplexEnvelope& env, const PredistorterCoeffs& pd)
{
    std::vector<cplx> out(env.size());
    const auto in = env.samples();
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = apply_predistorter(in[i], pd);
    }
    return {std::move(out), env.sps()};
}

} // namespace sspa::dpd
