#ifndef SSPA_DPD_HPP
#define SSPA_DPD_HPP

#include <sspa/pamodel.hpp>
#include <sspa/sigcore.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sspa::dpd {

/// Normalized LMS filter state. The filter output is wᴴu.
struct NlmsState {
    std::vector<cplx> w;
    double mu{0.01};
    double eps{1e-8};
    std::uint64_t n_updates{0};

    void validate() const;
};

/// Raised when the weight norm leaves the stable region; carries the step size.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(double mu, std::uint64_t at_update);
    [[nodiscard]] double mu() const noexcept { return mu_; }

private:
    double mu_;
};

inline constexpr double divergence_norm = 1e6;

enum class TrainMode { Identify, Indirect };

struct DpdTrainConfig {
    TrainMode mode{TrainMode::Indirect};
    std::size_t order_k{4};
    double mu{0.01};
    double eps{1e-8};
    double target_gain{1.0};
    std::size_t passes{2};
    /// Indirect mode skips samples whose postdistorter input |y/G| is below
    /// this fraction of its record maximum. Near zero the SSPA's AM/AM goes as
    /// h^x2 with x2 > 1, the inverse gain is singular there, and the 1/‖u‖²
    /// normalization would let those samples dominate the fit.
    double min_amplitude_fraction{0.1};

    void validate() const;
};

/// Predistortion function F(x) = Σ w_k |x|^(2(k−1)); the output is x·F(x).
struct PredistorterCoeffs {
    std::vector<cplx> w;

    void validate() const;
};

using Amplifier = std::function<ComplexEnvelope(const ComplexEnvelope&)>;

/// Called once per adaptation step with the a-priori error for that sample.
using StepObserver = std::function<void(std::size_t pass, std::size_t index, cplx error)>;

/// [x, x|x|², x|x|⁴, ...], `order_k` terms.
[[nodiscard]] std::vector<cplx> poly_basis(cplx x, std::size_t order_k);
void poly_basis(cplx x, std::span<cplx> out) noexcept;

/// In-place NLMS update; returns the a-priori error d − wᴴu.
cplx nlms_update(NlmsState& state, std::span<const cplx> u, cplx d);

/// Value-semantics form of nlms_update.
[[nodiscard]] std::pair<NlmsState, cplx> nlms_step(NlmsState state, std::span<const cplx> u,
                                                   cplx d);

/// Fits PA polynomial coefficients from an input/output record (mode must be Identify).
[[nodiscard]] pa::PolyPaCoeffs identify_pa(const ComplexEnvelope& env_in,
                                           const ComplexEnvelope& env_out,
                                           const DpdTrainConfig& cfg,
                                           const StepObserver& observer = {});

/// Indirect learning: adapts a postdistorter on pa(env_in)/G and returns its
/// coefficients as the predistorter (mode must be Indirect).
[[nodiscard]] PredistorterCoeffs train_predistorter(const ComplexEnvelope& env_in,
                                                    const Amplifier& pa,
                                                    const DpdTrainConfig& cfg);

[[nodiscard]] cplx apply_predistorter(cplx x, const PredistorterCoeffs& pd) noexcept;
[[nodiscard]] ComplexEnvelope apply_predistorter(const ComplexEnvelope& env,
                                                 const PredistorterCoeffs& pd);

} // namespace sspa::dpd

#endif // SSPA_DPD_HPP
