#ifndef SSPA_PAMODEL_HPP
#define SSPA_PAMODEL_HPP

#include <sspa/sigcore.hpp>

#include <array>
#include <vector>

namespace sspa::pa {

enum class PhaseUnit { Degrees, Radians };

/// Ghorbani SSPA model parameters.
///
///   AM/AM(h) = x1·h^x2 / (1 + x3·h^x2) + x4·h
///   AM/PM(h) = y1·h^y2 / (1 + y3·h^y2) + y4·h
///
/// AM/PM is expressed in `phase_unit`. Defaults are the published fit for a
/// solid-state amplifier, with AM/PM read as degrees.
struct GhorbaniParams {
    std::array<double, 4> x{8.1081, 1.5413, 6.502, -0.0718};
    std::array<double, 4> y{4.6645, 2.0965, 10.88, -0.003};
    PhaseUnit phase_unit{PhaseUnit::Degrees};

    /// Throws std::invalid_argument unless both exponents are positive.
    void validate() const;
};

/// Coefficients a1, a3, a5, ...; entry k multiplies x·|x|^(2k).
struct PolyPaCoeffs {
    std::vector<cplx> a;

    void validate() const;
};

/// Throws std::invalid_argument for h < 0.
[[nodiscard]] double ghorbani_am_am(double h, const GhorbaniParams& p);
[[nodiscard]] double ghorbani_am_pm(double h, const GhorbaniParams& p);

[[nodiscard]] cplx apply_sspa(cplx x, const GhorbaniParams& p);
[[nodiscard]] ComplexEnvelope apply_sspa(const ComplexEnvelope& env, const GhorbaniParams& p);

[[nodiscard]] cplx apply_poly_pa(cplx x, const PolyPaCoeffs& c) noexcept;
[[nodiscard]] ComplexEnvelope apply_poly_pa(const ComplexEnvelope& env, const PolyPaCoeffs& c);

} // namespace sspa::pa

#endif // SSPA_PAMODEL_HPP
