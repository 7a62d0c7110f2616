#include <sspa/pamodel.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sspa::pa {

void GhorbaniParams::validate() const
{
    if (!(x[1] > 0.0) || !(y[1] > 0.0)) {
        throw std::invalid_argument("GhorbaniParams: exponents x2 and y2 must be positive");
    }
}

void PolyPaCoeffs::validate() const
{
    if (a.empty()) {
        throw std::invalid_argument("PolyPaCoeffs: at least the linear coefficient is required");
    }
    if (a.front() == cplx{0.0, 0.0}) {
        throw std::invalid_argument("PolyPaCoeffs: linear coefficient a1 must be nonzero");
    }
}

namespace {

double rational_power(double h, const std::array<double, 4>& c, const char* what)
{
    if (!(h >= 0.0)) {
        throw std::invalid_argument(std::string(what) + ": amplitude must be nonnegative, got " +
                                    std::to_string(h));
    }
    const double hp = std::pow(h, c[1]);
    return c[0] * hp / (1.0 + c[2] * hp) + c[3] * h;
}

} // namespace

double ghorbani_am_am(double h, const GhorbaniParams& p)
{
    return rational_power(h, p.x, "ghorbani_am_am");
}

double ghorbani_am_pm(double h, const GhorbaniParams& p)
{
    return rational_power(h, p.y, "ghorbani_am_pm");
}

cplx apply_sspa(cplx x, const GhorbaniParams& p)
{
    const double r = std::abs(x);
    if (r == 0.0) {
        return {0.0, 0.0};
    }
    double phi = ghorbani_am_pm(r, p);
    if (p.phase_unit == PhaseUnit::Degrees) {
        phi *= std::numbers::pi / 180.0;
    }
    // x / r carries arg(x) without a round trip through atan2
    return ghorbani_am_am(r, p) * (x / r) * std::polar(1.0, phi);
}

ComplexEnvelope apply_sspa(const ComplexEnvelope& env, const GhorbaniParams& p)
{
    p.validate();
    std::vector<cplx> out(env.size());
    const auto in = env.samples();
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = apply_sspa(in[i], p);
    }
    return {std::move(out), env.sps()};
}

cplx apply_poly_pa(cplx x, const PolyPaCoeffs& c) noexcept
{
    // Horner in |x|^2
    const double r2 = std::norm(x);
    cplx acc{0.0, 0.0};
    for (auto it = c.a.rbegin(); it != c.a.rend(); ++it) {
        acc = acc * r2 + *it;
    }
    return x * acc;
}

ComplexEnvelope apply_poly_pa(const ComplexEnvelope& env, const PolyPaCoeffs& c)
{
    std::vector<cplx> out(env.size());
    const auto in = env.samples();
    for (std::size_t i = 0; i < in.size(); ++i) {
        out[i] = apply_poly_pa(in[i], c);
    }
    return {std::move(out), env.sps()};
}

} // namespace sspa::pa
