#include "oracles.hpp"

#include <sspa/pamodel.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sspa;
using namespace sspa::pa;

namespace {

ComplexEnvelope random_envelope(std::uint64_t seed, std::size_t n, double max_amp)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> r(0.0, max_amp);
    std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
    std::vector<cplx> s(n);
    for (auto& v : s) {
        v = std::polar(r(rng), ph(rng));
    }
    return {std::move(s), 8};
}

} // namespace

TEST_CASE("Ghorbani AM/AM")
{
    const GhorbaniParams p;
    CHECK(ghorbani_am_am(0.0, p) == 0.0);
    CHECK(ghorbani_am_am(1.0, p) == doctest::Approx(8.1081 / 7.502 - 0.0718).epsilon(1e-14));
    CHECK(ghorbani_am_am(1.0, p) == doctest::Approx(1.00899).epsilon(1e-5));
    // first term plateaus at x1/x3
    const double h = 1e3;
    const double first = ghorbani_am_am(h, p) - p.x[3] * h;
    CHECK(std::abs(first / (8.1081 / 6.502) - 1.0) < 1e-3);
    CHECK_THROWS_AS((void)ghorbani_am_am(-0.1, p), std::invalid_argument);
}

TEST_CASE("Ghorbani AM/PM")
{
    const GhorbaniParams p;
    CHECK(ghorbani_am_pm(0.0, p) == 0.0);
    CHECK(ghorbani_am_pm(1.0, p) == doctest::Approx(4.6645 / 11.88 - 0.003).epsilon(1e-14));
    CHECK(ghorbani_am_pm(1.0, p) == doctest::Approx(0.38964).epsilon(1e-4));
    CHECK_THROWS_AS((void)ghorbani_am_pm(-1.0, p), std::invalid_argument);
}

TEST_CASE("AM/PM is increasing on a 1000-point grid over [0, 1]")
{
    // Known to fail at the first step: the y4·h term (y4 < 0) dominates near
    // zero, so AM/PM dips to about -1e-6 degrees before rising.
    const GhorbaniParams p;
    double prev = ghorbani_am_pm(0.0, p);
    for (int i = 1; i < 1000; ++i) {
        const double h = i / 999.0;
        const double v = ghorbani_am_pm(h, p);
        INFO("h = ", h);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("AM/PM dip near zero (regression)")
{
    const GhorbaniParams p;
    // stationary point of y1·y2·h^(y2-1)/(1+y3·h^y2)^2 + y4 = 0, root frozen from scipy brentq
    double lo = 1e-5, hi = 1e-2;
    auto slope = [&](double h) {
        return (ghorbani_am_pm(h * (1 + 1e-6), p) - ghorbani_am_pm(h * (1 - 1e-6), p)) / (2e-6 * h);
    };
    for (int i = 0; i < 80; ++i) {
        const double mid = std::sqrt(lo * hi);
        (slope(mid) < 0.0 ? lo : hi) = mid;
    }
    CHECK(lo == doctest::Approx(6.2518e-4).epsilon(1e-3));
    CHECK(ghorbani_am_pm(lo, p) == doctest::Approx(-9.8094e-7).epsilon(1e-3));
    CHECK(ghorbani_am_pm(lo, p) < 0.0);
    // increasing from the dip to the edge of the operating range
    double prev = ghorbani_am_pm(lo, p);
    for (int i = 1; i <= 2000; ++i) {
        const double h = lo + (1.2 - lo) * i / 2000.0;
        const double v = ghorbani_am_pm(h, p);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("Ghorbani curves match the long-double oracle")
{
    const GhorbaniParams p;
    for (int i = 0; i <= 2000; ++i) {
        const double h = 1.2 * i / 2000.0;
        const auto am = static_cast<double>(oracle::am_am(h));
        const auto pm = static_cast<double>(oracle::am_pm_deg(h));
        CHECK(std::abs(ghorbani_am_am(h, p) - am) <= 1e-12 * std::max(std::abs(am), 1e-300));
        CHECK(std::abs(ghorbani_am_pm(h, p) - pm) <= 1e-12 * std::max(std::abs(pm), 1e-300));
    }
}

TEST_CASE("AM/AM is strictly increasing on the operating range")
{
    const GhorbaniParams p;
    double prev = ghorbani_am_am(0.01, p);
    for (int i = 1; i <= 10000; ++i) {
        const double h = 0.01 + (1.2 - 0.01) * i / 10000.0;
        const double v = ghorbani_am_am(h, p);
        REQUIRE(v > prev);
        prev = v;
    }
}

TEST_CASE("AM/AM saturation peak (grid-search regression)")
{
    const GhorbaniParams p;
    double best = -1.0;
    double arg = 0.0;
    for (int i = 0; i <= 300000; ++i) {
        const double h = 3.0 * i / 300000.0;
        const double v = ghorbani_am_am(h, p);
        if (v > best) {
            best = v;
            arg = h;
        }
    }
    CHECK(arg > 1.5);
    CHECK(arg < 2.2);
    CHECK(arg == doctest::Approx(1.65367).epsilon(1e-4));
    CHECK(best == doctest::Approx(1.045792).epsilon(1e-6));
}

TEST_CASE("apply_sspa")
{
    const GhorbaniParams p;
    SUBCASE("zero")
    {
        const auto out = apply_sspa(ComplexEnvelope(std::vector<cplx>(8), 2), p);
        for (auto& s : out.samples()) {
            CHECK(s == cplx{0.0, 0.0});
        }
    }
    SUBCASE("unit sample")
    {
        const auto y = apply_sspa(cplx{1.0, 0.0}, p);
        CHECK(std::abs(y) == doctest::Approx(1.008991788856305).epsilon(1e-13));
        CHECK(std::arg(y) == doctest::Approx(0.0068004080483).epsilon(1e-10));
        CHECK(std::arg(y) == doctest::Approx(0.0068007).epsilon(1e-4));
    }
    SUBCASE("radians option")
    {
        GhorbaniParams r = p;
        r.phase_unit = PhaseUnit::Radians;
        CHECK(std::arg(apply_sspa(cplx{1.0, 0.0}, r)) ==
              doctest::Approx(4.6645 / 11.88 - 0.003).epsilon(1e-13));
    }
    SUBCASE("rotation equivariance and sample-wise permutation")
    {
        const auto env = random_envelope(5, 300, 1.2);
        const cplx rot = std::polar(1.0, 0.7);
        const auto a = apply_sspa(scale(env, rot), p);
        const auto b = apply_sspa(env, p);
        for (std::size_t i = 0; i < env.size(); ++i) {
            CHECK(std::abs(a[i] - rot * b[i]) < 1e-13);
        }
        std::vector<cplx> rev(env.samples().rbegin(), env.samples().rend());
        const auto c = apply_sspa(ComplexEnvelope(rev, 8), p);
        for (std::size_t i = 0; i < env.size(); ++i) {
            CHECK(c[i] == b[env.size() - 1 - i]);
        }
    }
    SUBCASE("invalid exponents")
    {
        GhorbaniParams bad = p;
        bad.x[1] = 0.0;
        CHECK_THROWS_AS((void)apply_sspa(ComplexEnvelope({cplx{1.0, 0.0}}, 1), bad),
                        std::invalid_argument);
    }
}

TEST_CASE("apply_poly_pa")
{
    SUBCASE("identity and linear gain")
    {
        const auto env = random_envelope(9, 100, 1.0);
        const auto id = apply_poly_pa(env, {{cplx{1.0, 0.0}}});
        CHECK(id == env);
        const cplx g{0.3, -0.8};
        const auto lin = apply_poly_pa(env, {{g}});
        for (std::size_t i = 0; i < env.size(); ++i) {
            CHECK(std::abs(lin[i] - g * env[i]) < 1e-15);
        }
    }
    SUBCASE("cubic compression")
    {
        const PolyPaCoeffs c{{cplx{1.0, 0.0}, cplx{-0.05, 0.0}}};
        CHECK(std::abs(apply_poly_pa(cplx{1.0, 0.0}, c) - 0.95) < 1e-15);
        CHECK(std::abs(apply_poly_pa(cplx{2.0, 0.0}, c) - 1.6) < 1e-15);
    }
    SUBCASE("matches explicit powers; rotation equivariant")
    {
        const PolyPaCoeffs c{{cplx{1.0, 0.1}, cplx{-0.05, 0.01}, cplx{0.002, 0.0}}};
        const auto env = random_envelope(4, 200, 1.1);
        const cplx rot = std::polar(1.0, -2.1);
        const auto rotated = apply_poly_pa(scale(env, rot), c);
        for (std::size_t i = 0; i < env.size(); ++i) {
            const auto row = oracle::odd_powers(env[i], 3);
            const cplx want = c.a[0] * row[0] + c.a[1] * row[1] + c.a[2] * row[2];
            CHECK(std::abs(apply_poly_pa(env[i], c) - want) < 1e-14);
            CHECK(std::abs(rotated[i] - rot * want) < 1e-14);
        }
    }
    SUBCASE("validation")
    {
        CHECK_THROWS_AS(PolyPaCoeffs{}.validate(), std::invalid_argument);
        CHECK_THROWS_AS((PolyPaCoeffs{{cplx{0.0, 0.0}}}.validate()), std::invalid_argument);
    }
}
