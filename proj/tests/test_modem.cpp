#include <sspa/modem.hpp>

#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace sspa;
using namespace sspa::modem;

namespace {

double min_distance(const Constellation& c)
{
    double d = 1e300;
    for (std::size_t i = 0; i < c.points.size(); ++i) {
        for (std::size_t j = i + 1; j < c.points.size(); ++j) {
            d = std::min(d, std::abs(c.points[i] - c.points[j]));
        }
    }
    return d;
}

BitStream random_bits(std::uint64_t seed, std::size_t n)
{
    return gen_bits(seed, n);
}

} // namespace

TEST_CASE("scheme table")
{
    CHECK(ModulationScheme{Modulation::BPSK}.bits_per_symbol() == 1);
    CHECK(ModulationScheme{Modulation::QPSK}.bits_per_symbol() == 2);
    CHECK(ModulationScheme{Modulation::PSK8}.bits_per_symbol() == 3);
    CHECK(ModulationScheme{Modulation::QAM16}.bits_per_symbol() == 4);
    CHECK(ModulationScheme{Modulation::BPSK}.bandwidth_factor() == 1.0);
    CHECK(ModulationScheme{Modulation::QPSK}.bandwidth_factor() == 0.5);
    CHECK(ModulationScheme{Modulation::PSK8}.bandwidth_factor() == doctest::Approx(1.0 / 3.0));
    CHECK(ModulationScheme{Modulation::QAM16}.bandwidth_factor() == 0.25);
    for (auto m : all_modulations) {
        CHECK(parse_modulation(to_string(m)) == m);
    }
    CHECK_FALSE(parse_modulation("64qam").has_value());
}

TEST_CASE("constellations: unit power, distinct points, Gray labels")
{
    for (auto m : all_modulations) {
        CAPTURE(to_string(m));
        const auto c = build_constellation({m});
        double p = 0.0;
        for (auto& pt : c.points) {
            p += std::norm(pt);
        }
        CHECK(std::abs(p / static_cast<double>(c.points.size()) - 1.0) <= 1e-12);

        const double dmin = min_distance(c);
        CHECK(dmin > 1e-6);
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            for (std::size_t j = i + 1; j < c.points.size(); ++j) {
                if (std::abs(std::abs(c.points[i] - c.points[j]) - dmin) < 1e-9) {
                    CHECK(std::popcount(i ^ j) == 1);
                }
            }
        }
    }
}

TEST_CASE("constellation specifics")
{
    const auto qpsk = build_constellation({Modulation::QPSK});
    CHECK(std::abs(qpsk.points[0] - cplx{1.0, 1.0} / std::sqrt(2.0)) < 1e-15);

    const auto psk8 = build_constellation({Modulation::PSK8});
    std::set<long> angles;
    for (auto& p : psk8.points) {
        CHECK(std::abs(std::abs(p) - 1.0) < 1e-15);
        angles.insert(std::lround(std::arg(p) * 180.0 / std::numbers::pi));
    }
    CHECK(angles == std::set<long>{-135, -90, -45, 0, 45, 90, 135, 180});

    const auto qam = build_constellation({Modulation::QAM16});
    std::set<long> mags;
    for (auto& p : qam.points) {
        mags.insert(std::lround(std::norm(p) * 10.0));
    }
    CHECK(mags == std::set<long>{2, 10, 18});
}

TEST_CASE("map_symbols conventions")
{
    SUBCASE("BPSK")
    {
        const auto s = map_symbols({{0, 1}, 0}, {Modulation::BPSK});
        CHECK(s == std::vector<cplx>{{1.0, 0.0}, {-1.0, 0.0}});
    }
    SUBCASE("QPSK")
    {
        const auto s = map_symbols({{0, 0, 1, 1}, 0}, {Modulation::QPSK});
        REQUIRE(s.size() == 2);
        CHECK(std::abs(s[0] - cplx{1.0, 1.0} / std::sqrt(2.0)) < 1e-15);
        CHECK(std::abs(s[1] - cplx{-1.0, -1.0} / std::sqrt(2.0)) < 1e-15);
    }
    SUBCASE("length must be a multiple")
    {
        try {
            (void)map_symbols({{0, 1, 1}, 0}, {Modulation::QAM16});
            FAIL("expected throw");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("multiple of 4") != std::string::npos);
        }
    }
}

TEST_CASE("demap_symbols")
{
    SUBCASE("nearest quadrant")
    {
        const std::vector<cplx> s{{0.9, 0.8}};
        CHECK(demap_symbols(s, {Modulation::QPSK}).bits == std::vector<std::uint8_t>{0, 0});
    }
    SUBCASE("round trip and bounded noise, all schemes")
    {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto m : all_modulations) {
            CAPTURE(to_string(m));
            const ModulationScheme sch{m};
            const auto bits = random_bits(5, 3000 * sch.bits_per_symbol());
            auto sym = map_symbols(bits, sch);
            CHECK(demap_symbols(sym, sch).bits == bits.bits);
            const double r = 0.499 * min_distance(build_constellation(sch));
            for (auto& s : sym) {
                s += std::polar(r * u(rng), 2.0 * std::numbers::pi * u(rng));
            }
            CHECK(demap_symbols(sym, sch).bits == bits.bits);
        }
    }
    SUBCASE("ties go to the lowest label")
    {
        const std::vector<cplx> origin{{0.0, 0.0}};
        CHECK(demap_symbols(origin, {Modulation::QPSK}).bits == std::vector<std::uint8_t>{0, 0});
        CHECK(demap_symbols(origin, {Modulation::BPSK}).bits == std::vector<std::uint8_t>{0});
    }
}

TEST_CASE("rrc taps")
{
    const PulseShapeConfig cfg{0.35, 8, 10};
    const auto t = rrc_taps(cfg);
    REQUIRE(t.size() == 81);
    double e = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        CHECK(t[k] == t[t.size() - 1 - k]);
        e += t[k] * t[k];
    }
    CHECK(std::abs(e - 1.0) <= 1e-12);

    SUBCASE("singular points use the analytic limit")
    {
        // β = 0.25 and sps = 4 puts a tap exactly on t = ±1/(4β) = ±1
        const auto s = rrc_taps({0.25, 4, 6});
        for (double v : s) {
            CHECK(std::isfinite(v));
        }
        const auto near = rrc_taps({0.25 + 1e-7, 4, 6});
        for (std::size_t k = 0; k < s.size(); ++k) {
            CHECK(s[k] == doctest::Approx(near[k]).epsilon(1e-5));
        }
        const auto full = rrc_taps({1.0, 8, 4});
        for (double v : full) {
            CHECK(std::isfinite(v));
        }
    }
    SUBCASE("config validation")
    {
        CHECK_THROWS_AS((void)rrc_taps({0.0, 8, 10}), std::invalid_argument);
        CHECK_THROWS_AS((void)rrc_taps({0.35, 1, 10}), std::invalid_argument);
        CHECK_THROWS_AS((void)rrc_taps({0.35, 8, 9}), std::invalid_argument);
    }
}

TEST_CASE("raised-cosine self-convolution has symbol-spaced zeros below 1e-3")
{
    // Known to fail at span 10: the samples at ±span/2 symbols sit on the
    // truncation edge and reach about 5.8e-3 of the center.
    const auto t = rrc_taps({0.35, 8, 10});
    std::vector<cplx> tc(t.begin(), t.end());
    const auto rc = convolve(tc, t);
    const std::size_t center = t.size() - 1;
    const double peak = rc[center].real();
    for (std::size_t k = center % 8; k < rc.size(); k += 8) {
        if (k != center) {
            INFO("offset in symbols: ", (static_cast<double>(k) - static_cast<double>(center)) / 8.0);
            CHECK(std::abs(rc[k]) < 1e-3 * peak);
        }
    }
}

TEST_CASE("raised-cosine ISI regression values")
{
    // frozen from an independent frequency-domain RRC, truncated to 81 taps
    const auto t = rrc_taps({0.35, 8, 10});
    std::vector<cplx> tc(t.begin(), t.end());
    const auto rc = convolve(tc, t);
    const std::size_t center = t.size() - 1;
    const double peak = rc[center].real();
    double worst = 0.0;
    for (std::size_t k = center % 8; k < rc.size(); k += 8) {
        if (k != center) {
            worst = std::max(worst, std::abs(rc[k]) / peak);
        }
    }
    CHECK(worst == doctest::Approx(5.8166e-3).epsilon(1e-3));
    CHECK(std::abs(rc[center + 5 * 8]) / peak == doctest::Approx(worst));
}

TEST_CASE("matched filter round trip error below 1e-2")
{
    // Known to fail at span 10: the residual ISI sums to about 0.0204 of the
    // center tap, so the worst symbol error reaches about 0.02.
    const PulseShapeConfig cfg{0.35, 8, 10};
    for (auto m : all_modulations) {
        const ModulationScheme sch{m};
        const auto sym = map_symbols(gen_bits(17, 2000 * sch.bits_per_symbol()), sch);
        const auto rx = matched_filter_downsample(pulse_shape(sym, cfg), cfg, sym.size());
        double worst = 0.0;
        for (std::size_t k = 0; k < sym.size(); ++k) {
            worst = std::max(worst, std::abs(rx[k] - sym[k]));
        }
        CAPTURE(to_string(m));
        CHECK(worst < 1e-2);
    }
}

TEST_CASE("matched filter round trip is bounded by the residual ISI")
{
    const PulseShapeConfig cfg{0.35, 8, 10};
    const auto t = rrc_taps(cfg);
    std::vector<cplx> tc(t.begin(), t.end());
    const auto rc = convolve(tc, t);
    const std::size_t center = t.size() - 1;
    double isi_sum = 0.0;
    for (std::size_t k = center % 8; k < rc.size(); k += 8) {
        if (k != center) {
            isi_sum += std::abs(rc[k]);
        }
    }
    isi_sum /= rc[center].real();
    CHECK(isi_sum == doctest::Approx(0.020364).epsilon(1e-3));

    for (auto m : all_modulations) {
        const ModulationScheme sch{m};
        const auto sym = map_symbols(gen_bits(17, 2000 * sch.bits_per_symbol()), sch);
        const auto rx = matched_filter_downsample(pulse_shape(sym, cfg), cfg, sym.size());
        double worst = 0.0;
        double peak = 0.0;
        for (std::size_t k = 0; k < sym.size(); ++k) {
            worst = std::max(worst, std::abs(rx[k] - sym[k]));
            peak = std::max(peak, std::abs(sym[k]));
        }
        CAPTURE(to_string(m));
        // the center-tap gain error of the truncated filter is below 1e-12
        CHECK(worst <= isi_sum * peak + 1e-9);
        CHECK(demap_symbols(rx, sch).bits == demap_symbols(sym, sch).bits);
    }
}

TEST_CASE("pulse shaping and matched filtering")
{
    const PulseShapeConfig cfg{0.35, 8, 10};
    const auto taps = rrc_taps(cfg);

    SUBCASE("impulse response")
    {
        const std::vector<cplx> one{{1.0, 0.0}};
        const auto env = pulse_shape(one, cfg);
        REQUIRE(env.size() == 8 + taps.size() - 1);
        for (std::size_t k = 0; k < taps.size(); ++k) {
            CHECK(env[k] == cplx{taps[k], 0.0});
        }
        for (std::size_t k = taps.size(); k < env.size(); ++k) {
            CHECK(env[k] == cplx{0.0, 0.0});
        }
    }
    SUBCASE("output length and power")
    {
        const auto sym = map_symbols(gen_bits(3, 20000 * 4), {Modulation::QAM16});
        const auto env = pulse_shape(sym, cfg);
        CHECK(env.size() == sym.size() * 8 + taps.size() - 1);
        CHECK(env.sps() == 8);
        const double p = envelope_stats(env).rms;
        CHECK(p * p == doctest::Approx(1.0 / 8.0).epsilon(0.02));
    }
    SUBCASE("delay bookkeeping with an impulse train")
    {
        std::vector<cplx> sym(40, cplx{0.0, 0.0});
        sym[7] = {1.0, 0.0};
        sym[23] = {0.0, -1.0};
        const auto rx = matched_filter_downsample(pulse_shape(sym, cfg), cfg, sym.size());
        for (std::size_t k = 0; k < sym.size(); ++k) {
            CHECK(std::abs(rx[k] - sym[k]) < 1e-2);
        }
    }
    SUBCASE("zero in, zero out")
    {
        const ComplexEnvelope z(std::vector<cplx>(800, cplx{0.0, 0.0}), 8);
        for (auto& s : matched_filter_downsample(z, cfg, 50)) {
            CHECK(s == cplx{0.0, 0.0});
        }
    }
    SUBCASE("errors")
    {
        CHECK_THROWS_AS((void)pulse_shape(std::vector<cplx>{}, cfg), std::invalid_argument);
        const ComplexEnvelope shortenv(std::vector<cplx>(16, cplx{1.0, 0.0}), 8);
        CHECK_THROWS_AS((void)matched_filter_downsample(shortenv, cfg, 100), std::invalid_argument);
        const ComplexEnvelope wrong_sps(std::vector<cplx>(1600, cplx{1.0, 0.0}), 4);
        CHECK_THROWS_AS((void)matched_filter_downsample(wrong_sps, cfg, 10), std::invalid_argument);
    }
}
