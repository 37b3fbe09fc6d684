#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rcs/constants.hpp"
#include "rcs/error.hpp"
#include "rcs/spectral.hpp"
#include "rcs/sweep.hpp"

using namespace rcs;

namespace {

std::vector<Complex> random_samples(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Complex> s(n);
    for (auto& v : s) v = {g(rng), g(rng)};
    return s;
}

std::size_t argmax_abs(const std::vector<Complex>& v) {
    return static_cast<std::size_t>(std::max_element(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
                                        return std::abs(a) < std::abs(b);
                                    }) -
                                    v.begin());
}

}  // namespace

TEST_CASE("frequency grid enforces its invariants") {
    CHECK_THROWS_AS(FrequencyGrid(10e9, 10e9, 3), InputError);
    CHECK_THROWS_AS(FrequencyGrid(14e9, 10e9, 3), InputError);
    CHECK_THROWS_AS(FrequencyGrid(0.0, 10e9, 3), InputError);
    CHECK_THROWS_AS(FrequencyGrid(1e9, 2e9, 1), InputError);

    const FrequencyGrid g(10e9, 14e9, 2001);
    CHECK(g.step() == doctest::Approx(2e6).epsilon(1e-15));
    CHECK(g.frequency(0) == 10e9);
    CHECK(g.frequency(2000) == doctest::Approx(14e9).epsilon(1e-15));
    CHECK(g.frequency(1000) == doctest::Approx(12e9).epsilon(1e-15));
    CHECK(g.frequencies().size() == 2001);
}

TEST_CASE("sweep rejects wrong length and non-finite samples") {
    const FrequencyGrid g(1e9, 2e9, 4);
    CHECK_THROWS_AS(FrequencySweep(g, std::vector<Complex>(3)), InputError);
    std::vector<Complex> s(4);
    s[2] = {std::nan(""), 0.0};
    CHECK_THROWS_AS(FrequencySweep(g, s), InputError);
    s[2] = {0.0, INFINITY};
    CHECK_THROWS_AS(FrequencySweep(g, s), InputError);
    s[2] = {1.0, 2.0};
    const FrequencySweep ok(g, s, Scenario::sphere);
    CHECK(ok.label() == Scenario::sphere);
    CHECK(ok.energy() == doctest::Approx(5.0));
}

TEST_CASE("scenario names round trip") {
    for (const auto s : {Scenario::target, Scenario::background, Scenario::sphere, Scenario::sphere_background}) {
        CHECK(scenario_from_string(to_string(s)) == s);
    }
    CHECK_THROWS_AS(scenario_from_string("clutter"), InputError);
}

TEST_CASE("windows match their defining formulas") {
    const std::size_t n = 33;
    const auto h = window_samples(WindowSpec::hann(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(h[i] == doctest::Approx(oracle::hann(i, n)).epsilon(1e-14));

    const auto r = window_samples(WindowSpec::rectangular(), n);
    CHECK(std::all_of(r.begin(), r.end(), [](double v) { return v == 1.0; }));

    const auto t0 = window_samples(WindowSpec::tukey(0.0), n);
    CHECK(t0 == r);
    const auto t1 = window_samples(WindowSpec::tukey(1.0), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(t1[i] == doctest::Approx(h[i]).epsilon(1e-14));

    // Tukey(0.25): flat over the middle 75 %, cosine flanks.
    const auto tk = window_samples(WindowSpec::tukey(0.25), 101);
    CHECK(tk[0] == doctest::Approx(0.0));
    CHECK(tk[50] == 1.0);
    CHECK(tk[13] == 1.0);
    CHECK(tk[6] == doctest::Approx(0.5 * (1.0 - std::cos(2.0 * oracle::pi * 0.06 / 0.25))));

    CHECK_THROWS_AS(WindowSpec::tukey(-0.1), InputError);
    CHECK_THROWS_AS(WindowSpec::tukey(1.1), InputError);
}

TEST_CASE("coherent gain is the window mean and positive") {
    for (const auto& w : {WindowSpec::rectangular(), WindowSpec::hann(), WindowSpec::tukey(0.25)}) {
        for (std::size_t n : {2u, 3u, 64u, 2001u}) {
            const auto s = window_samples(w, n);
            double mean = 0.0;
            for (double v : s) mean += v;
            mean /= static_cast<double>(n);
            CHECK(coherent_gain(w, n) == doctest::Approx(mean).epsilon(1e-14));
            if (w.kind != WindowKind::rectangular && n == 2) continue;  // both samples are zero
            CHECK(coherent_gain(w, n) > 0.0);
        }
    }
}

TEST_CASE("constant spectrum transforms to a unit impulse at zero delay") {
    const FrequencyGrid g(10e9, 14e9, 64);
    const FrequencySweep s(g, std::vector<Complex>(64, Complex(1.0, 0.0)));
    const auto p = to_time_domain(s, WindowSpec::rectangular(), 1);
    CHECK(std::abs(p.samples[0]) == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t k = 1; k < p.size(); ++k) CHECK(std::abs(p.samples[k]) < 1e-12);
    CHECK(p.t0 == 0.0);
}

TEST_CASE("zero spectrum transforms to zero profile and back") {
    const FrequencyGrid g(1e9, 2e9, 16);
    const FrequencySweep s(g, std::vector<Complex>(16));
    const auto p = to_time_domain(s, WindowSpec::hann(), 4);
    CHECK(std::all_of(p.samples.begin(), p.samples.end(), [](const Complex& v) { return v == Complex{}; }));
    const auto back = to_frequency_domain(p, g);
    CHECK(back.energy() == 0.0);
}

TEST_CASE("a delayed tone peaks at its delay; the transform equals the direct DFT sum") {
    const FrequencyGrid g(10e9, 14e9, 16);
    const double tau = 3.0 / g.bandwidth();
    std::vector<Complex> s(16);
    for (std::size_t i = 0; i < 16; ++i) s[i] = std::polar(1.0, -2.0 * oracle::pi * g.frequency(i) * tau);
    const FrequencySweep sweep(g, s);
    const auto p = to_time_domain(sweep, WindowSpec::rectangular(), 1);

    const auto ref = oracle::direct_profile(s, std::vector<double>(16, 1.0), 1);
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(p.samples[k] - ref[k]) < 1e-12);
    const auto k = argmax_abs(p.samples);
    CHECK(std::abs(p.time(k) - tau) <= p.dt);
}

TEST_CASE("windowed, padded transform matches the direct sum") {
    const FrequencyGrid g(25.75e9, 30.25e9, 37);
    const auto s = random_samples(37, 11);
    const auto p = to_time_domain(FrequencySweep(g, s), WindowSpec::hann(), 4);
    const auto ref = oracle::direct_profile(s, oracle::hann_vec(37), 4);
    REQUIRE(p.size() == ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(std::abs(p.samples[k] - ref[k]) < 1e-12);
    CHECK(p.dt == doctest::Approx(1.0 / (4.0 * 37.0 * g.step())).epsilon(1e-14));
    CHECK(p.period() == doctest::Approx(1.0 / g.step()).epsilon(1e-14));
}

TEST_CASE("zero-pad factor must lie in [1, 16]") {
    const FrequencySweep s(FrequencyGrid(1e9, 2e9, 8), std::vector<Complex>(8, 1.0));
    CHECK_THROWS_AS(to_time_domain(s, WindowSpec::hann(), 0), InputError);
    CHECK_THROWS_AS(to_time_domain(s, WindowSpec::hann(), 17), InputError);
    CHECK_NOTHROW(to_time_domain(s, WindowSpec::hann(), 16));
}

TEST_CASE("rectangular round trip reproduces the sweep") {
    const FrequencyGrid g(10e9, 14e9, 64);
    const auto s = random_samples(64, 5);
    const auto back = to_frequency_domain(to_time_domain(FrequencySweep(g, s), WindowSpec::rectangular(), 1), g);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 64; ++i) {
        num += std::norm(back[i] - s[i]);
        den += std::norm(s[i]);
    }
    CHECK(std::sqrt(num / den) < 1e-10);
}

TEST_CASE("hann round trip recovers the sweep once the window is divided out") {
    const FrequencyGrid g(10e9, 14e9, 64);
    const auto s = random_samples(64, 6);
    const auto weighted = to_frequency_domain(to_time_domain(FrequencySweep(g, s), WindowSpec::hann(), 4), g);
    const auto w = oracle::hann_vec(64);
    for (std::size_t i = 0; i < 64; ++i) {
        if (w[i] < 1e-3) continue;
        CHECK(std::abs(weighted[i] / w[i] - s[i]) < 1e-8 * std::max(1.0, std::abs(s[i])));
    }
    const auto unweighted = remove_window(weighted, WindowSpec::hann());
    CHECK(std::abs(unweighted[10] - s[10]) < 1e-8);
    CHECK(unweighted[0] == Complex{});
}

TEST_CASE("profile and grid length mismatch is rejected") {
    const FrequencyGrid g(10e9, 14e9, 32);
    const auto p = to_time_domain(FrequencySweep(g, random_samples(32, 1)), WindowSpec::rectangular(), 2);
    CHECK_THROWS_AS(to_frequency_domain(p, FrequencyGrid(10e9, 14e9, 33)), InputError);
}

TEST_CASE("non-finite samples are rejected by the shared validator") {
    std::vector<Complex> s(4, 1.0);
    CHECK_NOTHROW(require_finite(s, "x"));
    s[1] = {0.0, std::nan("")};
    CHECK_THROWS_AS(require_finite(s, "x"), InputError);
}

TEST_CASE("property: Parseval with rectangular window and no padding") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const std::size_t n = 17 + 13 * seed;
        const auto s = random_samples(n, 100 + seed);
        const auto p = to_time_domain(FrequencySweep(FrequencyGrid(1e9, 3e9, n), s), WindowSpec::rectangular(), 1);
        double es = 0.0, ep = 0.0;
        for (const auto& v : s) es += std::norm(v);
        for (const auto& v : p.samples) ep += std::norm(v);
        // p = (1/N) IDFT(s)  =>  sum |p|^2 = (1/N) sum |s|^2.
        CHECK(ep * static_cast<double>(n) == doctest::Approx(es).epsilon(1e-9));
    }
}

TEST_CASE("property: linearity") {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    const FrequencyGrid g(10e9, 14e9, 40);
    for (int trial = 0; trial < 5; ++trial) {
        const auto s1 = random_samples(40, 200 + trial), s2 = random_samples(40, 300 + trial);
        const Complex a(nd(rng), nd(rng)), b(nd(rng), nd(rng));
        std::vector<Complex> mix(40);
        for (std::size_t i = 0; i < 40; ++i) mix[i] = a * s1[i] + b * s2[i];
        const auto w = WindowSpec::tukey(0.25);
        const auto pm = to_time_domain(FrequencySweep(g, mix), w, 2);
        const auto p1 = to_time_domain(FrequencySweep(g, s1), w, 2);
        const auto p2 = to_time_domain(FrequencySweep(g, s2), w, 2);
        for (std::size_t k = 0; k < pm.size(); ++k) {
            CHECK(std::abs(pm.samples[k] - (a * p1.samples[k] + b * p2.samples[k])) < 1e-10);
        }
    }
}

TEST_CASE("property: a phase ramp shifts the peak by its delay") {
    const FrequencyGrid g(10e9, 14e9, 201);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(2e-9, 40e-9);
    for (int trial = 0; trial < 10; ++trial) {
        const double tau = u(rng);
        std::vector<Complex> s(201);
        for (std::size_t i = 0; i < 201; ++i) s[i] = std::polar(1.0, -2.0 * oracle::pi * g.frequency(i) * tau);
        const auto p = to_time_domain(FrequencySweep(g, s), WindowSpec::hann(), 4);
        const auto k = argmax_abs(p.samples);
        CHECK(std::abs(p.time(k) - tau) <= p.dt);
    }
}

TEST_CASE("unit conventions") {
    CHECK(power_to_db(2.0) == doctest::Approx(3.0103).epsilon(1e-5));
    CHECK(amplitude_to_db(2.0) == doctest::Approx(6.0206).epsilon(1e-5));
    CHECK(db_to_power(power_to_db(0.37)) == doctest::Approx(0.37));
    CHECK(delay_to_range(2.0 * 5.0 / oracle::c0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(kSpeedOfLight == 299792458.0);
}
