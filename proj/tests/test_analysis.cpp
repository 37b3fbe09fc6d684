#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rcs/analysis.hpp"
#include "rcs/report.hpp"
#include "rcs/svg.hpp"

using namespace rcs;

namespace {

ExtractionRecord rec(const std::string& band, double theta, double phi, double m2) {
    ExtractionRecord r;
    r.band = band;
    r.theta_deg = theta;
    r.phi_deg = phi;
    r.rcs_m2 = m2;
    r.rcs_dbsm = oracle::dbsm(m2);
    return r;
}

std::vector<ExtractionRecord> sweep_records(const std::string& band, std::vector<double> thetas, double phi_step,
                                            double phi_max, double (*rcs)(double, double)) {
    std::vector<ExtractionRecord> out;
    for (double t : thetas)
        for (double p = 0.0; p <= phi_max + 1e-9; p += phi_step) out.push_back(rec(band, t, p, rcs(t, p)));
    return out;
}

double pattern(double t, double p) { return 0.1 + 0.05 * std::cos(p * oracle::pi / 90.0) + 0.001 * t; }

// Calibrated spectrum of point scatterers, phase referenced to `ref`.
SigmaSpectrum oracle_spectrum(const FrequencyGrid& g, const std::vector<std::pair<double, double>>& pts, double ref) {
    SigmaSpectrum s{g, std::vector<Complex>(g.size()), "b", ref, 0, g.size()};
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (const auto& [sigma, d] : pts) {
            s.sqrt_sigma[i] += std::sqrt(sigma) * std::polar(1.0, -4.0 * oracle::pi * g.frequency(i) * (d - ref) / oracle::c0);
        }
    }
    return s;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& v, double floor) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > floor) out.push_back(i);
    return out;
}

}  // namespace

TEST_CASE("grid from two elevations and 19 azimuths") {
    const auto g = build_rcs_grid(sweep_records("fr3", {0, 10}, 10, 180, pattern), false);
    CHECK(g.rows() == 2);
    CHECK(g.cols() == 19);
    for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t c = 0; c < 19; ++c) CHECK(g.measured(r, c));
    CHECK(g.at(1, 3) == doctest::Approx(oracle::dbsm(pattern(10, 30))));
    CHECK(g.band_label == "fr3");
}

TEST_CASE("mirrored car grid has 17 synthesized columns per row") {
    const auto g = build_rcs_grid(sweep_records("fr2", {0, 10}, 10, 180, pattern), true);
    CHECK(g.rows() == 2);
    CHECK(g.cols() == 36);
    for (std::size_t r = 0; r < 2; ++r) {
        std::size_t mirrored = 0;
        for (std::size_t c = 0; c < 36; ++c) {
            if (g.source_at(r, c) != CellSource::mirrored) continue;
            ++mirrored;
            const double phi = g.phi_deg[c];
            const auto src = std::find(g.phi_deg.begin(), g.phi_deg.end(), 360.0 - phi) - g.phi_deg.begin();
            CHECK(g.at(r, c) == g.at(r, static_cast<std::size_t>(src)));
        }
        CHECK(mirrored == 17);
    }
}

TEST_CASE("six elevations with mixed coverage give one row each plus missing cells") {
    std::vector<ExtractionRecord> recs;
    for (double t : {0.0, 10.0, 20.0, 30.0, 40.0, 50.0})
        for (double p : {0.0, 90.0, 180.0}) recs.push_back(rec("b", t, p, 0.2));
    recs.push_back(rec("b", 60.0, 90.0, 0.2));
    const auto g = build_rcs_grid(recs, false);
    CHECK(g.rows() == 7);
    CHECK(g.source_at(6, 0) == CellSource::missing);
    CHECK(std::isnan(g.at(6, 0)));
}

TEST_CASE("grid construction rejects duplicates, mixed bands and no records") {
    auto recs = sweep_records("b", {0}, 90, 180, pattern);
    recs.push_back(rec("b", 0, 90, 1.0));
    CHECK_THROWS_AS(build_rcs_grid(recs, false), InputError);
    CHECK_THROWS_AS(build_rcs_grid({rec("a", 0, 0, 1.0), rec("b", 0, 10, 1.0)}, false), InputError);
    CHECK_THROWS_AS(build_rcs_grid({}, false), InputError);
}

TEST_CASE("delta RCS examples") {
    const auto g1 = build_rcs_grid(sweep_records("b1", {0, 10}, 10, 180, pattern), false);
    SUBCASE("identical grids") {
        const auto d = delta_rcs(g1, g1);
        CHECK(d.size() == 38);
        for (const auto& s : d) CHECK(s.delta_db == 0.0);
    }
    SUBCASE("band 2 doubled") {
        auto recs = sweep_records("b2", {0, 10}, 10, 180, pattern);
        for (auto& r : recs) {
            r.rcs_m2 *= 2.0;
            r.rcs_dbsm = oracle::dbsm(r.rcs_m2);
        }
        const auto d = delta_rcs(g1, build_rcs_grid(recs, false));
        for (const auto& s : d) CHECK(s.delta_db == doctest::Approx(3.0103).epsilon(1e-5));
    }
    SUBCASE("no shared cells") {
        const auto g2 = build_rcs_grid({rec("b2", 30, 0, 1.0), rec("b2", 30, 10, 1.0)}, false);
        CHECK_THROWS_AS(delta_rcs(g1, g2), InputError);
    }
}

TEST_CASE("property: delta RCS is exactly antisymmetric") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    std::vector<ExtractionRecord> a, b;
    for (double t : {0.0, 20.0})
        for (double p = 0; p <= 180; p += 15) {
            a.push_back(rec("a", t, p, u(rng)));
            b.push_back(rec("b", t, p, u(rng)));
        }
    const auto ga = build_rcs_grid(a, false), gb = build_rcs_grid(b, false);
    const auto ab = delta_rcs(ga, gb), ba = delta_rcs(gb, ga);
    REQUIRE(ab.size() == ba.size());
    for (std::size_t i = 0; i < ab.size(); ++i) {
        CHECK(ab[i].theta_deg == ba[i].theta_deg);
        CHECK(ab[i].phi_deg == ba[i].phi_deg);
        CHECK(ab[i].delta_db == -ba[i].delta_db);
    }
}

TEST_CASE("property: mirrored cells only contribute when both grids mirror them") {
    const auto full = sweep_records("b2", {0}, 10, 350, pattern);
    const auto half = sweep_records("b1", {0}, 10, 180, pattern);
    const auto g_half = build_rcs_grid(half, true);
    const auto g_full = build_rcs_grid(full, false);
    // 19 cells measured in both; the 17 mirrored cells of g_half are excluded.
    CHECK(delta_rcs(g_half, g_full).size() == 19);
    CHECK(delta_rcs(g_half, build_rcs_grid(sweep_records("b3", {0}, 10, 180, pattern), true)).size() == 19);
}

TEST_CASE("Gaussian fit") {
    const std::vector<double> zeros{0, 0, 0};
    auto f = fit_gaussian(zeros);
    CHECK(f.mu_db == 0.0);
    CHECK(f.sigma_db == 0.0);
    CHECK(f.n_samples == 3);
    const std::vector<double> pair{1, 3};
    f = fit_gaussian(pair);
    CHECK(f.mu_db == 2.0);
    CHECK(f.sigma_db == 1.0);
    const std::vector<double> one{1};
    CHECK_THROWS_AS(fit_gaussian(one), InputError);
    const std::vector<double> constant(50, -4.25);
    f = fit_gaussian(constant);
    CHECK(f.mu_db == doctest::Approx(-4.25).epsilon(1e-15));
    CHECK(f.sigma_db == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Gaussian fit recovers seeded N(1.12, 2.32^2)") {
    std::mt19937_64 rng(20241019);
    std::normal_distribution<double> nd(1.12, 2.32);
    std::vector<double> s(10000);
    for (auto& v : s) v = nd(rng);
    const auto f = fit_gaussian(s);
    CHECK(std::abs(f.mu_db - 1.12) <= 0.07);
    CHECK(std::abs(f.sigma_db - 2.32) <= 0.05);
}

TEST_CASE("scale table groups by elevation then overall") {
    std::vector<DeltaRcsSample> s;
    for (double p : {0.0, 10.0, 20.0}) s.push_back({0.0, p, 1.0 + p / 10.0});
    for (double p : {0.0, 10.0}) s.push_back({10.0, p, -1.0});
    s.push_back({20.0, 0.0, 5.0});  // single sample: no row
    const auto rows = scale_table(s);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].label == "0");
    CHECK(rows[0].fit.mu_db == 2.0);
    CHECK(rows[1].label == "10");
    CHECK(rows[1].fit.sigma_db == 0.0);
    CHECK(rows[2].label == "Overall");
    CHECK(!rows[2].theta_deg);
    CHECK(rows[2].fit.n_samples == 6);
    const auto text = scale_table_to_text(rows);
    CHECK(text.find("Overall") != std::string::npos);
}

TEST_CASE("quantiles and Freedman-Diaconis histogram") {
    CHECK(quantile({1, 2, 3, 4}, 0.5) == 2.5);
    CHECK(quantile({4, 1, 3, 2}, 0.25) == 1.75);
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) v.push_back(i);
    const auto h = histogram_fd(v);
    const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
    CHECK(h.bin_width == doctest::Approx(2.0 * iqr / std::cbrt(1000.0)));
    std::size_t total = 0;
    for (auto c : h.counts) total += c;
    CHECK(total == 1000);
    const std::vector<double> flat(5, 2.0);
    const auto hf = histogram_fd(flat);
    CHECK(hf.counts.size() == 1);
    CHECK(hf.counts[0] == 5);
}

TEST_CASE("range response centres a scatterer at the target distance") {
    const FrequencyGrid g(10e9, 14e9, 2001);
    const auto spec = oracle_spectrum(g, {{1.0, 6.0}}, 4.0);
    const auto prof = range_response(spec, 6.0);
    const auto k = std::max_element(prof.magnitude.begin(), prof.magnitude.end()) - prof.magnitude.begin();
    const double bin = prof.range_m[1] - prof.range_m[0];
    CHECK(std::abs(prof.range_m[static_cast<std::size_t>(k)]) <= bin);
    CHECK(prof.range_m.front() == doctest::Approx(-prof.range_m.back()));
    CHECK(prof.magnitude[static_cast<std::size_t>(k)] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("two scatterers 0.5 m either side of centre are resolved at 4 GHz") {
    const FrequencyGrid g(10e9, 14e9, 2001);
    const double cell = oracle::c0 / (2.0 * g.bandwidth());
    CHECK(cell == doctest::Approx(0.0375).epsilon(1e-3));
    const auto prof = range_response(oracle_spectrum(g, {{0.5, 5.5}, {0.5, 6.5}}, 4.0), 6.0);
    const double peak = *std::max_element(prof.magnitude.begin(), prof.magnitude.end());
    const auto maxima = local_maxima(prof.magnitude, 0.5 * peak);
    REQUIRE(maxima.size() == 2);
    CHECK(std::abs(prof.range_m[maxima[0]] + 0.5) <= cell);
    CHECK(std::abs(prof.range_m[maxima[1]] - 0.5) <= cell);
    // Resolved: a deep dip between them.
    const auto mid = std::min_element(prof.magnitude.begin() + maxima[0], prof.magnitude.begin() + maxima[1]);
    CHECK(*mid < 0.1 * peak);
}

TEST_CASE("zero spectrum gives a zero profile") {
    const FrequencyGrid g(10e9, 14e9, 101);
    const auto prof = range_response(oracle_spectrum(g, {}, 4.0), 4.0);
    CHECK(std::all_of(prof.magnitude.begin(), prof.magnitude.end(), [](double v) { return v == 0.0; }));
}

namespace {

AzimuthProfile flat_profile(double phi, double value, std::size_t n = 5) {
    AzimuthProfile p;
    p.phi_deg = phi;
    for (std::size_t i = 0; i < n; ++i) {
        p.profile.range_m.push_back(static_cast<double>(i) - static_cast<double>(n / 2));
        p.profile.magnitude.push_back(value + static_cast<double>(i));
    }
    return p;
}

}  // namespace

TEST_CASE("range-azimuth interpolation") {
    SUBCASE("linear midpoint is the pointwise mean") {
        const auto img = build_range_azimuth_image({flat_profile(0, 1.0), flat_profile(10, 3.0)}, AngularInterp::linear, 5.0);
        REQUIRE(img.phi_axis_deg == std::vector<double>{0, 5, 10});
        for (std::size_t r = 0; r < 5; ++r) CHECK(img.columns[1][r] == 0.5 * (img.columns[0][r] + img.columns[2][r]));
        CHECK(img.measured == std::vector<bool>{true, false, true});
        CHECK(img.interpolation_note.find("linear") != std::string::npos);
    }
    SUBCASE("nearest at 4 degrees copies 0 degrees") {
        const auto img = build_range_azimuth_image({flat_profile(0, 1.0), flat_profile(10, 3.0)}, AngularInterp::nearest,
                                                   1.0);
        CHECK(img.columns[4] == img.columns[0]);
        CHECK(img.columns[6] == img.columns[10]);
        CHECK(img.columns[5] == img.columns[0]);  // tie goes low
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(build_range_azimuth_image({flat_profile(0, 1.0)}, AngularInterp::linear), InputError);
        CHECK_THROWS_AS(build_range_azimuth_image({flat_profile(0, 1.0), flat_profile(10, 1.0, 7)}, AngularInterp::linear),
                        InputError);
    }
}

TEST_CASE("measured columns are inserted verbatim for a 19-angle oracle set") {
    const FrequencyGrid g(10e9, 14e9, 401);
    std::vector<AzimuthProfile> profs;
    for (int p = 0; p <= 180; p += 10) {
        const double d = 6.0 + 0.3 * std::cos(p * oracle::pi / 180.0);
        profs.push_back({static_cast<double>(p), range_response(oracle_spectrum(g, {{0.5, d}}, 4.0), 6.0)});
    }
    for (auto interp : {AngularInterp::nearest, AngularInterp::linear}) {
        const auto img = build_range_azimuth_image(profs, interp, 1.0);
        CHECK(img.phi_axis_deg.size() == 181);
        for (const auto& p : profs) {
            const auto j = static_cast<std::size_t>(p.phi_deg);
            CHECK(img.measured[j]);
            CHECK(img.columns[j] == p.profile.magnitude);
        }
    }
}

TEST_CASE("top contributors") {
    const FrequencyGrid g(10e9, 14e9, 801);
    SUBCASE("three-scatterer target recovered within one bin") {
        // Scatterers sit at distinct azimuths so each is its column's dominant peak.
        const std::vector<std::tuple<double, double, double>> truth{{0.0, -0.4, 1.0}, {20.0, 0.3, 0.6}, {40.0, 0.0, 0.3}};
        std::vector<AzimuthProfile> profs;
        for (const auto& [phi, r, sigma] : truth) {
            profs.push_back({phi, range_response(oracle_spectrum(g, {{sigma, 6.0 + r}}, 4.0), 6.0)});
        }
        const auto img = build_range_azimuth_image(profs, AngularInterp::linear, 10.0);
        const auto top = top_contributors(img, 3);
        REQUIRE(top.points.size() == 3);
        const double bin = img.range_axis_m[1] - img.range_axis_m[0];
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(top.points[i].phi_deg == std::get<0>(truth[i]));
            CHECK(std::abs(top.points[i].range_m - std::get<1>(truth[i])) <= bin);
        }
        CHECK(!top.truncated);
    }
    SUBCASE("scaling the image does not change the ranking") {
        std::vector<AzimuthProfile> profs;
        for (int p = 0; p <= 40; p += 10) {
            profs.push_back({static_cast<double>(p),
                             range_response(oracle_spectrum(g, {{0.5, 5.7 + 0.01 * p}, {0.2, 6.4}}, 4.0), 6.0)});
        }
        const auto a = top_contributors(build_range_azimuth_image(profs, AngularInterp::linear), 4);
        for (auto& p : profs)
            for (auto& v : p.profile.magnitude) v *= 37.5;
        const auto b = top_contributors(build_range_azimuth_image(profs, AngularInterp::linear), 4);
        REQUIRE(a.points.size() == b.points.size());
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            CHECK(a.points[i].range_m == b.points[i].range_m);
            CHECK(a.points[i].phi_deg == b.points[i].phi_deg);
        }
    }
    SUBCASE("ties break on smaller |range| then smaller phi; shortfall is flagged") {
        RangeAzimuthImage img;
        img.range_axis_m = {-2, -1, 0, 1, 2};
        img.phi_axis_deg = {0, 10};
        img.columns = {{0, 1, 0, 1, 0}, {0, 1, 0, 0, 0}};
        img.measured = {true, true};
        const auto top = top_contributors(img, 5);
        REQUIRE(top.points.size() == 3);
        CHECK(top.truncated);
        CHECK(top.points[0].range_m == -1);
        CHECK(top.points[0].phi_deg == 0);
        CHECK(top.points[1].range_m == 1);
        CHECK(top.points[2].phi_deg == 10);
        CHECK_THROWS_AS(top_contributors(img, 0), InputError);
    }
}

TEST_CASE("property: grid CSV round trip within 1e-9 dB") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(1e-4, 50.0);
    std::vector<ExtractionRecord> recs;
    for (double t : {0.0, 10.0, 20.0})
        for (double p = 0; p <= 180; p += 10) recs.push_back(rec("b", t, p, u(rng)));
    recs.pop_back();
    const auto g = build_rcs_grid(recs, false);
    const auto back = grid_from_csv(grid_to_csv(g), "b");
    REQUIRE(back.rows() == g.rows());
    REQUIRE(back.cols() == g.cols());
    for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) {
            CHECK(back.source_at(r, c) == (g.measured(r, c) ? CellSource::measured : CellSource::missing));
            if (g.measured(r, c)) CHECK(std::abs(back.at(r, c) - g.at(r, c)) <= 1e-9);
        }
}

TEST_CASE("figures are well-formed SVG") {
    const auto g = build_rcs_grid(sweep_records("b", {0, 10}, 10, 180, pattern), true);
    const auto heat = heatmap_svg(g, "heat");
    CHECK(heat.find("<svg") != std::string::npos);
    CHECK(heat.find("url(#mirror)") != std::string::npos);
    CHECK(heat.find("</svg>") != std::string::npos);
    const std::vector<double> s{0.1, -0.3, 0.5, 1.2, 0.7};
    const auto hist = histogram_svg(s, fit_gaussian(s), "hist");
    CHECK(hist.find("</svg>") != std::string::npos);
    CHECK(hist.find("nan") == std::string::npos);
}
