#include "rcs/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include <json.hpp>

#include "rcs/constants.hpp"
#include "rcs/error.hpp"
#include "rcs/ingest.hpp"

namespace rcs {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

double deg2rad(double d) { return d * kPi / 180.0; }

std::string angle_tag(double deg) {
    char buf[32];
    if (std::abs(deg - std::round(deg)) < 1e-9) {
        std::snprintf(buf, sizeof buf, "%03lld", static_cast<long long>(std::llround(deg)));
    } else {
        std::snprintf(buf, sizeof buf, "%07.3f", deg);
    }
    return buf;
}

Complex complex_from(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw InputError("complex values are numbers or [re, im] pairs");
}

SystemResponse response_from(const json& j) {
    if (j.contains("polynomial")) {
        std::vector<Complex> c;
        for (const auto& v : j["polynomial"]) c.push_back(complex_from(v));
        return SystemResponse::polynomial(std::move(c));
    }
    if (j.contains("tabulated")) {
        std::vector<SystemResponse::TablePoint> pts;
        for (const auto& v : j["tabulated"]) {
            if (!v.is_array() || v.size() != 3) throw InputError("tabulated points are [f_hz, re, im]");
            pts.push_back({v[0].get<double>(), {v[1].get<double>(), v[2].get<double>()}});
        }
        return SystemResponse::tabulated(std::move(pts));
    }
    throw InputError("system_response needs 'polynomial' or 'tabulated'");
}

std::vector<double> angle_list(const json& j) {
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_number()) return {j.get<double>()};
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const double step = j.at("step").get<double>();
    if (!(step > 0.0)) throw InputError("angle step must be > 0");
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
    return out;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SystemResponse SystemResponse::polynomial(std::vector<Complex> coefficients) {
    SystemResponse r;
    r.coefficients_ = std::move(coefficients);
    return r;
}

SystemResponse SystemResponse::tabulated(std::vector<TablePoint> points) {
    if (points.empty()) throw InputError("tabulated system response needs points");
    std::sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.f_hz < b.f_hz; });
    SystemResponse r;
    r.table_ = std::move(points);
    return r;
}

Complex SystemResponse::evaluate(double f_hz, const FrequencyGrid& grid) const {
    if (!coefficients_.empty()) {
        const double x = (f_hz - grid.center()) / (grid.bandwidth() / 2.0);
        Complex acc{};
        for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }
    if (!table_.empty()) {
        if (f_hz <= table_.front().f_hz) return table_.front().value;
        if (f_hz >= table_.back().f_hz) return table_.back().value;
        const auto hi = std::upper_bound(table_.begin(), table_.end(), f_hz,
                                         [](double f, const TablePoint& p) { return f < p.f_hz; });
        const auto lo = hi - 1;
        const double u = (f_hz - lo->f_hz) / (hi->f_hz - lo->f_hz);
        return lo->value + u * (hi->value - lo->value);
    }
    return {1.0, 0.0};
}

NoiseSource::NoiseSource(std::uint64_t seed, double rms) : engine_(seed), rms_(rms) {}

// 53-bit uniform in (0, 1].
double NoiseSource::uniform() {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

Complex NoiseSource::next() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double s = rms_ / std::sqrt(2.0);
    return {s * r * std::cos(2.0 * kPi * u2), s * r * std::sin(2.0 * kPi * u2)};
}

FrequencySweep simulate_sweep(const SyntheticScene& scene, Scenario which, const FrequencyGrid& grid,
                              const SphereSpec& sphere) {
    if (!(scene.noise_rms >= 0.0)) throw InputError("noise_rms must be >= 0");
    std::vector<PointScatterer> echoes = scene.clutter_scatterers;
    if (which == Scenario::target) {
        echoes.insert(echoes.end(), scene.target_scatterers.begin(), scene.target_scatterers.end());
    } else if (which == Scenario::sphere) {
        echoes.push_back({kPi * sphere.radius_m * sphere.radius_m, sphere.distance_m, 0.0});
    }
    for (const auto& e : echoes) {
        if (!(e.sigma_m2 >= 0.0) || !(e.distance_m > 0.0)) {
            throw InputError("scatterers need sigma >= 0 and distance > 0");
        }
    }

    NoiseSource noise(scene.seed, scene.noise_rms);
    std::vector<Complex> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double f = grid.frequency(i);
        Complex sum{};
        for (const auto& e : echoes) {
            const double amp = std::sqrt(e.sigma_m2) / (e.distance_m * e.distance_m);
            sum += std::polar(amp, -4.0 * kPi * f * e.distance_m / kSpeedOfLight + e.phase_offset_rad);
        }
        const Complex g = scene.system_response.evaluate(f, grid);
        if (std::abs(g) < 1e-12) throw InputError("system response vanishes inside the band");
        out[i] = g * sum;
        if (scene.noise_rms > 0.0) out[i] += noise.next();
    }
    return FrequencySweep(grid, std::move(out), which);
}

double projected_range(const BodyScatterer& s, double target_distance_m, double theta_deg, double phi_deg) {
    const double t = deg2rad(theta_deg);
    const double p = deg2rad(phi_deg);
    const double ux = std::cos(t) * std::cos(p);
    const double uy = -std::cos(t) * std::sin(p);
    const double uz = std::sin(t);
    return target_distance_m - (s.x_m * ux + s.y_m * uy + s.z_m * uz);
}

SyntheticScene scene_at(const SceneTemplate& tmpl, std::size_t band_index, double theta_deg,
                        double phi_deg, std::uint64_t stream) {
    if (band_index >= tmpl.bands.size()) throw InputError("band index out of range");
    const auto& band = tmpl.bands[band_index];
    SyntheticScene scene;
    const double gain = db_to_power(band.target_gain_db);
    for (const auto& s : tmpl.scatterers) {
        scene.target_scatterers.push_back(
            {s.sigma_m2 * gain, projected_range(s, tmpl.target.distance_m, theta_deg, phi_deg), s.phase_rad});
    }
    scene.clutter_scatterers = tmpl.clutter;
    scene.system_response = band.system_response.value_or(tmpl.system_response);
    scene.noise_rms = tmpl.noise_rms;
    scene.seed = mix_seed(tmpl.seed, stream);
    return scene;
}

SceneTemplate parse_scene(const std::string& json_text) {
    SceneTemplate t;
    try {
        const auto j = json::parse(json_text);
        t.campaign_id = j.value("campaign_id", t.campaign_id);
        t.seed = j.value("seed", std::uint64_t{0});
        t.noise_rms = j.value("noise_rms", 0.0);
        t.mirror_azimuth = j.value("mirror_azimuth", false);
        const auto layout = j.value("sphere_layout", std::string("per_angle"));
        if (layout == "per_angle") t.sphere_layout = SphereLayout::per_angle;
        else if (layout == "per_band") t.sphere_layout = SphereLayout::per_band;
        else throw InputError("sphere_layout must be per_angle or per_band");

        for (const auto& jb : j.at("bands")) {
            SynthBand b;
            b.spec.name = jb.at("name").get<std::string>();
            b.spec.f_start_hz = jb.at("f_start_hz").get<double>();
            b.spec.f_stop_hz = jb.at("f_stop_hz").get<double>();
            b.spec.n_samples = jb.at("n_samples").get<std::size_t>();
            b.spec.antenna_hpbw_deg = jb.value("antenna_hpbw_deg", 20.0);
            b.target_gain_db = jb.value("target_gain_db", 0.0);
            if (jb.contains("system_response")) b.system_response = response_from(jb["system_response"]);
            (void)b.spec.grid();
            t.bands.push_back(std::move(b));
        }
        if (t.bands.empty()) throw InputError("scene needs at least one band");

        const auto& js = j.at("sphere");
        t.sphere = {js.at("radius_m").get<double>(), js.at("distance_m").get<double>()};

        const auto& jt = j.at("target");
        t.target.name = jt.value("name", std::string("target"));
        t.target.height_m = jt.value("height_m", 0.0);
        t.target.width_m = jt.value("width_m", 0.0);
        t.target.length_m = jt.value("length_m", 0.0);
        t.target.distance_m = jt.at("distance_m").get<double>();
        t.target.environment = jt.value("environment", std::string("indoor"));
        for (const auto& s : jt.at("scatterers")) {
            t.scatterers.push_back({s.value("x_m", 0.0), s.value("y_m", 0.0), s.value("z_m", 0.0),
                                    s.at("sigma_m2").get<double>(), s.value("phase_rad", 0.0)});
        }
        if (j.contains("clutter")) {
            for (const auto& c : j["clutter"]) {
                t.clutter.push_back({c.at("sigma_m2").get<double>(), c.at("distance_m").get<double>(),
                                     c.value("phase_rad", 0.0)});
            }
        }
        if (j.contains("system_response")) t.system_response = response_from(j["system_response"]);
        const auto& ja = j.at("angles");
        t.theta_deg = ja.contains("theta_deg") ? angle_list(ja["theta_deg"]) : std::vector<double>{0.0};
        t.phi_deg = angle_list(ja.at("phi_deg"));
    } catch (const json::exception& e) {
        throw ValidationError({{{}, 0.0, 0.0, {}, std::string("scene: ") + e.what()}});
    } catch (const InputError& e) {
        throw ValidationError({{{}, 0.0, 0.0, {}, std::string("scene: ") + e.what()}});
    }
    if (t.phi_deg.empty() || t.theta_deg.empty()) {
        throw ValidationError({{{}, 0.0, 0.0, {}, "scene: angle lists must be non-empty"}});
    }
    return t;
}

std::string sweep_file_path(const std::string& band, Scenario which, double theta_deg, double phi_deg) {
    return band + "/" + std::string(to_string(which)) + "_t" + angle_tag(theta_deg) + "_p" + angle_tag(phi_deg) +
           ".s1p";
}

GeneratedCampaign generate_campaign(const SceneTemplate& tmpl, const std::string& out_dir) {
    GeneratedCampaign out;
    auto& m = out.manifest;
    m.campaign_id = tmpl.campaign_id;
    m.mirror_azimuth = tmpl.mirror_azimuth;
    m.sphere = tmpl.sphere;
    m.target = tmpl.target;
    for (const auto& b : tmpl.bands) m.bands.push_back(b.spec);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create '" + out_dir + "': " + ec.message());

    auto emit = [&](std::size_t bi, double theta, double phi, Scenario which) {
        const auto& band = tmpl.bands[bi];
        const std::uint64_t stream =
            mix_seed(mix_seed(mix_seed(bi, static_cast<std::uint64_t>(std::llround(theta * 1e6))),
                              static_cast<std::uint64_t>(std::llround(phi * 1e6))),
                     static_cast<std::uint64_t>(which));
        const auto scene = scene_at(tmpl, bi, theta, phi, stream);
        const auto sweep = simulate_sweep(scene, which, band.spec.grid(), tmpl.sphere);
        const std::string rel = sweep_file_path(band.spec.name, which, theta, phi);
        TouchstoneWriteOptions opts;
        opts.comment = "synthetic " + std::string(to_string(which)) + " sweep";
        write_text_file_atomic((fs::path(out_dir) / rel).string(), write_touchstone_s1p(sweep, opts));
        m.entries.push_back({band.spec.name, theta, phi, which, rel, std::nullopt});
        ++out.sweep_files;
    };

    for (std::size_t bi = 0; bi < tmpl.bands.size(); ++bi) {
        for (const double theta : tmpl.theta_deg) {
            for (const double phi : tmpl.phi_deg) {
                emit(bi, theta, phi, Scenario::target);
                emit(bi, theta, phi, Scenario::background);
                if (tmpl.sphere_layout == SphereLayout::per_angle) emit(bi, theta, phi, Scenario::sphere);
            }
            if (tmpl.sphere_layout == SphereLayout::per_angle) {
                emit(bi, theta, tmpl.phi_deg.front(), Scenario::sphere_background);
            }
        }
        if (tmpl.sphere_layout == SphereLayout::per_band) {
            emit(bi, tmpl.theta_deg.front(), tmpl.phi_deg.front(), Scenario::sphere);
            emit(bi, tmpl.theta_deg.front(), tmpl.phi_deg.front(), Scenario::sphere_background);
        }
    }

    out.manifest_path = (fs::path(out_dir) / "manifest.json").string();
    write_text_file_atomic(out.manifest_path, serialize_manifest(m));
    return out;
}

}  // namespace rcs
