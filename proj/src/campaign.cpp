#include "rcs/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "rcs/error.hpp"

namespace rcs {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr double kBandRelTol = 1e-6;

class IssueList {
public:
    void add(std::string message) { issues_.push_back({{}, 0.0, 0.0, {}, std::move(message)}); }
    void add(const ManifestEntry& e, std::string message) {
        issues_.push_back({e.band, e.theta_deg, e.phi_deg, std::string(to_string(e.scenario)),
                           std::move(message)});
    }
    void add(const std::string& band, AngleKey a, std::string scenario, std::string message) {
        issues_.push_back({band, a.theta_deg(), a.phi_deg(), std::move(scenario), std::move(message)});
    }
    void throw_if_any() const {
        if (!issues_.empty()) throw ValidationError(issues_);
    }

private:
    std::vector<ValidationIssue> issues_;
};

template <typename T>
bool read_field(const json& obj, const char* key, T& out, IssueList& issues, const std::string& where,
                bool required = true) {
    if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) {
        if (required) issues.add(where + ": missing field '" + key + "'");
        return false;
    }
    try {
        out = obj.at(key).get<T>();
        return true;
    } catch (const json::exception&) {
        issues.add(where + ": field '" + key + "' has the wrong type");
        return false;
    }
}

FrequencyUnit unit_from(const std::string& s) {
    if (s == "hz" || s == "Hz" || s == "HZ") return FrequencyUnit::hz;
    if (s == "khz" || s == "kHz" || s == "KHZ") return FrequencyUnit::khz;
    if (s == "mhz" || s == "MHz" || s == "MHZ") return FrequencyUnit::mhz;
    if (s == "ghz" || s == "GHz" || s == "GHZ") return FrequencyUnit::ghz;
    throw InputError("unknown frequency unit '" + s + "'");
}

DataFormat format_from(const std::string& s) {
    if (s == "ri" || s == "RI") return DataFormat::ri;
    if (s == "ma" || s == "MA") return DataFormat::ma;
    if (s == "db" || s == "DB") return DataFormat::db;
    throw InputError("unknown data format '" + s + "'");
}

const char* unit_name(FrequencyUnit u) {
    switch (u) {
        case FrequencyUnit::hz: return "hz";
        case FrequencyUnit::khz: return "khz";
        case FrequencyUnit::mhz: return "mhz";
        case FrequencyUnit::ghz: return "ghz";
    }
    return "hz";
}

const char* format_name(DataFormat f) {
    switch (f) {
        case DataFormat::ri: return "ri";
        case DataFormat::ma: return "ma";
        case DataFormat::db: return "db";
    }
    return "ri";
}

bool within(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

}  // namespace

const BandSpec* CampaignManifest::find_band(const std::string& name) const noexcept {
    for (const auto& b : bands) {
        if (b.name == name) return &b;
    }
    return nullptr;
}

AngleKey AngleKey::from_degrees(double theta, double phi) {
    return {static_cast<std::int64_t>(std::llround(theta * 1e6)),
            static_cast<std::int64_t>(std::llround(phi * 1e6))};
}

CampaignManifest parse_manifest(const std::string& json_text) {
    IssueList issues;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        issues.add(std::string("manifest is not valid JSON: ") + e.what());
        issues.throw_if_any();
    }
    if (!doc.is_object()) {
        issues.add("manifest root must be an object");
        issues.throw_if_any();
    }

    CampaignManifest m;
    if (read_field(doc, "schema_version", m.schema_version, issues, "manifest") &&
        m.schema_version != kManifestSchemaVersion) {
        issues.add("unsupported schema_version " + std::to_string(m.schema_version));
    }
    read_field(doc, "campaign_id", m.campaign_id, issues, "manifest");
    read_field(doc, "mirror_azimuth", m.mirror_azimuth, issues, "manifest", false);

    if (!doc.contains("bands") || !doc["bands"].is_array() || doc["bands"].empty()) {
        issues.add("manifest: 'bands' must be a non-empty array");
    } else {
        std::set<std::string> names;
        for (const auto& jb : doc["bands"]) {
            BandSpec b;
            const bool ok = read_field(jb, "name", b.name, issues, "band") &&
                            read_field(jb, "f_start_hz", b.f_start_hz, issues, "band " + b.name) &&
                            read_field(jb, "f_stop_hz", b.f_stop_hz, issues, "band " + b.name) &&
                            read_field(jb, "n_samples", b.n_samples, issues, "band " + b.name) &&
                            read_field(jb, "antenna_hpbw_deg", b.antenna_hpbw_deg, issues, "band " + b.name);
            if (!ok) continue;
            if (!names.insert(b.name).second) issues.add("duplicate band name '" + b.name + "'");
            if (!(b.f_start_hz > 0.0 && b.f_stop_hz > b.f_start_hz) || b.n_samples < 2) {
                issues.add("band " + b.name + ": requires f_stop > f_start > 0 and n_samples >= 2");
            }
            if (!(b.antenna_hpbw_deg > 0.0 && b.antenna_hpbw_deg < 180.0)) {
                issues.add("band " + b.name + ": antenna_hpbw_deg must lie in (0, 180)");
            }
            m.bands.push_back(b);
        }
    }

    if (doc.contains("sphere")) {
        const auto& js = doc["sphere"];
        read_field(js, "radius_m", m.sphere.radius_m, issues, "sphere");
        read_field(js, "distance_m", m.sphere.distance_m, issues, "sphere");
        if (!(m.sphere.radius_m > 0.0)) issues.add("sphere: radius_m must be > 0");
        if (!(m.sphere.distance_m > 0.0)) issues.add("sphere: distance_m must be > 0");
    } else {
        issues.add("manifest: missing 'sphere'");
    }

    if (doc.contains("target")) {
        const auto& jt = doc["target"];
        read_field(jt, "name", m.target.name, issues, "target");
        read_field(jt, "distance_m", m.target.distance_m, issues, "target");
        read_field(jt, "height_m", m.target.height_m, issues, "target", false);
        read_field(jt, "width_m", m.target.width_m, issues, "target", false);
        read_field(jt, "length_m", m.target.length_m, issues, "target", false);
        read_field(jt, "environment", m.target.environment, issues, "target", false);
        if (!(m.target.distance_m > 0.0)) issues.add("target: distance_m must be > 0");
        if (m.target.height_m < 0.0 || m.target.width_m < 0.0 || m.target.length_m < 0.0) {
            issues.add("target: dimensions must be >= 0");
        }
        if (m.target.environment != "indoor" && m.target.environment != "outdoor") {
            issues.add("target: environment must be 'indoor' or 'outdoor'");
        }
    } else {
        issues.add("manifest: missing 'target'");
    }

    if (!doc.contains("entries") || !doc["entries"].is_array()) {
        issues.add("manifest: 'entries' must be an array");
    } else {
        std::set<std::tuple<std::string, AngleKey, Scenario>> seen;
        for (const auto& je : doc["entries"]) {
            ManifestEntry e;
            std::string scenario;
            const bool ok = read_field(je, "band", e.band, issues, "entry") &&
                            read_field(je, "theta_deg", e.theta_deg, issues, "entry") &&
                            read_field(je, "phi_deg", e.phi_deg, issues, "entry") &&
                            read_field(je, "scenario", scenario, issues, "entry") &&
                            read_field(je, "path", e.path, issues, "entry");
            if (!ok) continue;
            try {
                e.scenario = scenario_from_string(scenario);
            } catch (const InputError& err) {
                issues.add(e, err.what());
                continue;
            }
            if (!m.find_band(e.band)) issues.add(e, "unknown band '" + e.band + "'");
            if (!(e.theta_deg >= 0.0 && e.theta_deg <= 90.0)) issues.add(e, "theta_deg must lie in [0, 90]");
            if (!(e.phi_deg >= 0.0 && e.phi_deg < 360.0)) issues.add(e, "phi_deg must lie in [0, 360)");
            if (e.path.empty()) issues.add(e, "empty path");
            if (je.contains("csv")) {
                const auto& jc = je["csv"];
                SweepFileHeader h;
                try {
                    h.frequency_unit = unit_from(jc.value("frequency_unit", std::string("hz")));
                    h.data_format = format_from(jc.value("data_format", std::string("ri")));
                    h.n_points = jc.value("n_points", std::size_t{0});
                    h.freq_column = jc.value("freq_column", h.freq_column);
                    h.a_column = jc.value("a_column", h.a_column);
                    h.b_column = jc.value("b_column", h.b_column);
                    e.csv = h;
                } catch (const std::exception& err) {
                    issues.add(e, std::string("bad csv spec: ") + err.what());
                }
            }
            if (!seen.insert({e.band, AngleKey::from_degrees(e.theta_deg, e.phi_deg), e.scenario}).second) {
                issues.add(e, "duplicate entry");
            }
            m.entries.push_back(std::move(e));
        }
    }

    issues.throw_if_any();
    return m;
}

std::string serialize_manifest(const CampaignManifest& m) {
    json doc;
    doc["schema_version"] = m.schema_version;
    doc["campaign_id"] = m.campaign_id;
    doc["mirror_azimuth"] = m.mirror_azimuth;
    doc["bands"] = json::array();
    for (const auto& b : m.bands) {
        doc["bands"].push_back({{"name", b.name},
                                {"f_start_hz", b.f_start_hz},
                                {"f_stop_hz", b.f_stop_hz},
                                {"n_samples", b.n_samples},
                                {"antenna_hpbw_deg", b.antenna_hpbw_deg}});
    }
    doc["sphere"] = {{"radius_m", m.sphere.radius_m}, {"distance_m", m.sphere.distance_m}};
    doc["target"] = {{"name", m.target.name},         {"height_m", m.target.height_m},
                     {"width_m", m.target.width_m},   {"length_m", m.target.length_m},
                     {"distance_m", m.target.distance_m}, {"environment", m.target.environment}};
    doc["entries"] = json::array();
    for (const auto& e : m.entries) {
        json je = {{"band", e.band},
                   {"theta_deg", e.theta_deg},
                   {"phi_deg", e.phi_deg},
                   {"scenario", std::string(to_string(e.scenario))},
                   {"path", e.path}};
        if (e.csv) {
            je["csv"] = {{"frequency_unit", unit_name(e.csv->frequency_unit)},
                         {"data_format", format_name(e.csv->data_format)},
                         {"n_points", e.csv->n_points},
                         {"freq_column", e.csv->freq_column},
                         {"a_column", e.csv->a_column},
                         {"b_column", e.csv->b_column}};
        }
        doc["entries"].push_back(std::move(je));
    }
    return doc.dump(2) + "\n";
}

const ManifestEntry* Campaign::find(const std::string& band, AngleKey angle, Scenario s) const {
    const auto it = index_.find({band, angle, s});
    return it == index_.end() ? nullptr : &manifest_.entries[it->second];
}

// Calibration sweeps are usually taken once per band (or per elevation), so
// fall back from the exact angle to the same elevation, then to any angle.
const ManifestEntry* Campaign::find_sphere(const std::string& band, AngleKey angle, Scenario s) const {
    if (const auto* e = find(band, angle, s)) return e;
    const ManifestEntry* same_theta = nullptr;
    const ManifestEntry* any = nullptr;
    for (const auto& [key, idx] : index_) {
        const auto& [b, a, sc] = key;
        if (b != band || sc != s) continue;
        if (!any) any = &manifest_.entries[idx];
        if (!same_theta && a.theta_udeg == angle.theta_udeg) same_theta = &manifest_.entries[idx];
    }
    return same_theta ? same_theta : any;
}

Campaign::TripleSources Campaign::sources(const std::string& band, AngleKey angle) const {
    TripleSources src{find(band, angle, Scenario::target), find(band, angle, Scenario::background),
                      find_sphere(band, angle, Scenario::sphere), nullptr};
    src.sphere_background = find_sphere(band, angle, Scenario::sphere_background);
    if (!src.sphere_background && src.sphere) {
        src.sphere_background = find(band, AngleKey::from_degrees(src.sphere->theta_deg, src.sphere->phi_deg),
                                     Scenario::background);
    }
    return src;
}

std::vector<AngleKey> Campaign::target_angles(const std::string& band) const {
    std::vector<AngleKey> out;
    for (const auto& [key, idx] : index_) {
        const auto& [b, a, sc] = key;
        if (b == band && sc == Scenario::target) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> Campaign::elevations(const std::string& band) const {
    std::vector<double> out;
    for (const auto& a : target_angles(band)) {
        if (out.empty() || AngleKey::from_degrees(out.back(), 0).theta_udeg != a.theta_udeg) {
            out.push_back(a.theta_deg());
        }
    }
    return out;
}

MeasurementTriple Campaign::triple(const std::string& band, AngleKey angle) const {
    const auto src = sources(band, angle);
    if (!src.target) {
        throw InputError("no target entry for band " + band + " at theta " +
                         std::to_string(angle.theta_deg()) + ", phi " + std::to_string(angle.phi_deg()));
    }
    auto sweep = [this](const ManifestEntry* e) {
        return sweeps_[static_cast<std::size_t>(e - manifest_.entries.data())];
    };
    return {sweep(src.target), sweep(src.background), sweep(src.sphere), sweep(src.sphere_background)};
}

Campaign make_campaign(CampaignManifest manifest, const std::string& directory) {
    Campaign c;
    c.manifest_ = std::move(manifest);
    c.directory_ = directory;
    const auto& m = c.manifest_;
    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        const auto& e = m.entries[i];
        c.index_[{e.band, AngleKey::from_degrees(e.theta_deg, e.phi_deg), e.scenario}] = i;
    }

    IssueList issues;
    for (const auto& [key, idx] : c.index_) {
        const auto& [band, angle, sc] = key;
        if (sc != Scenario::target) continue;
        const auto src = c.sources(band, angle);
        if (!src.background) issues.add(band, angle, "background", "missing background entry");
        if (!src.sphere) issues.add(band, angle, "sphere", "band has no sphere entry");
        else if (!src.sphere_background) {
            issues.add(band, angle, "sphere_background", "no sphere_background or background for the sphere");
        }
    }

    c.sweeps_.reserve(m.entries.size());
    for (const auto& e : m.entries) {
        const fs::path p = fs::path(e.path).is_absolute() ? fs::path(e.path) : fs::path(directory) / e.path;
        try {
            auto sweep = read_sweep_file(p.string(), e.scenario, e.csv.value_or(SweepFileHeader{}));
            if (const auto* band = m.find_band(e.band)) {
                const auto& g = sweep.grid();
                if (g.size() != band->n_samples) {
                    issues.add(e, "file has " + std::to_string(g.size()) + " samples, band declares " +
                                      std::to_string(band->n_samples));
                } else if (!within(g.f_start(), band->f_start_hz, kBandRelTol) ||
                           !within(g.f_stop(), band->f_stop_hz, kBandRelTol)) {
                    issues.add(e, "file frequency span does not match band");
                }
            }
            c.sweeps_.push_back(std::move(sweep));
        } catch (const Error& err) {
            issues.add(e, std::string("cannot load sweep: ") + err.what());
            c.sweeps_.push_back(FrequencySweep(FrequencyGrid(1.0, 2.0, 2), {Complex{}, Complex{}}));
        }
    }
    issues.throw_if_any();
    return c;
}

Campaign load_campaign(const std::string& manifest_path) {
    const auto text = read_text_file(manifest_path);
    auto manifest = parse_manifest(text);
    const auto dir = fs::path(manifest_path).parent_path().string();
    return make_campaign(std::move(manifest), dir.empty() ? "." : dir);
}

}  // namespace rcs
