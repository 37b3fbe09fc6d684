#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "rcs/ingest.hpp"
#include "rcs/sweep.hpp"

namespace rcs {

inline constexpr int kManifestSchemaVersion = 1;

struct BandSpec {
    std::string name;
    double f_start_hz = 0.0;
    double f_stop_hz = 0.0;
    std::size_t n_samples = 0;
    double antenna_hpbw_deg = 0.0;

    FrequencyGrid grid() const { return {f_start_hz, f_stop_hz, n_samples}; }
};

struct SphereSpec {
    double radius_m = 0.0;
    double distance_m = 0.0;
};

struct TargetSpec {
    std::string name;
    double height_m = 0.0;
    double width_m = 0.0;
    double length_m = 0.0;
    double distance_m = 0.0;
    std::string environment = "indoor";
};

struct ManifestEntry {
    std::string band;
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    Scenario scenario = Scenario::target;
    std::string path;  // relative to the manifest directory unless absolute
    std::optional<SweepFileHeader> csv;
};

struct CampaignManifest {
    int schema_version = kManifestSchemaVersion;
    std::string campaign_id;
    bool mirror_azimuth = false;
    std::vector<BandSpec> bands;
    SphereSpec sphere;
    TargetSpec target;
    std::vector<ManifestEntry> entries;

    const BandSpec* find_band(const std::string& name) const noexcept;
};

/// Angles are keyed in integer micro-degrees so lookups are exact.
struct AngleKey {
    std::int64_t theta_udeg = 0;
    std::int64_t phi_udeg = 0;

    static AngleKey from_degrees(double theta, double phi);
    double theta_deg() const noexcept { return static_cast<double>(theta_udeg) * 1e-6; }
    double phi_deg() const noexcept { return static_cast<double>(phi_udeg) * 1e-6; }
    auto operator<=>(const AngleKey&) const = default;
};

/// Parses and schema-checks a manifest document (no file access).
/// Throws ValidationError listing every problem found.
CampaignManifest parse_manifest(const std::string& json_text);
std::string serialize_manifest(const CampaignManifest& manifest);

/// Read-only, fully validated campaign. Every referenced sweep is loaded
/// and checked against its band at construction.
class Campaign {
public:
    const CampaignManifest& manifest() const noexcept { return manifest_; }
    const std::string& directory() const noexcept { return directory_; }

    /// Target angles measured in a band, sorted by (theta, phi).
    std::vector<AngleKey> target_angles(const std::string& band) const;
    std::vector<double> elevations(const std::string& band) const;

    /// Throws InputError when the band or angle has no target entry.
    MeasurementTriple triple(const std::string& band, AngleKey angle) const;

    /// Manifest entries whose (band, angle, scenario) resolve the triple.
    struct TripleSources {
        const ManifestEntry* target;
        const ManifestEntry* background;
        const ManifestEntry* sphere;
        const ManifestEntry* sphere_background;
    };
    TripleSources sources(const std::string& band, AngleKey angle) const;

private:
    friend Campaign load_campaign(const std::string& manifest_path);
    friend Campaign make_campaign(CampaignManifest manifest, const std::string& directory);

    using EntryKey = std::tuple<std::string, AngleKey, Scenario>;

    const ManifestEntry* find(const std::string& band, AngleKey angle, Scenario s) const;
    const ManifestEntry* find_sphere(const std::string& band, AngleKey angle, Scenario s) const;

    CampaignManifest manifest_;
    std::string directory_;
    std::map<EntryKey, std::size_t> index_;
    std::vector<FrequencySweep> sweeps_;  // parallel to manifest_.entries
};

/// Loads the manifest at `manifest_path` and all sweep files it references.
/// Throws IoError if the manifest cannot be read, ValidationError otherwise.
Campaign load_campaign(const std::string& manifest_path);
/// Validates an in-memory manifest whose relative paths resolve against `directory`.
Campaign make_campaign(CampaignManifest manifest, const std::string& directory);

}  // namespace rcs
