#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rcs/campaign.hpp"
#include "rcs/sweep.hpp"

namespace rcs {

/// Frequency-independent point echo at a fixed range.
struct PointScatterer {
    double sigma_m2 = 0.0;
    double distance_m = 0.0;
    double phase_offset_rad = 0.0;
};

/// Smooth complex system response G(f): a polynomial in the band-normalized
/// frequency x = (f - f_center) / (bandwidth / 2), or a table of (f, G)
/// points interpolated linearly and held constant outside its span.
class SystemResponse {
public:
    /// G = 1.
    SystemResponse() = default;
    static SystemResponse polynomial(std::vector<Complex> coefficients);
    struct TablePoint {
        double f_hz;
        Complex value;
    };
    static SystemResponse tabulated(std::vector<TablePoint> points);

    Complex evaluate(double f_hz, const FrequencyGrid& grid) const;
    bool is_identity() const noexcept { return coefficients_.empty() && table_.empty(); }

private:
    std::vector<Complex> coefficients_;
    std::vector<TablePoint> table_;
};

struct SyntheticScene {
    std::vector<PointScatterer> target_scatterers;
    std::vector<PointScatterer> clutter_scatterers;  // present in every measurement
    SystemResponse system_response;
    double noise_rms = 0.0;
    std::uint64_t seed = 0;
};

/// Complex white Gaussian noise with total RMS `rms` (rms^2 / 2 per component).
/// Uniforms come from std::mt19937_64 (fully specified by the standard);
/// normals from the Box-Muller transform, so streams match across platforms.
class NoiseSource {
public:
    NoiseSource(std::uint64_t seed, double rms);
    Complex next();

private:
    double uniform();

    std::mt19937_64 engine_;
    double rms_;
};

/// S11(f) = G(f) * sum_k sqrt(sigma_k) / d_k^2 * exp(-j 4 pi f d_k / c + j phi_k) + noise.
/// `background` and `sphere_background` hold clutter only; `sphere` replaces
/// the target with one scatterer of sigma = pi R^2 at the sphere distance.
FrequencySweep simulate_sweep(const SyntheticScene& scene, Scenario which, const FrequencyGrid& grid,
                              const SphereSpec& sphere);

/// Scatterer position in the target body frame (metres, origin at the
/// rotation centre, x towards the radar at phi = 0, z up).
struct BodyScatterer {
    double x_m = 0.0;
    double y_m = 0.0;
    double z_m = 0.0;
    double sigma_m2 = 0.0;
    double phase_rad = 0.0;
};

struct SynthBand {
    BandSpec spec;
    double target_gain_db = 0.0;  // applied to every target scatterer's sigma
    std::optional<SystemResponse> system_response;
};

enum class SphereLayout { per_angle, per_band };

/// Declarative description of a whole synthetic campaign.
struct SceneTemplate {
    std::string campaign_id = "synthetic";
    std::vector<SynthBand> bands;
    SphereSpec sphere{0.15, 4.0};
    TargetSpec target;
    std::vector<BodyScatterer> scatterers;
    std::vector<PointScatterer> clutter;
    SystemResponse system_response;
    double noise_rms = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> theta_deg{0.0};
    std::vector<double> phi_deg;
    bool mirror_azimuth = false;
    SphereLayout sphere_layout = SphereLayout::per_angle;
};

/// Throws ValidationError on schema problems.
SceneTemplate parse_scene(const std::string& json_text);

/// Range of a body-frame scatterer for the radar at elevation theta and
/// azimuth phi: D - p . u, u = (cos t cos p, -cos t sin p, sin t).
double projected_range(const BodyScatterer& s, double target_distance_m, double theta_deg, double phi_deg);

/// Range-domain scene for one band and aspect angle; noise seed is derived
/// from the template seed and `stream`.
SyntheticScene scene_at(const SceneTemplate& tmpl, std::size_t band_index, double theta_deg,
                        double phi_deg, std::uint64_t stream = 0);

struct GeneratedCampaign {
    std::string manifest_path;
    std::size_t sweep_files = 0;
    CampaignManifest manifest;
};

/// Manifest-relative path used for generated and acquired sweeps.
std::string sweep_file_path(const std::string& band, Scenario which, double theta_deg, double phi_deg);

/// Writes Touchstone sweeps and manifest.json under `out_dir`.
GeneratedCampaign generate_campaign(const SceneTemplate& tmpl, const std::string& out_dir);

/// Deterministic 64-bit mixing (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace rcs
