#include "rcs/geometry.hpp"

#include <cmath>

#include "rcs/constants.hpp"
#include "rcs/error.hpp"

namespace rcs {

namespace {

double deg2rad(double d) { return d * kPi / 180.0; }

void require_hpbw(double hpbw_deg) {
    if (!(hpbw_deg > 0.0 && hpbw_deg < 180.0)) throw InputError("HPBW must lie in (0, 180) degrees");
}

}  // namespace

void AntennaSpec::validate() const {
    if (!(aperture_m > 0.0) || !std::isfinite(aperture_m)) throw InputError("aperture must be > 0");
    require_hpbw(hpbw_deg);
}

std::string_view to_string(BindingConstraint c) noexcept {
    return c == BindingConstraint::farfield ? "farfield" : "footprint";
}

double far_field_distance(const AntennaSpec& antenna, double f_hz) {
    if (!(antenna.aperture_m > 0.0)) throw InputError("aperture must be > 0");
    if (!(f_hz > 0.0) || !std::isfinite(f_hz)) throw InputError("frequency must be > 0");
    const double lambda = kSpeedOfLight / f_hz;
    return 2.0 * antenna.aperture_m * antenna.aperture_m / lambda;
}

double footprint_distance(double target_width_m, double margin_m, double hpbw_deg) {
    if (!(target_width_m > 0.0)) throw InputError("target width must be > 0");
    if (!(margin_m >= 0.0)) throw InputError("margin must be >= 0");
    require_hpbw(hpbw_deg);
    return (target_width_m / 2.0 + margin_m) / std::tan(deg2rad(hpbw_deg / 2.0));
}

PlacementPlan elevation_placement(double min_distance_m, double theta_deg) {
    if (!(min_distance_m > 0.0) || !std::isfinite(min_distance_m)) throw InputError("distance must be > 0");
    if (!(theta_deg >= 0.0 && theta_deg < 90.0)) throw InputError("theta must lie in [0, 90)");
    PlacementPlan p;
    p.distance_m = min_distance_m;
    p.theta_deg = theta_deg;
    p.antenna_height_m = min_distance_m * std::sin(deg2rad(theta_deg));
    p.ground_standoff_m = min_distance_m * std::cos(deg2rad(theta_deg));
    return p;
}

PlacementPlan plan_measurement(const AntennaSpec& antenna, double f_hz, double target_width_m,
                               double margin_m, double theta_deg) {
    antenna.validate();
    const double ff = far_field_distance(antenna, f_hz);
    const double fp = footprint_distance(target_width_m, margin_m, antenna.hpbw_deg);
    auto plan = elevation_placement(std::max(ff, fp), theta_deg);
    plan.constraint_binding = ff > fp ? BindingConstraint::farfield : BindingConstraint::footprint;
    plan.farfield_min_m = ff;
    plan.footprint_min_m = fp;
    return plan;
}

}  // namespace rcs
