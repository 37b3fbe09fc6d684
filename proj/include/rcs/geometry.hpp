#pragma once

#include <string_view>

namespace rcs {

struct AntennaSpec {
    double aperture_m = 0.0;  // largest aperture dimension
    double hpbw_deg = 0.0;    // half-power beamwidth

    /// Throws InputError unless aperture > 0 and 0 < hpbw < 180.
    void validate() const;
};

enum class BindingConstraint { farfield, footprint };
std::string_view to_string(BindingConstraint c) noexcept;

struct PlacementPlan {
    double distance_m = 0.0;         // slant distance antenna to target reference
    double antenna_height_m = 0.0;   // above the target reference point
    double ground_standoff_m = 0.0;  // horizontal distance
    double theta_deg = 0.0;
    BindingConstraint constraint_binding = BindingConstraint::footprint;
    double farfield_min_m = 0.0;
    double footprint_min_m = 0.0;
};

/// 2 D^2 / lambda, lambda = c / f.
double far_field_distance(const AntennaSpec& antenna, double f_hz);

/// (W/2 + margin) / tan(HPBW/2): the range at which the target half-width
/// plus margin spans half the beam. The printed form of this relation uses
/// an inverse tangent; the cotangent is the reading consistent with the
/// beam-footprint triangle (half-width opposite, range adjacent).
double footprint_distance(double target_width_m, double margin_m, double hpbw_deg);

/// Holds the slant range and raises the antenna: height = d sin(theta),
/// standoff = d cos(theta).
PlacementPlan elevation_placement(double min_distance_m, double theta_deg);

PlacementPlan plan_measurement(const AntennaSpec& antenna, double f_hz, double target_width_m,
                               double margin_m, double theta_deg);

}  // namespace rcs
