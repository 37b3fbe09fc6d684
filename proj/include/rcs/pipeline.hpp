#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rcs/error.hpp"
#include "rcs/spectral.hpp"
#include "rcs/sweep.hpp"

namespace rcs {

/// Delay window isolating one object. The weighting is the frequency taper
/// used to form the delay profile; the taper is the shape of the gate itself.
struct TimeGate {
    double center_s = 0.0;  // two-way delay
    double span_s = 0.0;
    WindowSpec taper = default_gate_taper();
    WindowSpec weighting = default_analysis_window();
    int zero_pad = kDefaultZeroPad;
};

/// Reference sphere and the two measurement distances.
class CalibrationContext {
public:
    /// Throws InputError unless every argument is finite and > 0.
    CalibrationContext(double sphere_radius_m, double d_target_m, double d_sphere_m);

    double sphere_radius_m() const noexcept { return radius_; }
    /// Optical-limit sphere RCS, pi * R^2.
    double sigma_sphere_m2() const noexcept { return sigma_sph_; }
    double d_target_m() const noexcept { return d_target_; }
    double d_sphere_m() const noexcept { return d_sphere_; }

private:
    double radius_;
    double sigma_sph_;
    double d_target_;
    double d_sphere_;
};

/// Calibrated sqrt(sigma)(f) in metres. The phase is referenced to the
/// sphere position, so a scatterer at distance d appears at delay
/// 2 (d - reference_distance_m) / c in the transformed spectrum.
struct SigmaSpectrum {
    FrequencyGrid grid;
    std::vector<Complex> sqrt_sigma;
    std::string band_label;
    double reference_distance_m = 0.0;
    // Bins [valid_begin, valid_end) carry a calibrated value. Outside it the
    // analysis weighting is too small for the ratio to mean anything and
    // sqrt_sigma is held at zero.
    std::size_t valid_begin = 0;
    std::size_t valid_end = 0;

    std::size_t valid_size() const noexcept { return valid_end - valid_begin; }
};

class GateDesignError : public PipelineError {
public:
    GateDesignError(const std::string& what, double peak, double median, double expected_delay_s)
        : PipelineError("design_gate", what), peak_(peak), median_(median), expected_(expected_delay_s) {}
    double peak() const noexcept { return peak_; }
    double median() const noexcept { return median_; }
    double expected_delay_s() const noexcept { return expected_; }

private:
    double peak_, median_, expected_;
};

class CalibrationError : public PipelineError {
public:
    CalibrationError(const std::string& what, std::vector<std::size_t> bins)
        : PipelineError("calibrate", what), bins_(std::move(bins)) {}
    const std::vector<std::size_t>& bins() const noexcept { return bins_; }

private:
    std::vector<std::size_t> bins_;
};

/// A gate peak must clear the profile median by this many dB (amplitude).
inline constexpr double kGateNoiseFloorDb = 10.0;
/// Sphere bins below this magnitude make the calibration ill-conditioned.
inline constexpr double kMinSphereMagnitude = 1e-12;
/// Bins whose analysis weight falls below this are excluded from calibration.
inline constexpr double kMinCalibrationWeight = 0.01;

FrequencySweep subtract_background(const FrequencySweep& scene, const FrequencySweep& background);

/// Centres a gate on the strongest response within +/- 2 * extent / c of the
/// expected delay (refined to sub-bin accuracy) with span 4 * extent / c.
TimeGate design_gate(const TimeProfile& profile, double expected_delay_s, double target_extent_m,
                     const WindowSpec& taper = default_gate_taper());

/// Gates a sweep in the delay domain and returns to frequency. The output
/// keeps the gate's frequency weighting applied; it cancels in calibrate()
/// when both channels are gated with the same span and weighting.
FrequencySweep apply_gate(const FrequencySweep& sweep, const TimeGate& gate);

/// sqrt_sigma(f) = sqrt(sigma_sph) * (S_tg(f) / S_sph(f)) * (D_tg / D_sph)^2.
/// `weighting` is the analysis window the gated sweeps still carry; bins
/// where it is below kMinCalibrationWeight are left out (zero).
SigmaSpectrum calibrate(const FrequencySweep& target_gated, const FrequencySweep& sphere_gated,
                        const CalibrationContext& ctx, std::string band_label = {},
                        const WindowSpec& weighting = WindowSpec::rectangular());

/// Mean of |sqrt_sigma|^2 over the valid bins (linear power average), in m^2.
double band_average_rcs(const SigmaSpectrum& spectrum);

struct GateParams {
    double target_extent_m = 1.0;
    std::optional<double> span_override_s;
    WindowSpec weighting = default_analysis_window();
    WindowSpec taper = default_gate_taper();
    int zero_pad = kDefaultZeroPad;
};

struct ExtractionDiagnostics {
    TimeGate target_gate;
    TimeGate sphere_gate;
    double target_peak_over_median_db = 0.0;
    double sphere_peak_over_median_db = 0.0;
    /// Energy left after background subtraction relative to the raw scene.
    double target_residual_ratio = 0.0;
    double sphere_residual_ratio = 0.0;
    bool span_overridden = false;
    double target_extent_m = 0.0;
};

struct ExtractionResult {
    SigmaSpectrum spectrum;
    double rcs_m2 = 0.0;
    double rcs_dbsm = 0.0;
    ExtractionDiagnostics diagnostics;
};

/// Full chain: background subtraction, per-channel gating, calibration and
/// band averaging. Stage failures surface as PipelineError tagged with the stage.
ExtractionResult extract_rcs(const MeasurementTriple& triple, const CalibrationContext& ctx,
                             const GateParams& params, std::string band_label = {});

/// One extraction, flattened for serialization.
struct ExtractionRecord {
    std::string band;
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    double rcs_m2 = 0.0;
    double rcs_dbsm = 0.0;
    double gate_center_s = 0.0;
    double gate_span_s = 0.0;
    ExtractionDiagnostics diagnostics;
};

ExtractionRecord make_record(const std::string& band, double theta_deg, double phi_deg,
                             const ExtractionResult& result);
std::string records_to_json(const std::vector<ExtractionRecord>& records);
std::vector<ExtractionRecord> records_from_json(const std::string& text);

}  // namespace rcs
