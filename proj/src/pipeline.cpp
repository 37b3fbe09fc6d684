#include "rcs/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rcs/constants.hpp"

namespace rcs {

namespace {

constexpr double kGridRelTol = 1e-9;

void require_same_grid(const FrequencySweep& a, const FrequencySweep& b, const std::string& stage) {
    if (!a.grid().approx_equal(b.grid(), kGridRelTol)) {
        throw PipelineError(stage, "sweeps are sampled on different frequency grids");
    }
}

double wrap_delay(double t, double period) {
    double w = std::fmod(t, period);
    if (w < 0.0) w += period;
    return w;
}

// Signed circular distance a - b on a ring of the given period.
double circular_offset(double a, double b, double period) {
    double d = std::fmod(a - b, period);
    if (d >= period / 2.0) d -= period;
    if (d < -period / 2.0) d += period;
    return d;
}

// Locates the maximum of |P(t)|, P(t) = sum_i x_i exp(j 2 pi i df t), inside
// [lo, hi] by bisection on the sign of d|P|^2/dt. The bracket comes from the
// discrete peak, so the continuous maximum lies inside it.
double refine_peak(const std::vector<Complex>& x, double df, double lo, double hi) {
    auto slope = [&](double t) {
        Complex p{}, dp{};
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double w = 2.0 * kPi * static_cast<double>(i) * df;
            const Complex term = x[i] * std::polar(1.0, w * t);
            p += term;
            dp += Complex(0.0, w) * term;
        }
        return std::real(std::conj(p) * dp);
    };
    const double mid = 0.5 * (lo + hi);
    if (!(slope(lo) > 0.0 && slope(hi) < 0.0)) return mid;
    for (int iter = 0; iter < 64 && hi - lo > 0.0; ++iter) {
        const double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        if (slope(m) > 0.0) lo = m;
        else hi = m;
    }
    return 0.5 * (lo + hi);
}

double median_magnitude(const std::vector<Complex>& v) {
    std::vector<double> mags(v.size());
    std::transform(v.begin(), v.end(), mags.begin(), [](const Complex& c) { return std::abs(c); });
    const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    if (mags.size() % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(mags.begin(), mid);
    return 0.5 * (lower + upper);
}

// Multiplies sample i by exp(j 2 pi i df tau), an exact delay shift of -tau.
std::vector<Complex> phase_shift(std::span<const Complex> s, double df, double tau) {
    std::vector<Complex> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        out[i] = s[i] * std::polar(1.0, 2.0 * kPi * static_cast<double>(i) * df * tau);
    }
    return out;
}

}  // namespace

CalibrationContext::CalibrationContext(double sphere_radius_m, double d_target_m, double d_sphere_m)
    : radius_(sphere_radius_m),
      sigma_sph_(kPi * sphere_radius_m * sphere_radius_m),
      d_target_(d_target_m),
      d_sphere_(d_sphere_m) {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(radius_) || !positive(d_target_) || !positive(d_sphere_)) {
        throw InputError("calibration context requires positive radius and distances");
    }
}

FrequencySweep subtract_background(const FrequencySweep& scene, const FrequencySweep& background) {
    require_same_grid(scene, background, "subtract_background");
    std::vector<Complex> out(scene.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scene[i] - background[i];
    return FrequencySweep(scene.grid(), std::move(out), scene.label());
}

TimeGate design_gate(const TimeProfile& profile, double expected_delay_s, double target_extent_m,
                     const WindowSpec& taper) {
    if (!(target_extent_m > 0.0) || !std::isfinite(target_extent_m)) {
        throw InputError("target extent must be > 0");
    }
    if (profile.samples.empty() || !(profile.dt > 0.0)) throw InputError("empty time profile");
    const double period = profile.period();
    if (!(expected_delay_s >= profile.t0 && expected_delay_s < profile.t0 + period)) {
        throw InputError("expected delay lies outside the profile span");
    }

    const double guard = 2.0 * target_extent_m / kSpeedOfLight;
    const double span = 2.0 * guard;
    if (span >= period) {
        throw GateDesignError("gate span exceeds the unambiguous delay window", 0.0, 0.0, expected_delay_s);
    }

    std::size_t best = profile.size();
    double peak = 0.0;
    for (std::size_t k = 0; k < profile.size(); ++k) {
        if (std::abs(circular_offset(profile.time(k), expected_delay_s, period)) > guard) continue;
        const double mag = std::abs(profile.samples[k]);
        if (best == profile.size() || mag > peak) {
            peak = mag;
            best = k;
        }
    }
    const double median = median_magnitude(profile.samples);
    const double threshold = median * db_to_amplitude(kGateNoiseFloorDb);
    if (best == profile.size() || !(peak > 0.0) || peak < threshold) {
        throw GateDesignError("no response within the guard window clears the noise floor by " +
                                  std::to_string(kGateNoiseFloorDb) + " dB",
                              peak, median, expected_delay_s);
    }

    // The weighted spectrum is recoverable exactly from the padded profile.
    const std::size_t n = profile.source_size;
    auto weighted = dft_forward(profile.samples);
    weighted.resize(n);
    const double df = 1.0 / (static_cast<double>(profile.size()) * profile.dt);
    const double t_peak = profile.time(best);
    const double center = refine_peak(weighted, df, t_peak - profile.dt, t_peak + profile.dt);

    TimeGate gate;
    gate.center_s = wrap_delay(center, period);
    gate.span_s = span;
    gate.taper = taper;
    gate.weighting = profile.window;
    gate.zero_pad = profile.zero_pad;
    return gate;
}

FrequencySweep apply_gate(const FrequencySweep& sweep, const TimeGate& gate) {
    const double df = sweep.grid().step();
    const double period = 1.0 / df;
    if (!(gate.span_s > 0.0) || gate.span_s > period) {
        throw PipelineError("apply_gate", "gate span must lie in (0, 1/step]");
    }
    if (!(gate.center_s >= 0.0 && gate.center_s < period)) {
        throw PipelineError("apply_gate", "gate centre lies outside the representable delay span");
    }

    // Shift the gate centre to zero delay, gate symmetrically about zero, then
    // shift back. Every channel therefore sees the same sampled gate.
    const FrequencySweep shifted(sweep.grid(), phase_shift(sweep.samples(), df, gate.center_s),
                                 sweep.label());
    auto profile = to_time_domain(shifted, gate.weighting, gate.zero_pad);
    const std::size_t m = profile.size();
    for (std::size_t k = 0; k < m; ++k) {
        const double t = k < (m + 1) / 2 ? profile.time(k) : profile.time(k) - profile.period();
        profile.samples[k] *= window_value(gate.taper, (t + gate.span_s / 2.0) / gate.span_s);
    }
    const auto back = to_frequency_domain(profile, sweep.grid(), sweep.label());
    return FrequencySweep(sweep.grid(), phase_shift(back.samples(), df, -gate.center_s), sweep.label());
}

SigmaSpectrum calibrate(const FrequencySweep& target_gated, const FrequencySweep& sphere_gated,
                        const CalibrationContext& ctx, std::string band_label, const WindowSpec& weighting) {
    require_same_grid(target_gated, sphere_gated, "calibrate");
    const auto w = window_samples(weighting, sphere_gated.size());
    const double w_max = *std::max_element(w.begin(), w.end());
    std::size_t begin = 0, end = w.size();
    while (begin < end && w[begin] < kMinCalibrationWeight * w_max) ++begin;
    while (end > begin && w[end - 1] < kMinCalibrationWeight * w_max) --end;
    if (begin == end) throw CalibrationError("analysis weighting leaves no usable bins", {});

    std::vector<std::size_t> bad;
    for (std::size_t i = begin; i < end; ++i) {
        if (std::abs(sphere_gated[i]) < kMinSphereMagnitude) bad.push_back(i);
    }
    if (!bad.empty()) {
        std::string list;
        for (std::size_t j = 0; j < bad.size() && j < 16; ++j) list += (j ? "," : "") + std::to_string(bad[j]);
        if (bad.size() > 16) list += ",...";
        throw CalibrationError("sphere response vanishes at " + std::to_string(bad.size()) +
                                   " bin(s): " + list,
                               std::move(bad));
    }
    const double distance_factor = (ctx.d_target_m() / ctx.d_sphere_m()) * (ctx.d_target_m() / ctx.d_sphere_m());
    const double scale = std::sqrt(ctx.sigma_sphere_m2()) * distance_factor;
    std::vector<Complex> out(target_gated.size());
    for (std::size_t i = begin; i < end; ++i) out[i] = scale * (target_gated[i] / sphere_gated[i]);
    return {target_gated.grid(), std::move(out), std::move(band_label), ctx.d_sphere_m(), begin, end};
}

double band_average_rcs(const SigmaSpectrum& spectrum) {
    if (spectrum.valid_size() == 0 || spectrum.valid_end > spectrum.sqrt_sigma.size()) {
        throw InputError("sigma spectrum has no valid bins");
    }
    double sum = 0.0;
    for (std::size_t i = spectrum.valid_begin; i < spectrum.valid_end; ++i) sum += std::norm(spectrum.sqrt_sigma[i]);
    return sum / static_cast<double>(spectrum.valid_size());
}

ExtractionResult extract_rcs(const MeasurementTriple& triple, const CalibrationContext& ctx,
                             const GateParams& params, std::string band_label) {
    const auto& grid = triple.target.grid();
    for (const auto* s : {&triple.background, &triple.sphere, &triple.sphere_background}) {
        if (!grid.approx_equal(s->grid(), kGridRelTol)) {
            throw PipelineError("validate", "measurement sweeps do not share a frequency grid");
        }
    }
    if (params.span_override_s && !(*params.span_override_s > 0.0)) {
        throw PipelineError("validate", "gate span override must be > 0");
    }

    ExtractionDiagnostics diag;
    diag.target_extent_m = params.target_extent_m;
    diag.span_overridden = params.span_override_s.has_value();

    const auto target = subtract_background(triple.target, triple.background);
    const auto sphere = subtract_background(triple.sphere, triple.sphere_background);
    diag.target_residual_ratio = triple.target.energy() > 0.0 ? target.energy() / triple.target.energy() : 0.0;
    diag.sphere_residual_ratio = triple.sphere.energy() > 0.0 ? sphere.energy() / triple.sphere.energy() : 0.0;

    auto gate_for = [&](const FrequencySweep& s, double distance, const char* stage, double& snr_db) {
        try {
            const auto profile = to_time_domain(s, params.weighting, params.zero_pad);
            auto gate = design_gate(profile, wrap_delay(range_to_delay(distance), profile.period()),
                                    params.target_extent_m, params.taper);
            if (params.span_override_s) gate.span_s = *params.span_override_s;
            double peak = 0.0;
            for (const auto& v : profile.samples) peak = std::max(peak, std::abs(v));
            const double median = median_magnitude(profile.samples);
            snr_db = median > 0.0 ? amplitude_to_db(peak / median) : 999.0;
            return gate;
        } catch (const GateDesignError& e) {
            throw GateDesignError(std::string(stage) + ": " + e.what(), e.peak(), e.median(),
                                  e.expected_delay_s());
        } catch (const Error& e) {
            throw PipelineError(stage, e.what());
        }
    };
    diag.target_gate = gate_for(target, ctx.d_target_m(), "design_gate(target)", diag.target_peak_over_median_db);
    diag.sphere_gate = gate_for(sphere, ctx.d_sphere_m(), "design_gate(sphere)", diag.sphere_peak_over_median_db);

    auto gated = [](const FrequencySweep& s, const TimeGate& g, const char* stage) {
        try {
            return apply_gate(s, g);
        } catch (const PipelineError& e) {
            throw PipelineError(stage, e.what());
        }
    };
    const auto target_gated = gated(target, diag.target_gate, "apply_gate(target)");
    const auto sphere_gated = gated(sphere, diag.sphere_gate, "apply_gate(sphere)");

    auto spectrum = calibrate(target_gated, sphere_gated, ctx, std::move(band_label), params.weighting);
    const double rcs = band_average_rcs(spectrum);
    return {std::move(spectrum), rcs, power_to_db(rcs), diag};
}

ExtractionRecord make_record(const std::string& band, double theta_deg, double phi_deg,
                             const ExtractionResult& result) {
    ExtractionRecord r;
    r.band = band;
    r.theta_deg = theta_deg;
    r.phi_deg = phi_deg;
    r.rcs_m2 = result.rcs_m2;
    r.rcs_dbsm = result.rcs_dbsm;
    r.gate_center_s = result.diagnostics.target_gate.center_s;
    r.gate_span_s = result.diagnostics.target_gate.span_s;
    r.diagnostics = result.diagnostics;
    return r;
}

}  // namespace rcs
