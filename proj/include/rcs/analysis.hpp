#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcs/pipeline.hpp"
#include "rcs/spectral.hpp"

namespace rcs {

enum class CellSource { missing, measured, mirrored };

/// Band-averaged RCS over (theta, phi), one row per elevation.
struct RcsGrid {
    std::string band_label;
    std::vector<double> theta_deg;
    std::vector<double> phi_deg;
    std::vector<double> rcs_dbsm;   // row-major [theta][phi], NaN where missing
    std::vector<CellSource> source; // same layout

    std::size_t rows() const noexcept { return theta_deg.size(); }
    std::size_t cols() const noexcept { return phi_deg.size(); }
    double at(std::size_t r, std::size_t c) const { return rcs_dbsm[r * cols() + c]; }
    CellSource source_at(std::size_t r, std::size_t c) const { return source[r * cols() + c]; }
    bool measured(std::size_t r, std::size_t c) const { return source_at(r, c) == CellSource::measured; }
};

/// Builds the grid for one band. With `mirror`, every phi in (180, 360)
/// without a measurement is copied from 360 - phi and marked mirrored.
/// Throws InputError on duplicate (theta, phi) or mixed bands.
RcsGrid build_rcs_grid(const std::vector<ExtractionRecord>& records, bool mirror);

struct DeltaRcsSample {
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    double delta_db = 0.0;  // 10 log10(RCS_2 / RCS_1)
};

/// One sample per cell measured in both grids. Throws InputError if none.
std::vector<DeltaRcsSample> delta_rcs(const RcsGrid& band1, const RcsGrid& band2);

/// Maximum-likelihood Gaussian: sample mean and population deviation.
struct GaussianFit {
    double mu_db = 0.0;
    double sigma_db = 0.0;
    std::size_t n_samples = 0;
};

/// Throws InputError when fewer than 2 samples are given.
GaussianFit fit_gaussian(std::span<const double> samples);

struct ScaleRow {
    std::string label;            // "0", "10", ... or "Overall"
    std::optional<double> theta_deg;
    GaussianFit fit;
};

/// Per-elevation fits (elevations with fewer than 2 samples are skipped)
/// followed by the overall fit.
std::vector<ScaleRow> scale_table(const std::vector<DeltaRcsSample>& samples);

struct Histogram {
    double lo = 0.0;
    double bin_width = 1.0;
    std::vector<std::size_t> counts;
};

/// Linear-interpolation quantile (Hyndman-Fan type 7).
double quantile(std::vector<double> values, double q);
/// Freedman-Diaconis bin width 2 IQR n^(-1/3); falls back to sqrt(n) bins
/// over the range, or one unit-width bin for constant data.
Histogram histogram_fd(std::span<const double> samples);

/// |sqrt(sigma)| against range, centred on the target centre.
struct RangeProfile {
    std::vector<double> range_m;  // symmetric about 0
    std::vector<double> magnitude;
};

struct RangeResponseOptions {
    WindowSpec window = default_analysis_window();
    int zero_pad = kDefaultZeroPad;
};

/// Inverse transform of the calibrated spectrum on the range axis
/// r = c t / 2, shifted so `d_target_m` maps to 0.
RangeProfile range_response(const SigmaSpectrum& spectrum, double d_target_m,
                            const RangeResponseOptions& options = {});

enum class AngularInterp { nearest, linear };
std::string_view to_string(AngularInterp i) noexcept;
AngularInterp angular_interp_from_string(std::string_view s);

struct AzimuthProfile {
    double phi_deg = 0.0;
    RangeProfile profile;
};

struct RangeAzimuthImage {
    std::vector<double> range_axis_m;
    std::vector<double> phi_axis_deg;
    std::vector<std::vector<double>> columns;  // columns[j][r] = magnitude at (range r, phi j)
    std::vector<bool> measured;                // per column
    std::string interpolation_note;
};

/// Measured columns are copied verbatim; the others are filled by angular
/// interpolation between the neighbouring measured azimuths. The output axis
/// defaults to `step_deg` increments over the measured span. Midway ties in
/// nearest mode pick the lower azimuth.
RangeAzimuthImage build_range_azimuth_image(std::vector<AzimuthProfile> profiles, AngularInterp interp,
                                            double step_deg = 1.0,
                                            std::optional<std::vector<double>> phi_axis = std::nullopt);

struct Contributor {
    double range_m = 0.0;
    double phi_deg = 0.0;
    double magnitude = 0.0;
};

struct ContributorList {
    std::vector<Contributor> points;
    bool truncated = false;  // fewer local maxima than requested
};

/// The k largest local maxima along range within measured columns, sorted by
/// magnitude descending, then |range| ascending, then phi ascending.
ContributorList top_contributors(const RangeAzimuthImage& image, std::size_t k);

}  // namespace rcs
