#pragma once

// Library form of the `rcs` subcommands. The executable only parses flags
// and maps exceptions to exit codes; tests drive these directly.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcs/analysis.hpp"
#include "rcs/campaign.hpp"
#include "rcs/geometry.hpp"
#include "rcs/pipeline.hpp"
#include "rcs/vna.hpp"

namespace rcs {

enum class OutputFormat { csv, json };
OutputFormat output_format_from_string(std::string_view s);

enum class ExitCode : int { ok = 0, validation = 1, pipeline = 2, io = 3, network = 4 };

/// Maps an exception thrown by any command to its exit code.
ExitCode exit_code_for(const std::exception& e) noexcept;

/// Runs fn(0..n-1) on up to `jobs` threads. Callers store results by index,
/// so output never depends on scheduling. The first exception is rethrown
/// after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

/// The gate is centred on the strongest echo, which may sit at either end of
/// the body, and the taper eats the outer eighth of each half-span. 1.5
/// diagonals keeps the far end of any body on the flat part of the gate.
inline constexpr double kExtentPerDiagonal = 1.5;

/// Default gate extent for a target: 1.5 bounding-box diagonals, at least 0.1 m.
double default_target_extent(const TargetSpec& target);

struct AngleFailure {
    std::string band;
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    std::string stage;
    std::string message;
};

struct BandExtraction {
    std::string band;
    std::vector<ExtractionRecord> records;
    std::vector<std::optional<SigmaSpectrum>> spectra;  // parallel to records when requested
    std::vector<AngleFailure> failures;
};

struct ExtractSettings {
    std::optional<double> gate_span_s;
    std::optional<double> target_extent_m;
    int jobs = 1;
    bool keep_spectra = false;
    std::optional<double> theta_deg;  // restrict to one elevation
};

GateParams gate_params_for(const Campaign& campaign, const ExtractSettings& settings);

/// Per-angle extraction for one band; failures are collected, not thrown.
BandExtraction extract_band(const Campaign& campaign, const std::string& band, const ExtractSettings& settings);

struct ExtractOptions {
    std::string manifest;
    std::string out_dir;
    std::vector<std::string> bands;  // empty: every band
    ExtractSettings settings;
    OutputFormat format = OutputFormat::csv;
    bool figures = true;
};

struct CommandReport {
    ExitCode code = ExitCode::ok;
    std::string stdout_text;
    std::string stderr_text;
    std::vector<std::string> written;  // paths relative to out_dir
};

/// Writes <out>/<band>/records.json, rcs_grid.{csv|json} and heatmap.svg.
CommandReport cmd_extract(const ExtractOptions& options);

struct ScaleOptions {
    std::string manifest;
    std::string out_dir;
    std::string band1;
    std::string band2;
    ExtractSettings settings;
    OutputFormat format = OutputFormat::csv;
    bool figures = true;
};

struct ScaleResult {
    std::vector<DeltaRcsSample> samples;
    std::vector<ScaleRow> rows;
};

ScaleResult compute_scale(const Campaign& campaign, const ScaleOptions& options);
/// Writes delta_rcs.csv, scale_table.{csv|json} and delta_histogram.svg.
CommandReport cmd_scale(const ScaleOptions& options);

struct RangeImageOptions {
    std::string manifest;
    std::string out_dir;
    std::string band;  // empty: first band
    double theta_deg = 0.0;
    AngularInterp interp = AngularInterp::linear;
    double phi_step_deg = 1.0;
    std::size_t top_k = 3;
    std::optional<double> max_range_m;
    ExtractSettings settings;
    bool figures = true;
};

struct RangeImageResult {
    RangeAzimuthImage image;
    ContributorList contributors;
    double max_range_m = 0.0;
};

RangeImageResult compute_range_image(const Campaign& campaign, const RangeImageOptions& options);
/// Writes range_azimuth.csv, range_azimuth.svg, range_polar.svg and top_contributors.json.
CommandReport cmd_range_image(const RangeImageOptions& options);

struct PlanOptions {
    AntennaSpec antenna;
    double f_hz = 0.0;
    double target_width_m = 0.0;
    double margin_m = 0.0;
    double theta_deg = 0.0;
    std::optional<OutputFormat> format;  // unset: text table
};
CommandReport cmd_plan(const PlanOptions& options);

struct SynthOptions {
    std::string scene_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
};
CommandReport cmd_synth(const SynthOptions& options);

struct AcquireOptions {
    std::string manifest;
    std::string band;
    double theta_deg = 0.0;
    double phi_deg = 0.0;
    Scenario slot = Scenario::target;
    InstrumentEndpoint endpoint;  // sweep span and points default to the band
    std::optional<std::size_t> n_points;
    bool overwrite = false;
};
/// Acquires one sweep, writes it next to the manifest and appends the entry.
/// Nothing is written unless the acquisition succeeds.
CommandReport cmd_acquire(const AcquireOptions& options);

}  // namespace rcs
