// rcs: command-line front end. Parses flags, runs one subcommand and maps
// failures to exit codes (1 validation, 2 pipeline, 3 I/O, 4 network).

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "rcs/commands.hpp"

namespace {

struct Globals {
    std::string manifest;
    std::string out = ".";
    int jobs = 1;
    std::optional<std::uint64_t> seed;
    std::string format;
};

int finish(const rcs::CommandReport& report) {
    std::fputs(report.stdout_text.c_str(), stdout);
    std::fputs(report.stderr_text.c_str(), stderr);
    return static_cast<int>(report.code);
}

rcs::OutputFormat format_or(const Globals& g, rcs::OutputFormat fallback) {
    return g.format.empty() ? fallback : rcs::output_format_from_string(g.format);
}

void require_manifest(const Globals& g) {
    if (g.manifest.empty()) throw rcs::InputError("--manifest is required for this subcommand");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RCS extraction toolkit: calibrated monostatic RCS from S11 sweeps"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "rcs 1.0.0");

    Globals g;
    app.add_option("--manifest", g.manifest, "Campaign manifest (JSON)");
    app.add_option("--out", g.out, "Output directory")->capture_default_str();
    app.add_option("--jobs", g.jobs, "Worker threads for per-angle extraction")->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--seed", g.seed, "Seed override (synth)");
    app.add_option("--format", g.format, "Table output format")->check(CLI::IsMember({"json", "csv"}));

    rcs::ExtractSettings settings;
    auto add_gate_flags = [&](CLI::App* sub) {
        sub->add_option("--gate-span", settings.gate_span_s, "Gate span override, seconds of two-way delay");
        sub->add_option("--target-extent", settings.target_extent_m,
                        "Target extent in metres (default: 1.5 x bounding-box diagonal)");
    };
    bool no_figures = false;

    auto* extract = app.add_subcommand("extract", "Per-angle RCS extraction, grid CSV/JSON and heatmap");
    std::vector<std::string> bands;
    extract->add_option("--band", bands, "Band(s) to extract (default: all)");
    add_gate_flags(extract);
    extract->add_flag("--no-figures", no_figures, "Skip SVG output");

    auto* scale = app.add_subcommand("scale", "Delta RCS between two bands with Gaussian fits");
    std::string band1, band2;
    scale->add_option("--band1", band1, "Reference band")->required();
    scale->add_option("--band2", band2, "Compared band")->required();
    add_gate_flags(scale);
    scale->add_flag("--no-figures", no_figures, "Skip SVG output");

    auto* range = app.add_subcommand("range-image", "Range-azimuth image and dominant contributors");
    rcs::RangeImageOptions ri;
    std::string interp = "linear";
    range->add_option("--band", ri.band, "Band (default: first in manifest)");
    range->add_option("--theta", ri.theta_deg, "Elevation in degrees")->required();
    range->add_option("--interp", interp, "Azimuth interpolation")->check(CLI::IsMember({"nearest", "linear"}))
        ->capture_default_str();
    range->add_option("--phi-step", ri.phi_step_deg, "Azimuth grid step in degrees")->capture_default_str();
    range->add_option("--top-k", ri.top_k, "Number of contributors to report")->capture_default_str();
    range->add_option("--max-range", ri.max_range_m, "Half-width of the plotted range window, metres");
    add_gate_flags(range);
    range->add_flag("--no-figures", no_figures, "Skip SVG output");

    auto* plan = app.add_subcommand("plan", "Antenna placement from far-field and footprint bounds");
    rcs::PlanOptions po;
    plan->add_option("--aperture", po.antenna.aperture_m, "Largest antenna aperture dimension, metres")->required();
    plan->add_option("--hpbw", po.antenna.hpbw_deg, "Half-power beamwidth, degrees")->required();
    plan->add_option("--freq", po.f_hz, "Highest frequency, Hz")->required();
    plan->add_option("--width", po.target_width_m, "Target width, metres")->required();
    plan->add_option("--margin", po.margin_m, "Footprint margin, metres")->capture_default_str();
    plan->add_option("--theta", po.theta_deg, "Elevation, degrees")->capture_default_str();

    auto* synth = app.add_subcommand("synth", "Generate a synthetic campaign from a scene file");
    std::string scene;
    synth->add_option("scene", scene, "Scene JSON")->required();

    auto* acquire = app.add_subcommand("acquire", "Acquire one sweep from a SCPI instrument into a campaign");
    rcs::AcquireOptions ao;
    std::string slot = "target";
    acquire->add_option("--band", ao.band, "Band name")->required();
    acquire->add_option("--theta", ao.theta_deg, "Elevation, degrees")->required();
    acquire->add_option("--phi", ao.phi_deg, "Azimuth, degrees")->required();
    acquire->add_option("--slot", slot, "Measurement slot")
        ->check(CLI::IsMember({"target", "background", "sphere", "sphere_background"}))
        ->capture_default_str();
    acquire->add_option("--host", ao.endpoint.host, "Instrument host")->capture_default_str();
    acquire->add_option("--port", ao.endpoint.port, "Instrument TCP port")->capture_default_str();
    acquire->add_option("--timeout-ms", ao.endpoint.timeout_ms, "Per-reply timeout")->capture_default_str();
    acquire->add_option("--if-bw", ao.endpoint.sweep.if_bandwidth_hz, "IF bandwidth, Hz")->capture_default_str();
    acquire->add_option("--power", ao.endpoint.sweep.power_dbm, "Source power, dBm")->capture_default_str();
    acquire->add_option("--points", ao.n_points, "Expected point count (must match the band)");
    acquire->add_flag("--overwrite", ao.overwrite, "Replace an existing entry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(rcs::ExitCode::validation);
    }

    try {
        settings.jobs = g.jobs;
        if (*extract) {
            require_manifest(g);
            return finish(rcs::cmd_extract({g.manifest, g.out, bands, settings, format_or(g, rcs::OutputFormat::csv),
                                            !no_figures}));
        }
        if (*scale) {
            require_manifest(g);
            return finish(rcs::cmd_scale({g.manifest, g.out, band1, band2, settings,
                                          format_or(g, rcs::OutputFormat::csv), !no_figures}));
        }
        if (*range) {
            require_manifest(g);
            ri.manifest = g.manifest;
            ri.out_dir = g.out;
            ri.interp = rcs::angular_interp_from_string(interp);
            ri.settings = settings;
            ri.figures = !no_figures;
            return finish(rcs::cmd_range_image(ri));
        }
        if (*plan) {
            if (!g.format.empty()) po.format = rcs::output_format_from_string(g.format);
            return finish(rcs::cmd_plan(po));
        }
        if (*synth) return finish(rcs::cmd_synth({scene, g.out, g.seed}));
        if (*acquire) {
            require_manifest(g);
            ao.manifest = g.manifest;
            ao.slot = rcs::scenario_from_string(slot);
            return finish(rcs::cmd_acquire(ao));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "rcs: error: %s\n", e.what());
        return static_cast<int>(rcs::exit_code_for(e));
    }
    return 0;
}
