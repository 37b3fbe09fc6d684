#include "rcs/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include "rcs/ingest.hpp"
#include "rcs/report.hpp"
#include "rcs/svg.hpp"
#include "rcs/synth.hpp"

namespace rcs {

namespace fs = std::filesystem;

namespace {

std::string deg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void emit(CommandReport& report, const std::string& out_dir, const std::string& rel, std::string_view content) {
    write_text_file_atomic((fs::path(out_dir) / rel).string(), content);
    report.written.push_back(rel);
}

std::string failure_line(const AngleFailure& f) {
    return "band " + f.band + ", theta " + deg(f.theta_deg) + ", phi " + deg(f.phi_deg) + " [" + f.stage +
           "]: " + f.message;
}

std::string failures_to_json(const std::vector<AngleFailure>& failures) {
    std::string out = "[\n";
    for (std::size_t i = 0; i < failures.size(); ++i) {
        const auto& f = failures[i];
        std::string msg;
        for (const char c : f.message) {
            if (c == '"' || c == '\\') msg += '\\';
            if (c == '\n') {
                msg += "\\n";
                continue;
            }
            msg += c;
        }
        out += "  {\"band\": \"" + f.band + "\", \"theta_deg\": " + format_double(f.theta_deg) +
               ", \"phi_deg\": " + format_double(f.phi_deg) + ", \"stage\": \"" + f.stage + "\", \"message\": \"" +
               msg + "\"}" + (i + 1 < failures.size() ? ",\n" : "\n");
    }
    return out + "]\n";
}

const BandSpec& require_band(const Campaign& campaign, const std::string& name) {
    if (const auto* b = campaign.manifest().find_band(name)) return *b;
    std::string known;
    for (const auto& b : campaign.manifest().bands) known += (known.empty() ? "" : ", ") + b.name;
    throw ValidationError({{name, 0.0, 0.0, {}, "band not in manifest (available: " + known + ")"}});
}

CalibrationContext context_for(const Campaign& campaign) {
    const auto& m = campaign.manifest();
    return {m.sphere.radius_m, m.target.distance_m, m.sphere.distance_m};
}

[[noreturn]] void throw_failures(const std::string& stage, const std::vector<AngleFailure>& failures) {
    std::string msg = std::to_string(failures.size()) + " angle(s) failed";
    for (const auto& f : failures) msg += "\n  " + failure_line(f);
    throw PipelineError(stage, msg);
}

}  // namespace

OutputFormat output_format_from_string(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw InputError("unknown output format '" + std::string(s) + "' (expected json or csv)");
}

ExitCode exit_code_for(const std::exception& e) noexcept {
    if (dynamic_cast<const AcquisitionError*>(&e)) return ExitCode::network;
    if (dynamic_cast<const PipelineError*>(&e)) return ExitCode::pipeline;
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const fs::filesystem_error*>(&e)) return ExitCode::io;
    return ExitCode::validation;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex m;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(m);
                    if (!first) first = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

double default_target_extent(const TargetSpec& t) {
    const double diagonal = std::sqrt(t.length_m * t.length_m + t.width_m * t.width_m + t.height_m * t.height_m);
    return std::max(0.1, kExtentPerDiagonal * diagonal);
}

GateParams gate_params_for(const Campaign& campaign, const ExtractSettings& settings) {
    GateParams p;
    p.target_extent_m = settings.target_extent_m.value_or(default_target_extent(campaign.manifest().target));
    if (!(p.target_extent_m > 0.0)) throw InputError("target extent must be > 0");
    if (settings.gate_span_s) {
        if (!(*settings.gate_span_s > 0.0)) throw InputError("gate span must be > 0");
        p.span_override_s = settings.gate_span_s;
    }
    return p;
}

BandExtraction extract_band(const Campaign& campaign, const std::string& band, const ExtractSettings& settings) {
    require_band(campaign, band);
    const auto ctx = context_for(campaign);
    const auto params = gate_params_for(campaign, settings);

    std::vector<AngleKey> angles;
    for (const auto& a : campaign.target_angles(band)) {
        if (!settings.theta_deg || a.theta_udeg == AngleKey::from_degrees(*settings.theta_deg, 0.0).theta_udeg) {
            angles.push_back(a);
        }
    }

    struct Slot {
        std::optional<ExtractionRecord> record;
        std::optional<SigmaSpectrum> spectrum;
        std::optional<AngleFailure> failure;
    };
    std::vector<Slot> slots(angles.size());
    parallel_for(angles.size(), settings.jobs, [&](std::size_t i) {
        const auto& a = angles[i];
        try {
            auto result = extract_rcs(campaign.triple(band, a), ctx, params, band);
            slots[i].record = make_record(band, a.theta_deg(), a.phi_deg(), result);
            if (settings.keep_spectra) slots[i].spectrum = std::move(result.spectrum);
        } catch (const PipelineError& e) {
            slots[i].failure = AngleFailure{band, a.theta_deg(), a.phi_deg(), e.stage(), e.what()};
        } catch (const Error& e) {
            slots[i].failure = AngleFailure{band, a.theta_deg(), a.phi_deg(), "load", e.what()};
        }
    });

    BandExtraction out;
    out.band = band;
    for (auto& s : slots) {
        if (s.record) {
            out.records.push_back(std::move(*s.record));
            out.spectra.push_back(std::move(s.spectrum));
        } else {
            out.failures.push_back(std::move(*s.failure));
        }
    }
    return out;
}

CommandReport cmd_extract(const ExtractOptions& options) {
    const auto campaign = load_campaign(options.manifest);
    std::vector<std::string> bands = options.bands;
    if (bands.empty()) {
        for (const auto& b : campaign.manifest().bands) bands.push_back(b.name);
    }
    for (const auto& b : bands) require_band(campaign, b);

    CommandReport report;
    for (const auto& band : bands) {
        const auto ex = extract_band(campaign, band, options.settings);
        emit(report, options.out_dir, band + "/records.json", records_to_json(ex.records));
        if (!ex.failures.empty()) {
            emit(report, options.out_dir, band + "/failures.json", failures_to_json(ex.failures));
            for (const auto& f : ex.failures) report.stderr_text += failure_line(f) + "\n";
            report.code = ExitCode::pipeline;
        }
        const std::size_t total = ex.records.size() + ex.failures.size();
        report.stdout_text += "band " + band + ": " + std::to_string(ex.records.size()) + "/" +
                              std::to_string(total) + " angles extracted\n";
        if (ex.records.empty()) continue;
        const auto grid = build_rcs_grid(ex.records, campaign.manifest().mirror_azimuth);
        if (options.format == OutputFormat::json) {
            emit(report, options.out_dir, band + "/rcs_grid.json", grid_to_json(grid));
        } else {
            emit(report, options.out_dir, band + "/rcs_grid.csv", grid_to_csv(grid));
        }
        if (options.figures) {
            emit(report, options.out_dir, band + "/heatmap.svg",
                 heatmap_svg(grid, campaign.manifest().campaign_id + " " + band + " RCS (dBsm)"));
        }
    }
    return report;
}

ScaleResult compute_scale(const Campaign& campaign, const ScaleOptions& options) {
    require_band(campaign, options.band1);
    require_band(campaign, options.band2);
    const bool mirror = campaign.manifest().mirror_azimuth;
    auto grid_for = [&](const std::string& band) {
        const auto ex = extract_band(campaign, band, options.settings);
        if (!ex.failures.empty()) throw_failures("scale", ex.failures);
        if (ex.records.empty()) throw PipelineError("scale", "band " + band + " has no target angles");
        return build_rcs_grid(ex.records, mirror);
    };
    const auto g1 = grid_for(options.band1);
    const auto g2 = grid_for(options.band2);
    ScaleResult r;
    r.samples = delta_rcs(g1, g2);
    if (r.samples.empty()) throw PipelineError("scale", "bands share no measured (theta, phi) cells");
    r.rows = scale_table(r.samples);
    return r;
}

CommandReport cmd_scale(const ScaleOptions& options) {
    const auto campaign = load_campaign(options.manifest);
    const auto result = compute_scale(campaign, options);
    CommandReport report;
    emit(report, options.out_dir, "delta_rcs.csv", delta_to_csv(result.samples));
    if (options.format == OutputFormat::json) {
        emit(report, options.out_dir, "scale_table.json",
             scale_table_to_json(result.rows, options.band1, options.band2));
    } else {
        emit(report, options.out_dir, "scale_table.csv", scale_table_to_csv(result.rows));
    }
    if (options.figures) {
        std::vector<double> deltas;
        for (const auto& s : result.samples) deltas.push_back(s.delta_db);
        emit(report, options.out_dir, "delta_histogram.svg",
             histogram_svg(deltas, result.rows.back().fit,
                           "delta RCS " + options.band2 + " vs " + options.band1 + " (all elevations)"));
    }
    report.stdout_text = scale_table_to_text(result.rows);
    return report;
}

RangeImageResult compute_range_image(const Campaign& campaign, const RangeImageOptions& options) {
    const std::string band = options.band.empty() ? campaign.manifest().bands.front().name : options.band;
    require_band(campaign, band);
    const auto elevations = campaign.elevations(band);
    const auto want = AngleKey::from_degrees(options.theta_deg, 0.0).theta_udeg;
    const bool present = std::any_of(elevations.begin(), elevations.end(), [&](double t) {
        return AngleKey::from_degrees(t, 0.0).theta_udeg == want;
    });
    if (!present) {
        std::string list;
        for (const double t : elevations) list += (list.empty() ? "" : ", ") + deg(t);
        throw InputError("theta " + deg(options.theta_deg) + " not measured in band " + band +
                         "; available elevations: " + list);
    }

    auto settings = options.settings;
    settings.theta_deg = options.theta_deg;
    settings.keep_spectra = true;
    const auto ex = extract_band(campaign, band, settings);
    if (!ex.failures.empty()) throw_failures("range_image", ex.failures);

    const double d_target = campaign.manifest().target.distance_m;
    std::vector<AzimuthProfile> profiles(ex.records.size());
    parallel_for(profiles.size(), options.settings.jobs, [&](std::size_t i) {
        profiles[i] = {ex.records[i].phi_deg, range_response(*ex.spectra[i], d_target)};
    });

    RangeImageResult r;
    r.image = build_range_azimuth_image(std::move(profiles), options.interp, options.phi_step_deg);
    r.contributors = top_contributors(r.image, options.top_k);
    r.max_range_m = options.max_range_m.value_or(gate_params_for(campaign, options.settings).target_extent_m);
    if (!(r.max_range_m > 0.0)) throw InputError("max range must be > 0");
    return r;
}

CommandReport cmd_range_image(const RangeImageOptions& options) {
    const auto campaign = load_campaign(options.manifest);
    const auto r = compute_range_image(campaign, options);
    CommandReport report;
    emit(report, options.out_dir, "range_azimuth.csv", range_image_to_csv(r.image));
    emit(report, options.out_dir, "top_contributors.json", contributors_to_json(r.contributors));
    if (options.figures) {
        const std::string title = campaign.manifest().campaign_id + " range response, theta " + deg(options.theta_deg);
        emit(report, options.out_dir, "range_azimuth.svg", range_azimuth_svg(r.image, r.max_range_m, title));
        emit(report, options.out_dir, "range_polar.svg", polar_range_svg(r.image, r.max_range_m, title));
    }
    for (const auto& c : r.contributors.points) {
        char line[128];
        std::snprintf(line, sizeof line, "range %+.4f m  phi %g deg  |sqrt(sigma)| %.6g\n", c.range_m, c.phi_deg,
                      c.magnitude);
        report.stdout_text += line;
    }
    if (r.contributors.truncated) report.stdout_text += "(fewer local maxima than requested)\n";
    return report;
}

CommandReport cmd_plan(const PlanOptions& options) {
    const auto plan = plan_measurement(options.antenna, options.f_hz, options.target_width_m, options.margin_m,
                                       options.theta_deg);
    CommandReport report;
    if (!options.format) {
        report.stdout_text = plan_to_text(plan);
    } else if (*options.format == OutputFormat::json) {
        report.stdout_text = plan_to_json(plan);
    } else {
        report.stdout_text = "field,value\n";
        report.stdout_text += "distance_m," + format_double(plan.distance_m) + "\n";
        report.stdout_text += "antenna_height_m," + format_double(plan.antenna_height_m) + "\n";
        report.stdout_text += "ground_standoff_m," + format_double(plan.ground_standoff_m) + "\n";
        report.stdout_text += "theta_deg," + format_double(plan.theta_deg) + "\n";
        report.stdout_text += "constraint_binding," + std::string(to_string(plan.constraint_binding)) + "\n";
        report.stdout_text += "farfield_min_m," + format_double(plan.farfield_min_m) + "\n";
        report.stdout_text += "footprint_min_m," + format_double(plan.footprint_min_m) + "\n";
    }
    return report;
}

CommandReport cmd_synth(const SynthOptions& options) {
    auto tmpl = parse_scene(read_text_file(options.scene_path));
    if (options.seed) tmpl.seed = *options.seed;
    const auto gen = generate_campaign(tmpl, options.out_dir);
    CommandReport report;
    report.written.push_back("manifest.json");
    for (const auto& e : gen.manifest.entries) report.written.push_back(e.path);
    report.stdout_text = "wrote " + std::to_string(gen.sweep_files) + " sweep files and manifest.json\n";
    return report;
}

CommandReport cmd_acquire(const AcquireOptions& options) {
    auto manifest = parse_manifest(read_text_file(options.manifest));
    const auto* band = manifest.find_band(options.band);
    if (!band) throw ValidationError({{options.band, options.theta_deg, options.phi_deg, {}, "band not in manifest"}});
    const std::size_t n = options.n_points.value_or(band->n_samples);
    if (n != band->n_samples) {
        throw ValidationError({{options.band, options.theta_deg, options.phi_deg, std::string(to_string(options.slot)),
                                "requested " + std::to_string(n) + " points but the band defines " +
                                    std::to_string(band->n_samples)}});
    }
    const auto key = AngleKey::from_degrees(options.theta_deg, options.phi_deg);
    auto existing = std::find_if(manifest.entries.begin(), manifest.entries.end(), [&](const ManifestEntry& e) {
        return e.band == options.band && e.scenario == options.slot &&
               AngleKey::from_degrees(e.theta_deg, e.phi_deg) == key;
    });
    if (existing != manifest.entries.end() && !options.overwrite) {
        throw ValidationError({{options.band, options.theta_deg, options.phi_deg, std::string(to_string(options.slot)),
                                "entry already exists (use --overwrite to replace it)"}});
    }

    auto endpoint = options.endpoint;
    endpoint.sweep.f_start_hz = band->f_start_hz;
    endpoint.sweep.f_stop_hz = band->f_stop_hz;
    endpoint.sweep.n_points = n;
    const auto sweep = acquire_sweep(endpoint, options.slot);

    const auto dir = fs::path(options.manifest).parent_path();
    const std::string rel = sweep_file_path(options.band, options.slot, options.theta_deg, options.phi_deg);
    TouchstoneWriteOptions opts;
    opts.comment = "acquired " + std::string(to_string(options.slot)) + " sweep";
    write_text_file_atomic((dir / rel).string(), write_touchstone_s1p(sweep, opts));
    ManifestEntry entry{options.band, options.theta_deg, options.phi_deg, options.slot, rel, std::nullopt};
    if (existing != manifest.entries.end()) {
        *existing = entry;
    } else {
        manifest.entries.push_back(entry);
    }
    write_text_file_atomic(options.manifest, serialize_manifest(manifest));

    CommandReport report;
    report.written = {rel, "manifest.json"};
    report.stdout_text = "acquired " + std::to_string(sweep.size()) + " points into " + rel + "\n";
    return report;
}

}  // namespace rcs
