#include <json.hpp>

#include "rcs/pipeline.hpp"

namespace rcs {

namespace {

using nlohmann::json;

json gate_json(const TimeGate& g) {
    return {{"center_s", g.center_s},
            {"span_s", g.span_s},
            {"taper", window_name(g.taper)},
            {"weighting", window_name(g.weighting)},
            {"zero_pad", g.zero_pad}};
}

void gate_from(const json& j, TimeGate& g) {
    g.center_s = j.at("center_s").get<double>();
    g.span_s = j.at("span_s").get<double>();
    g.zero_pad = j.value("zero_pad", kDefaultZeroPad);
}

}  // namespace

std::string records_to_json(const std::vector<ExtractionRecord>& records) {
    json arr = json::array();
    for (const auto& r : records) {
        const auto& d = r.diagnostics;
        arr.push_back({{"band", r.band},
                       {"theta_deg", r.theta_deg},
                       {"phi_deg", r.phi_deg},
                       {"rcs_m2", r.rcs_m2},
                       {"rcs_dbsm", r.rcs_dbsm},
                       {"gate", {{"center_s", r.gate_center_s}, {"span_s", r.gate_span_s}}},
                       {"diagnostics",
                        {{"target_gate", gate_json(d.target_gate)},
                         {"sphere_gate", gate_json(d.sphere_gate)},
                         {"target_peak_over_median_db", d.target_peak_over_median_db},
                         {"sphere_peak_over_median_db", d.sphere_peak_over_median_db},
                         {"target_residual_ratio", d.target_residual_ratio},
                         {"sphere_residual_ratio", d.sphere_residual_ratio},
                         {"span_overridden", d.span_overridden},
                         {"target_extent_m", d.target_extent_m}}}});
    }
    return arr.dump(2) + "\n";
}

std::vector<ExtractionRecord> records_from_json(const std::string& text) {
    std::vector<ExtractionRecord> out;
    try {
        const auto arr = json::parse(text);
        for (const auto& j : arr) {
            ExtractionRecord r;
            r.band = j.at("band").get<std::string>();
            r.theta_deg = j.at("theta_deg").get<double>();
            r.phi_deg = j.at("phi_deg").get<double>();
            r.rcs_m2 = j.at("rcs_m2").get<double>();
            r.rcs_dbsm = j.at("rcs_dbsm").get<double>();
            r.gate_center_s = j.at("gate").at("center_s").get<double>();
            r.gate_span_s = j.at("gate").at("span_s").get<double>();
            if (j.contains("diagnostics")) {
                const auto& d = j["diagnostics"];
                gate_from(d.at("target_gate"), r.diagnostics.target_gate);
                gate_from(d.at("sphere_gate"), r.diagnostics.sphere_gate);
                r.diagnostics.target_peak_over_median_db = d.value("target_peak_over_median_db", 0.0);
                r.diagnostics.sphere_peak_over_median_db = d.value("sphere_peak_over_median_db", 0.0);
                r.diagnostics.target_residual_ratio = d.value("target_residual_ratio", 0.0);
                r.diagnostics.sphere_residual_ratio = d.value("sphere_residual_ratio", 0.0);
                r.diagnostics.span_overridden = d.value("span_overridden", false);
                r.diagnostics.target_extent_m = d.value("target_extent_m", 0.0);
            }
            out.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed extraction records: ") + e.what());
    }
    return out;
}

}  // namespace rcs
