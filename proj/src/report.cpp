#include "rcs/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rcs/error.hpp"

namespace rcs {

namespace {

using nlohmann::json;

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_or_nan(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw InputError("bad numeric field '" + s + "'");
    return v;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const char* source_name(CellSource s) {
    switch (s) {
        case CellSource::measured: return "measured";
        case CellSource::mirrored: return "mirrored";
        case CellSource::missing: return "missing";
    }
    return "missing";
}

}  // namespace

std::string format_double(double v) {
    if (!std::isfinite(v)) return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string grid_to_csv(const RcsGrid& grid) {
    std::string out = "theta_deg\\phi_deg";
    for (const double p : grid.phi_deg) out += "," + format_double(p);
    out += "\n";
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        out += format_double(grid.theta_deg[i]);
        for (std::size_t j = 0; j < grid.cols(); ++j) out += "," + format_double(grid.at(i, j));
        out += "\n";
    }
    return out;
}

RcsGrid grid_from_csv(const std::string& text, const std::string& band_label) {
    std::istringstream in(text);
    std::string line;
    RcsGrid g;
    g.band_label = band_label;
    if (!std::getline(in, line)) throw InputError("empty grid CSV");
    const auto header = split_csv(line);
    if (header.empty()) throw InputError("grid CSV header is empty");
    for (std::size_t j = 1; j < header.size(); ++j) g.phi_deg.push_back(parse_or_nan(header[j]));
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw InputError("grid CSV line " + std::to_string(line_no) + " has the wrong number of fields");
        }
        g.theta_deg.push_back(parse_or_nan(cells[0]));
        for (std::size_t j = 1; j < cells.size(); ++j) {
            const double v = parse_or_nan(cells[j]);
            g.rcs_dbsm.push_back(v);
            g.source.push_back(std::isfinite(v) ? CellSource::measured : CellSource::missing);
        }
    }
    return g;
}

std::string grid_to_json(const RcsGrid& grid) {
    json values = json::array();
    json sources = json::array();
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        json row = json::array();
        json srow = json::array();
        for (std::size_t j = 0; j < grid.cols(); ++j) {
            row.push_back(number_or_null(grid.at(i, j)));
            srow.push_back(source_name(grid.source_at(i, j)));
        }
        values.push_back(std::move(row));
        sources.push_back(std::move(srow));
    }
    const json doc = {{"band", grid.band_label},
                      {"theta_deg", grid.theta_deg},
                      {"phi_deg", grid.phi_deg},
                      {"rcs_dbsm", values},
                      {"source", sources}};
    return doc.dump(2) + "\n";
}

std::string delta_to_csv(const std::vector<DeltaRcsSample>& samples) {
    std::string out = "theta_deg,phi_deg,delta_rcs_db\n";
    for (const auto& s : samples) {
        out += format_double(s.theta_deg) + "," + format_double(s.phi_deg) + "," + format_double(s.delta_db) + "\n";
    }
    return out;
}

std::string scale_table_to_json(const std::vector<ScaleRow>& rows, const std::string& band1,
                                const std::string& band2) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"theta", r.label},
                       {"mu_db", r.fit.mu_db},
                       {"sigma_db", r.fit.sigma_db},
                       {"n_samples", r.fit.n_samples}});
    }
    const json doc = {{"band1", band1}, {"band2", band2}, {"estimator", "mle_population_sigma"}, {"rows", arr}};
    return doc.dump(2) + "\n";
}

std::string scale_table_to_csv(const std::vector<ScaleRow>& rows) {
    std::string out = "theta,mu_db,sigma_db,n_samples\n";
    for (const auto& r : rows) {
        out += r.label + "," + format_double(r.fit.mu_db) + "," + format_double(r.fit.sigma_db) + "," +
               std::to_string(r.fit.n_samples) + "\n";
    }
    return out;
}

std::string scale_table_to_text(const std::vector<ScaleRow>& rows) {
    std::string head = "Parameter   ", mu = "mu (dB)     ", sigma = "sigma (dB)  ";
    char buf[32];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%9s", (r.theta_deg ? r.label + "deg" : r.label).c_str());
        head += buf;
        std::snprintf(buf, sizeof buf, "%9.2f", r.fit.mu_db);
        mu += buf;
        std::snprintf(buf, sizeof buf, "%9.2f", r.fit.sigma_db);
        sigma += buf;
    }
    return head + "\n" + mu + "\n" + sigma + "\n";
}

std::string range_image_to_csv(const RangeAzimuthImage& image) {
    std::string out = "range_m";
    for (const double p : image.phi_axis_deg) out += "," + format_double(p);
    out += "\n";
    for (std::size_t r = 0; r < image.range_axis_m.size(); ++r) {
        out += format_double(image.range_axis_m[r]);
        for (const auto& col : image.columns) out += "," + format_double(col[r]);
        out += "\n";
    }
    return out;
}

std::string contributors_to_json(const ContributorList& list) {
    json arr = json::array();
    for (const auto& c : list.points) {
        arr.push_back({{"range_m", c.range_m}, {"phi_deg", c.phi_deg}, {"magnitude", c.magnitude}});
    }
    json doc = {{"points", arr}, {"truncated", list.truncated}};
    if (list.truncated) doc["note"] = "fewer local maxima than requested; all maxima returned";
    return doc.dump(2) + "\n";
}

std::string plan_to_json(const PlacementPlan& p) {
    const json doc = {{"distance_m", p.distance_m},
                      {"antenna_height_m", p.antenna_height_m},
                      {"ground_standoff_m", p.ground_standoff_m},
                      {"theta_deg", p.theta_deg},
                      {"constraint_binding", std::string(to_string(p.constraint_binding))},
                      {"farfield_min_m", p.farfield_min_m},
                      {"footprint_min_m", p.footprint_min_m}};
    return doc.dump(2) + "\n";
}

std::string plan_to_text(const PlacementPlan& p) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "far-field minimum      %10.4f m\n"
                  "footprint minimum      %10.4f m\n"
                  "binding constraint     %10s\n"
                  "slant distance         %10.4f m\n"
                  "elevation              %10.2f deg\n"
                  "antenna height         %10.4f m\n"
                  "ground standoff        %10.4f m\n",
                  p.farfield_min_m, p.footprint_min_m, std::string(to_string(p.constraint_binding)).c_str(),
                  p.distance_m, p.theta_deg, p.antenna_height_m, p.ground_standoff_m);
    return buf;
}

}  // namespace rcs
