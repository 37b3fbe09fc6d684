#include "rcs/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "rcs/constants.hpp"

namespace rcs {

namespace {

// Small append-only SVG document; all coordinates are printed with fixed
// precision so output bytes depend only on the data.
class Svg {
public:
    Svg(double width, double height) {
        out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
                "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
        out_ += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
    }

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return buf;
    }

    void rect(double x, double y, double w, double h, const std::string& fill, const std::string& extra = {}) {
        out_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
                "\" fill=\"" + fill + "\"" + (extra.empty() ? "" : " " + extra) + "/>\n";
    }
    void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0) {
        out_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
                "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
    }
    void circle(double cx, double cy, double r, const std::string& fill) {
        out_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" + fill + "\"/>\n";
    }
    void text(double x, double y, const std::string& s, const std::string& anchor = "middle", double rotate = 0.0) {
        out_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor + "\"";
        if (rotate != 0.0) out_ += " transform=\"rotate(" + num(rotate) + " " + num(x) + " " + num(y) + ")\"";
        out_ += ">" + escape(s) + "</text>\n";
    }
    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width) {
        out_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\" points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            out_ += (i ? " " : "") + num(pts[i].first) + "," + num(pts[i].second);
        }
        out_ += "\"/>\n";
    }
    void raw(const std::string& s) { out_ += s; }

    std::string finish() { return out_ + "</svg>\n"; }

private:
    static std::string escape(const std::string& s) {
        std::string o;
        for (const char c : s) {
            if (c == '<') o += "&lt;";
            else if (c == '>') o += "&gt;";
            else if (c == '&') o += "&amp;";
            else o += c;
        }
        return o;
    }

    std::string out_;
};

// Viridis anchors.
std::string colormap(double u) {
    static constexpr std::array<std::array<double, 3>, 6> kStops{{{68, 1, 84},
                                                                  {65, 68, 135},
                                                                  {42, 120, 142},
                                                                  {34, 168, 132},
                                                                  {122, 209, 81},
                                                                  {253, 231, 37}}};
    if (!std::isfinite(u)) return "#bbbbbb";
    u = std::clamp(u, 0.0, 1.0) * static_cast<double>(kStops.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(u), kStops.size() - 2);
    const double t = u - static_cast<double>(i);
    char buf[8];
    int c[3];
    for (int k = 0; k < 3; ++k) c[k] = static_cast<int>(std::lround(kStops[i][k] + t * (kStops[i + 1][k] - kStops[i][k])));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c[0], c[1], c[2]);
    return buf;
}

std::string label(double v, const char* fmt = "%g") {
    char buf[32];
    std::snprintf(buf, sizeof buf, fmt, v);
    std::string s = buf;
    // "-0.0" reads badly on an axis.
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

void colorbar(Svg& svg, double x, double y, double h, double lo, double hi, const std::string& unit) {
    constexpr int steps = 32;
    for (int k = 0; k < steps; ++k) {
        const double u = 1.0 - (k + 0.5) / steps;
        svg.rect(x, y + h * k / steps, 14, h / steps + 0.5, colormap(u));
    }
    svg.text(x + 18, y + 4, label(hi, "%.1f"), "start");
    svg.text(x + 18, y + h, label(lo, "%.1f"), "start");
    svg.text(x + 7, y - 6, unit);
}

std::vector<std::size_t> range_rows(const RangeAzimuthImage& image, double max_range_m, std::size_t limit) {
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < image.range_axis_m.size(); ++r) {
        if (std::abs(image.range_axis_m[r]) <= max_range_m) rows.push_back(r);
    }
    if (rows.size() > limit) {
        const std::size_t stride = (rows.size() + limit - 1) / limit;
        std::vector<std::size_t> thinned;
        for (std::size_t i = 0; i < rows.size(); i += stride) thinned.push_back(rows[i]);
        rows.swap(thinned);
    }
    return rows;
}

double image_peak(const RangeAzimuthImage& image) {
    double peak = 0.0;
    for (const auto& c : image.columns) {
        for (const double v : c) peak = std::max(peak, v);
    }
    return peak;
}

}  // namespace

std::string heatmap_svg(const RcsGrid& grid, const std::string& title) {
    constexpr double cell_w = 22.0, cell_h = 26.0, left = 70.0, top = 40.0;
    const double w = left + cell_w * static_cast<double>(grid.cols()) + 90.0;
    const double h = top + cell_h * static_cast<double>(grid.rows()) + 60.0;
    Svg svg(w, h);
    svg.text(w / 2.0, 20.0, title);

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const double v : grid.rcs_dbsm) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    const double span = hi > lo ? hi - lo : 1.0;

    svg.raw("<defs><pattern id=\"mirror\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
            "<path d=\"M0,6 L6,0\" stroke=\"white\" stroke-width=\"1\" opacity=\"0.6\"/></pattern></defs>\n");
    // Row 0 (lowest elevation) at the bottom.
    for (std::size_t i = 0; i < grid.rows(); ++i) {
        const double y = top + cell_h * static_cast<double>(grid.rows() - 1 - i);
        for (std::size_t j = 0; j < grid.cols(); ++j) {
            const double x = left + cell_w * static_cast<double>(j);
            const double v = grid.at(i, j);
            svg.rect(x, y, cell_w, cell_h, colormap(std::isfinite(v) ? (v - lo) / span : NAN));
            if (grid.source_at(i, j) == CellSource::mirrored) svg.rect(x, y, cell_w, cell_h, "url(#mirror)");
        }
        svg.text(left - 6, y + cell_h / 2.0 + 4, label(grid.theta_deg[i]), "end");
    }
    const double axis_y = top + cell_h * static_cast<double>(grid.rows());
    const std::size_t stride = grid.cols() > 18 ? 3 : 1;
    for (std::size_t j = 0; j < grid.cols(); j += stride) {
        svg.text(left + cell_w * (static_cast<double>(j) + 0.5), axis_y + 14, label(grid.phi_deg[j]));
    }
    svg.text(left + cell_w * static_cast<double>(grid.cols()) / 2.0, axis_y + 34, "azimuth phi (deg)");
    svg.text(18, top + cell_h * static_cast<double>(grid.rows()) / 2.0, "elevation theta (deg)", "middle", -90);
    colorbar(svg, w - 70, top, cell_h * static_cast<double>(grid.rows()), lo, hi, "dBsm");
    return svg.finish();
}

std::string histogram_svg(std::span<const double> samples, const GaussianFit& fit, const std::string& title) {
    constexpr double w = 520, h = 340, left = 60, right = 20, top = 40, bottom = 50;
    Svg svg(w, h);
    svg.text(w / 2.0, 20.0, title);
    const auto hist = histogram_fd(samples);
    const double x_lo = std::min(hist.lo, fit.mu_db - 3.0 * fit.sigma_db);
    const double x_hi = std::max(hist.lo + hist.bin_width * static_cast<double>(hist.counts.size()),
                                 fit.mu_db + 3.0 * fit.sigma_db);
    const double x_span = x_hi > x_lo ? x_hi - x_lo : 1.0;
    const double n = static_cast<double>(samples.size());
    double y_max = static_cast<double>(*std::max_element(hist.counts.begin(), hist.counts.end()));
    if (fit.sigma_db > 0.0) {
        y_max = std::max(y_max, n * hist.bin_width / (fit.sigma_db * std::sqrt(2.0 * kPi)));
    }
    y_max *= 1.1;
    auto px = [&](double x) { return left + (x - x_lo) / x_span * (w - left - right); };
    auto py = [&](double y) { return h - bottom - y / y_max * (h - top - bottom); };

    for (std::size_t b = 0; b < hist.counts.size(); ++b) {
        const double x0 = hist.lo + hist.bin_width * static_cast<double>(b);
        const double c = static_cast<double>(hist.counts[b]);
        svg.rect(px(x0), py(c), px(x0 + hist.bin_width) - px(x0), py(0) - py(c), "#6a8fc7", "stroke=\"white\"");
    }
    if (fit.sigma_db > 0.0) {
        std::vector<std::pair<double, double>> pts;
        for (int k = 0; k <= 200; ++k) {
            const double x = x_lo + x_span * k / 200.0;
            const double z = (x - fit.mu_db) / fit.sigma_db;
            const double y = n * hist.bin_width * std::exp(-0.5 * z * z) / (fit.sigma_db * std::sqrt(2.0 * kPi));
            pts.emplace_back(px(x), py(y));
        }
        svg.polyline(pts, "#c0392b", 2.0);
    } else {
        svg.line(px(fit.mu_db), py(0), px(fit.mu_db), py(y_max / 1.1), "#c0392b", 2.0);
    }
    svg.line(left, py(0), w - right, py(0), "black");
    svg.line(left, py(0), left, top, "black");
    for (int k = 0; k <= 5; ++k) {
        const double x = x_lo + x_span * k / 5.0;
        svg.text(px(x), h - bottom + 16, label(x, "%.1f"));
    }
    const double y_top = y_max / 1.1;
    for (int k = 0; k <= 4; ++k) {
        const double c = std::round(y_top * k / 4.0);
        svg.line(left - 4, py(c), left, py(c), "black");
        svg.text(left - 6, py(c) + 4, label(c), "end");
    }
    svg.text((left + w - right) / 2.0, h - 12, "delta RCS (dB)");
    svg.text(16, (top + h - bottom) / 2.0, "count", "middle", -90);
    char fit_label[96];
    std::snprintf(fit_label, sizeof fit_label, "mu = %.2f dB, sigma = %.2f dB, n = %zu", fit.mu_db, fit.sigma_db,
                  fit.n_samples);
    svg.text(w - right, top + 4, fit_label, "end");
    return svg.finish();
}

std::string range_azimuth_svg(const RangeAzimuthImage& image, double max_range_m, const std::string& title) {
    const auto rows = range_rows(image, max_range_m, 240);
    constexpr double left = 70, top = 40, plot_w = 540, plot_h = 360;
    Svg svg(left + plot_w + 90, top + plot_h + 60);
    svg.text((left + plot_w) / 2.0 + 20, 20, title);
    const double peak = image_peak(image);
    constexpr double dyn_db = 40.0;
    const double cw = plot_w / static_cast<double>(image.columns.size());
    const double rh = rows.empty() ? 0.0 : plot_h / static_cast<double>(rows.size());
    for (std::size_t j = 0; j < image.columns.size(); ++j) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const double v = image.columns[j][rows[k]];
            const double db = peak > 0.0 && v > 0.0 ? amplitude_to_db(v / peak) : -dyn_db;
            svg.rect(left + cw * static_cast<double>(j), top + plot_h - rh * static_cast<double>(k + 1), cw + 0.3,
                     rh + 0.3, colormap((db + dyn_db) / dyn_db));
        }
    }
    for (int k = 0; k <= 4; ++k) {
        const double r = -max_range_m + 2.0 * max_range_m * k / 4.0;
        svg.text(left - 6, top + plot_h - plot_h * k / 4.0 + 4, label(r, "%.2f"), "end");
    }
    const std::size_t stride = std::max<std::size_t>(1, image.phi_axis_deg.size() / 8);
    for (std::size_t j = 0; j < image.phi_axis_deg.size(); j += stride) {
        svg.text(left + cw * (static_cast<double>(j) + 0.5), top + plot_h + 14, label(image.phi_axis_deg[j]));
    }
    svg.text(left + plot_w / 2.0, top + plot_h + 36, "azimuth phi (deg)");
    svg.text(16, top + plot_h / 2.0, "range from target centre (m)", "middle", -90);
    colorbar(svg, left + plot_w + 20, top, plot_h, -dyn_db, 0.0, "dB");
    return svg.finish();
}

std::string polar_range_svg(const RangeAzimuthImage& image, double max_range_m, const std::string& title) {
    const auto rows = range_rows(image, max_range_m, 160);
    constexpr double size = 520, margin = 50, dyn_db = 30.0;
    const double cx = size / 2.0, cy = size / 2.0 + 10, radius = size / 2.0 - margin;
    Svg svg(size + 80, size + 20);
    svg.text(cx, 20, title);
    for (int ring = 1; ring <= 4; ++ring) {
        const double r = radius * ring / 4.0;
        svg.raw("<circle cx=\"" + Svg::num(cx) + "\" cy=\"" + Svg::num(cy) + "\" r=\"" + Svg::num(r) +
                "\" fill=\"none\" stroke=\"#dddddd\"/>\n");
        svg.text(cx + r + 2, cy - 2, label(max_range_m * ring / 4.0, "%.2f"), "start");
    }
    const double peak = image_peak(image);
    const double dot = std::max(1.0, radius / static_cast<double>(std::max<std::size_t>(rows.size(), 1)));
    for (std::size_t j = 0; j < image.columns.size(); ++j) {
        const double phi = image.phi_axis_deg[j] * kPi / 180.0;
        for (const std::size_t r : rows) {
            const double v = image.columns[j][r];
            if (!(peak > 0.0 && v > 0.0)) continue;
            const double db = amplitude_to_db(v / peak);
            if (db < -dyn_db) continue;
            const double rho = image.range_axis_m[r] / max_range_m * radius;
            svg.circle(cx + rho * std::cos(phi), cy - rho * std::sin(phi), dot, colormap((db + dyn_db) / dyn_db));
        }
    }
    svg.text(cx, size + 12, "signed range along each azimuth (m)");
    colorbar(svg, size + 20, margin, size - 2 * margin, -dyn_db, 0.0, "dB");
    return svg.finish();
}

}  // namespace rcs
