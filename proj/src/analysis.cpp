#include "rcs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "rcs/campaign.hpp"
#include "rcs/constants.hpp"
#include "rcs/error.hpp"

namespace rcs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::int64_t micro(double deg) { return static_cast<std::int64_t>(std::llround(deg * 1e6)); }

std::size_t index_of(const std::vector<double>& axis, double v) {
    for (std::size_t i = 0; i < axis.size(); ++i) {
        if (micro(axis[i]) == micro(v)) return i;
    }
    return axis.size();
}

}  // namespace

RcsGrid build_rcs_grid(const std::vector<ExtractionRecord>& records, bool mirror) {
    if (records.empty()) throw InputError("build_rcs_grid needs at least one record");
    RcsGrid g;
    g.band_label = records.front().band;

    std::set<std::int64_t> thetas, phis;
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const auto& r : records) {
        if (r.band != g.band_label) throw InputError("records from several bands passed to build_rcs_grid");
        if (!seen.insert({micro(r.theta_deg), micro(r.phi_deg)}).second) {
            throw InputError("duplicate record at theta " + std::to_string(r.theta_deg) + ", phi " +
                             std::to_string(r.phi_deg));
        }
        thetas.insert(micro(r.theta_deg));
        phis.insert(micro(r.phi_deg));
    }
    if (mirror) {
        const std::set<std::int64_t> measured = phis;
        for (const auto p : measured) {
            if (p > 0 && p < 180'000'000) phis.insert(360'000'000 - p);
        }
    }
    for (const auto t : thetas) g.theta_deg.push_back(static_cast<double>(t) * 1e-6);
    for (const auto p : phis) g.phi_deg.push_back(static_cast<double>(p) * 1e-6);
    g.rcs_dbsm.assign(g.rows() * g.cols(), kNaN);
    g.source.assign(g.rows() * g.cols(), CellSource::missing);

    for (const auto& r : records) {
        const auto i = index_of(g.theta_deg, r.theta_deg);
        const auto j = index_of(g.phi_deg, r.phi_deg);
        g.rcs_dbsm[i * g.cols() + j] = r.rcs_dbsm;
        g.source[i * g.cols() + j] = CellSource::measured;
    }
    if (mirror) {
        for (std::size_t i = 0; i < g.rows(); ++i) {
            for (std::size_t j = 0; j < g.cols(); ++j) {
                const auto p = micro(g.phi_deg[j]);
                if (p <= 180'000'000 || g.source[i * g.cols() + j] != CellSource::missing) continue;
                const auto src = index_of(g.phi_deg, static_cast<double>(360'000'000 - p) * 1e-6);
                if (src < g.cols() && g.measured(i, src)) {
                    g.rcs_dbsm[i * g.cols() + j] = g.at(i, src);
                    g.source[i * g.cols() + j] = CellSource::mirrored;
                }
            }
        }
    }
    return g;
}

std::vector<DeltaRcsSample> delta_rcs(const RcsGrid& band1, const RcsGrid& band2) {
    std::vector<DeltaRcsSample> out;
    for (std::size_t i = 0; i < band1.rows(); ++i) {
        const auto i2 = index_of(band2.theta_deg, band1.theta_deg[i]);
        if (i2 == band2.rows()) continue;
        for (std::size_t j = 0; j < band1.cols(); ++j) {
            const auto j2 = index_of(band2.phi_deg, band1.phi_deg[j]);
            if (j2 == band2.cols()) continue;
            if (!band1.measured(i, j) || !band2.measured(i2, j2)) continue;
            const double a = band1.at(i, j);
            const double b = band2.at(i2, j2);
            if (!std::isfinite(a) || !std::isfinite(b)) continue;
            out.push_back({band1.theta_deg[i], band1.phi_deg[j], b - a});
        }
    }
    if (out.empty()) throw InputError("the two grids share no measured cells");
    return out;
}

GaussianFit fit_gaussian(std::span<const double> samples) {
    if (samples.size() < 2) throw InputError("a Gaussian fit needs at least 2 samples");
    // Shifted accumulation: constant input yields exactly mu = c, sigma = 0.
    const double ref = samples.front();
    double sum = 0.0;
    for (const double x : samples) sum += x - ref;
    const double n = static_cast<double>(samples.size());
    const double mean_offset = sum / n;
    double ss = 0.0;
    for (const double x : samples) {
        const double d = (x - ref) - mean_offset;
        ss += d * d;
    }
    return {ref + mean_offset, std::sqrt(ss / n), samples.size()};
}

std::vector<ScaleRow> scale_table(const std::vector<DeltaRcsSample>& samples) {
    std::map<std::int64_t, std::vector<double>> by_theta;
    std::vector<double> all;
    for (const auto& s : samples) {
        by_theta[micro(s.theta_deg)].push_back(s.delta_db);
        all.push_back(s.delta_db);
    }
    std::vector<ScaleRow> rows;
    for (const auto& [t, values] : by_theta) {
        if (values.size() < 2) continue;
        const double theta = static_cast<double>(t) * 1e-6;
        char label[32];
        std::snprintf(label, sizeof label, "%g", theta);
        rows.push_back({label, theta, fit_gaussian(values)});
    }
    rows.push_back({"Overall", std::nullopt, fit_gaussian(all)});
    return rows;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw InputError("quantile of an empty set");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

Histogram histogram_fd(std::span<const double> samples) {
    if (samples.empty()) throw InputError("histogram of an empty set");
    const std::vector<double> v(samples.begin(), samples.end());
    const auto [mn_it, mx_it] = std::minmax_element(v.begin(), v.end());
    const double mn = *mn_it, mx = *mx_it;
    const double n = static_cast<double>(v.size());
    double width = 2.0 * (quantile(v, 0.75) - quantile(v, 0.25)) * std::cbrt(1.0 / n);
    if (!(width > 0.0)) width = mx > mn ? (mx - mn) / std::ceil(std::sqrt(n)) : 1.0;

    Histogram h;
    h.bin_width = width;
    h.lo = mx > mn ? mn : mn - width / 2.0;
    const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((mx - h.lo) / width)));
    h.counts.assign(bins, 0);
    for (const double x : v) {
        auto b = static_cast<std::size_t>(std::floor((x - h.lo) / width));
        h.counts[std::min(b, bins - 1)]++;
    }
    return h;
}

RangeProfile range_response(const SigmaSpectrum& spectrum, double d_target_m, const RangeResponseOptions& options) {
    const auto& grid = spectrum.grid;
    const double df = grid.step();
    const double offset = range_to_delay(d_target_m - spectrum.reference_distance_m);
    std::vector<Complex> shifted(spectrum.sqrt_sigma.size());
    for (std::size_t i = 0; i < shifted.size(); ++i) {
        shifted[i] = spectrum.sqrt_sigma[i] * std::polar(1.0, 2.0 * kPi * static_cast<double>(i) * df * offset);
    }
    const auto profile = to_time_domain(FrequencySweep(grid, std::move(shifted)), options.window, options.zero_pad);

    const std::size_t m = profile.size();
    const std::size_t half = (m - 1) / 2;
    const double dr = delay_to_range(profile.dt);
    RangeProfile out;
    out.range_m.reserve(2 * half + 1);
    out.magnitude.reserve(2 * half + 1);
    for (std::size_t i = 0; i < 2 * half + 1; ++i) {
        const auto k = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(half);
        const auto idx = static_cast<std::size_t>((k + static_cast<std::ptrdiff_t>(m)) % static_cast<std::ptrdiff_t>(m));
        out.range_m.push_back(static_cast<double>(k) * dr);
        out.magnitude.push_back(std::abs(profile.samples[idx]));
    }
    return out;
}

std::string_view to_string(AngularInterp i) noexcept { return i == AngularInterp::nearest ? "nearest" : "linear"; }

AngularInterp angular_interp_from_string(std::string_view s) {
    if (s == "nearest") return AngularInterp::nearest;
    if (s == "linear") return AngularInterp::linear;
    throw InputError("interpolation must be 'nearest' or 'linear'");
}

RangeAzimuthImage build_range_azimuth_image(std::vector<AzimuthProfile> profiles, AngularInterp interp,
                                            double step_deg, std::optional<std::vector<double>> phi_axis) {
    if (profiles.size() < 2) throw InputError("a range-azimuth image needs at least 2 azimuth profiles");
    std::sort(profiles.begin(), profiles.end(), [](const auto& a, const auto& b) { return a.phi_deg < b.phi_deg; });
    const auto& axis = profiles.front().profile.range_m;
    for (std::size_t p = 0; p < profiles.size(); ++p) {
        const auto& pr = profiles[p].profile;
        if (p > 0 && micro(profiles[p].phi_deg) == micro(profiles[p - 1].phi_deg)) {
            throw InputError("duplicate azimuth in range-azimuth image");
        }
        if (pr.range_m.size() != axis.size() || pr.magnitude.size() != axis.size()) {
            throw InputError("azimuth profiles have inconsistent range axes");
        }
        for (std::size_t r = 0; r < axis.size(); ++r) {
            if (std::abs(pr.range_m[r] - axis[r]) > 1e-12 * std::max(1.0, std::abs(axis[r]))) {
                throw InputError("azimuth profiles have inconsistent range axes");
            }
        }
    }

    std::vector<double> phis;
    if (phi_axis) {
        phis = *phi_axis;
        std::sort(phis.begin(), phis.end());
    } else {
        if (!(step_deg > 0.0)) throw InputError("azimuth step must be > 0");
        const double lo = profiles.front().phi_deg;
        const double hi = profiles.back().phi_deg;
        const auto n = static_cast<long long>(std::floor((hi - lo) / step_deg + 1e-9));
        std::set<std::int64_t> set;
        for (long long i = 0; i <= n; ++i) set.insert(micro(lo + static_cast<double>(i) * step_deg));
        for (const auto& p : profiles) set.insert(micro(p.phi_deg));
        for (const auto v : set) phis.push_back(static_cast<double>(v) * 1e-6);
    }

    RangeAzimuthImage img;
    img.range_axis_m = axis;
    img.phi_axis_deg = phis;
    img.interpolation_note = std::string(to_string(interp)) + " interpolation of magnitude between measured azimuths";
    for (const double phi : phis) {
        const auto it = std::find_if(profiles.begin(), profiles.end(),
                                     [&](const auto& p) { return micro(p.phi_deg) == micro(phi); });
        if (it != profiles.end()) {
            img.columns.push_back(it->profile.magnitude);
            img.measured.push_back(true);
            continue;
        }
        const auto hi = std::find_if(profiles.begin(), profiles.end(), [&](const auto& p) { return p.phi_deg > phi; });
        if (hi == profiles.begin() || hi == profiles.end()) {
            throw InputError("azimuth " + std::to_string(phi) + " lies outside the measured span");
        }
        const auto lo = hi - 1;
        const double u = (phi - lo->phi_deg) / (hi->phi_deg - lo->phi_deg);
        std::vector<double> col(axis.size());
        if (interp == AngularInterp::nearest) {
            col = u <= 0.5 ? lo->profile.magnitude : hi->profile.magnitude;
        } else {
            for (std::size_t r = 0; r < col.size(); ++r) {
                col[r] = (1.0 - u) * lo->profile.magnitude[r] + u * hi->profile.magnitude[r];
            }
        }
        img.columns.push_back(std::move(col));
        img.measured.push_back(false);
    }
    return img;
}

ContributorList top_contributors(const RangeAzimuthImage& image, std::size_t k) {
    if (k < 1) throw InputError("k must be >= 1");
    std::vector<Contributor> maxima;
    for (std::size_t j = 0; j < image.columns.size(); ++j) {
        if (!image.measured[j]) continue;
        const auto& col = image.columns[j];
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (!(col[r] > 0.0)) continue;  // empty bins contribute nothing
            const bool left = r == 0 || col[r] >= col[r - 1];
            const bool right = r + 1 == col.size() || col[r] >= col[r + 1];
            if (left && right) maxima.push_back({image.range_axis_m[r], image.phi_axis_deg[j], col[r]});
        }
    }
    std::sort(maxima.begin(), maxima.end(), [](const Contributor& a, const Contributor& b) {
        if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
        if (std::abs(a.range_m) != std::abs(b.range_m)) return std::abs(a.range_m) < std::abs(b.range_m);
        if (a.phi_deg != b.phi_deg) return a.phi_deg < b.phi_deg;
        return a.range_m < b.range_m;
    });
    ContributorList out;
    out.truncated = maxima.size() < k;
    if (maxima.size() > k) maxima.resize(k);
    out.points = std::move(maxima);
    return out;
}

}  // namespace rcs
