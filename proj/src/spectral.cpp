#include "rcs/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>

#include "rcs/constants.hpp"
#include "rcs/error.hpp"

namespace rcs {

namespace {

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

class FftPlan {
public:
    FftPlan(std::size_t n, int sign)
        : n_(n),
          in_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        if (!in_ || !out_) throw std::bad_alloc();
        std::lock_guard lock(planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_.get(), out_.get(), sign, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::vector<Complex> run(std::span<const Complex> x) {
        static_assert(sizeof(Complex) == sizeof(fftw_complex));
        std::memcpy(in_.get(), x.data(), sizeof(fftw_complex) * n_);
        fftw_execute(plan_);
        std::vector<Complex> y(n_);
        std::memcpy(static_cast<void*>(y.data()), out_.get(), sizeof(fftw_complex) * n_);
        return y;
    }

private:
    std::size_t n_;
    FftwBuffer in_;
    FftwBuffer out_;
    fftw_plan plan_ = nullptr;
};

std::vector<Complex> transform(std::span<const Complex> x, int sign) {
    if (x.empty()) return {};
    FftPlan plan(x.size(), sign);
    return plan.run(x);
}

}  // namespace

std::vector<Complex> dft_forward(std::span<const Complex> x) { return transform(x, FFTW_FORWARD); }
std::vector<Complex> dft_inverse(std::span<const Complex> x) { return transform(x, FFTW_BACKWARD); }

WindowSpec WindowSpec::tukey(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("tukey alpha must lie in [0, 1]");
    return {WindowKind::tukey, alpha};
}

WindowSpec default_analysis_window() { return WindowSpec::hann(); }
WindowSpec default_gate_taper() { return WindowSpec::tukey(0.25); }

std::string window_name(const WindowSpec& w) {
    switch (w.kind) {
        case WindowKind::rectangular: return "rectangular";
        case WindowKind::hann: return "hann";
        case WindowKind::tukey: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "tukey(%.6g)", w.alpha);
            return buf;
        }
    }
    return "unknown";
}

double window_value(const WindowSpec& w, double u) noexcept {
    if (u < 0.0 || u > 1.0) return 0.0;
    switch (w.kind) {
        case WindowKind::rectangular: return 1.0;
        case WindowKind::hann: return 0.5 - 0.5 * std::cos(2.0 * kPi * u);
        case WindowKind::tukey: {
            const double a = w.alpha;
            if (a <= 0.0) return 1.0;
            const double edge = std::min(u, 1.0 - u);
            if (edge >= a / 2.0) return 1.0;
            return 0.5 * (1.0 - std::cos(2.0 * kPi * edge / a));
        }
    }
    return 0.0;
}

std::vector<double> window_samples(const WindowSpec& w, std::size_t n) {
    std::vector<double> out(n, 1.0);
    if (n < 2) return out;
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) out[i] = window_value(w, static_cast<double>(i) / denom);
    return out;
}

double coherent_gain(const WindowSpec& w, std::size_t n) {
    const auto s = window_samples(w, n);
    if (s.empty()) return 1.0;
    return std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
}

TimeProfile to_time_domain(const FrequencySweep& sweep, const WindowSpec& window, int zero_pad) {
    if (zero_pad < 1 || zero_pad > 16) throw InputError("zero_pad factor must lie in [1, 16]");
    const auto samples = sweep.samples();
    require_finite(samples, "to_time_domain");

    const std::size_t n = samples.size();
    const std::size_t m = n * static_cast<std::size_t>(zero_pad);
    const auto w = window_samples(window, n);
    const double gain = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);

    std::vector<Complex> padded(m, Complex{});
    for (std::size_t i = 0; i < n; ++i) padded[i] = samples[i] * w[i];

    TimeProfile p;
    p.samples = dft_inverse(padded);
    const double scale = 1.0 / (static_cast<double>(n) * gain);
    for (auto& v : p.samples) v *= scale;
    p.dt = 1.0 / (static_cast<double>(m) * sweep.grid().step());
    p.t0 = 0.0;
    p.source_size = n;
    p.zero_pad = zero_pad;
    p.window = window;
    p.gain = gain;
    return p;
}

FrequencySweep to_frequency_domain(const TimeProfile& profile, const FrequencyGrid& grid,
                                   Scenario label) {
    if (profile.source_size != grid.size() ||
        profile.samples.size() != grid.size() * static_cast<std::size_t>(profile.zero_pad)) {
        throw InputError("time profile length " + std::to_string(profile.samples.size()) +
                         " does not match grid of " + std::to_string(grid.size()) + " samples");
    }
    auto spectrum = dft_forward(profile.samples);
    const double n = static_cast<double>(grid.size());
    const double scale = n * profile.gain / static_cast<double>(profile.samples.size());
    spectrum.resize(grid.size());
    for (auto& v : spectrum) v *= scale;
    return FrequencySweep(grid, std::move(spectrum), label);
}

FrequencySweep remove_window(const FrequencySweep& weighted, const WindowSpec& window,
                             double floor) {
    const auto w = window_samples(window, weighted.size());
    std::vector<Complex> out(weighted.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = w[i] > floor ? weighted[i] / w[i] : Complex{};
    }
    return FrequencySweep(weighted.grid(), std::move(out), weighted.label());
}

}  // namespace rcs
