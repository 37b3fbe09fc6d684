#include "rcs/sweep.hpp"

#include <cmath>
#include <string>

#include "rcs/error.hpp"

namespace rcs {

FrequencyGrid::FrequencyGrid(double f_start_hz, double f_stop_hz, std::size_t n_samples)
    : f_start_(f_start_hz), f_stop_(f_stop_hz), n_(n_samples) {
    if (!(std::isfinite(f_start_) && std::isfinite(f_stop_)) || !(f_start_ > 0.0) ||
        !(f_stop_ > f_start_)) {
        throw InputError("frequency grid requires f_stop > f_start > 0");
    }
    if (n_ < 2) throw InputError("frequency grid requires at least 2 samples");
}

std::vector<double> FrequencyGrid::frequencies() const {
    std::vector<double> f(n_);
    for (std::size_t i = 0; i < n_; ++i) f[i] = frequency(i);
    return f;
}

bool FrequencyGrid::approx_equal(const FrequencyGrid& other, double rel_tol) const noexcept {
    if (n_ != other.n_) return false;
    auto close = [rel_tol](double a, double b) {
        return std::abs(a - b) <= rel_tol * std::max(std::abs(a), std::abs(b));
    };
    return close(f_start_, other.f_start_) && close(f_stop_, other.f_stop_);
}

std::string_view to_string(Scenario s) noexcept {
    switch (s) {
        case Scenario::target: return "target";
        case Scenario::background: return "background";
        case Scenario::sphere: return "sphere";
        case Scenario::sphere_background: return "sphere_background";
    }
    return "unknown";
}

Scenario scenario_from_string(std::string_view name) {
    if (name == "target") return Scenario::target;
    if (name == "background") return Scenario::background;
    if (name == "sphere") return Scenario::sphere;
    if (name == "sphere_background") return Scenario::sphere_background;
    throw InputError("unknown scenario '" + std::string(name) + "'");
}

void require_finite(std::span<const Complex> samples, std::string_view what) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].real()) || !std::isfinite(samples[i].imag())) {
            throw InputError(std::string(what) + ": non-finite sample at index " +
                             std::to_string(i));
        }
    }
}

FrequencySweep::FrequencySweep(FrequencyGrid grid, std::vector<Complex> samples, Scenario label)
    : grid_(grid), samples_(std::move(samples)), label_(label) {
    if (samples_.size() != grid_.size()) {
        throw InputError("sweep has " + std::to_string(samples_.size()) +
                         " samples but grid declares " + std::to_string(grid_.size()));
    }
    require_finite(samples_, "sweep");
}

FrequencySweep FrequencySweep::with_label(Scenario label) const {
    FrequencySweep copy = *this;
    copy.label_ = label;
    return copy;
}

double FrequencySweep::energy() const noexcept {
    double e = 0.0;
    for (const auto& s : samples_) e += std::norm(s);
    return e;
}

}  // namespace rcs
