#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rcs {

using Complex = std::complex<double>;

/// Uniform frequency grid. Sample i sits at f_start + i * step().
class FrequencyGrid {
public:
    /// Throws InputError unless f_stop > f_start > 0 and n_samples >= 2.
    FrequencyGrid(double f_start_hz, double f_stop_hz, std::size_t n_samples);

    double f_start() const noexcept { return f_start_; }
    double f_stop() const noexcept { return f_stop_; }
    std::size_t size() const noexcept { return n_; }
    double step() const noexcept { return (f_stop_ - f_start_) / static_cast<double>(n_ - 1); }
    double bandwidth() const noexcept { return f_stop_ - f_start_; }
    double center() const noexcept { return 0.5 * (f_start_ + f_stop_); }
    double frequency(std::size_t i) const noexcept {
        return f_start_ + static_cast<double>(i) * step();
    }
    std::vector<double> frequencies() const;

    /// Bitwise equality of the defining parameters.
    bool operator==(const FrequencyGrid&) const = default;
    /// Equality within a relative tolerance on both band edges.
    bool approx_equal(const FrequencyGrid& other, double rel_tol = 1e-9) const noexcept;

private:
    double f_start_;
    double f_stop_;
    std::size_t n_;
};

enum class Scenario { target, background, sphere, sphere_background };

std::string_view to_string(Scenario s) noexcept;
/// Throws InputError on an unknown name.
Scenario scenario_from_string(std::string_view name);

/// Complex S11 samples on a uniform grid. Immutable once constructed.
class FrequencySweep {
public:
    /// Validates length and finiteness; throws InputError otherwise.
    FrequencySweep(FrequencyGrid grid, std::vector<Complex> samples,
                   Scenario label = Scenario::target);

    const FrequencyGrid& grid() const noexcept { return grid_; }
    std::span<const Complex> samples() const noexcept { return samples_; }
    Scenario label() const noexcept { return label_; }
    std::size_t size() const noexcept { return samples_.size(); }
    const Complex& operator[](std::size_t i) const noexcept { return samples_[i]; }

    FrequencySweep with_label(Scenario label) const;
    double energy() const noexcept;

private:
    FrequencyGrid grid_;
    std::vector<Complex> samples_;
    Scenario label_;
};

/// The four sweeps one extraction needs. All must share a grid; the
/// pipeline checks this before doing any work.
struct MeasurementTriple {
    FrequencySweep target;
    FrequencySweep background;
    FrequencySweep sphere;
    FrequencySweep sphere_background;
};

/// Throws InputError when any sample has a NaN or Inf component. Shared by
/// the file parsers and the acquisition client.
void require_finite(std::span<const Complex> samples, std::string_view what);

}  // namespace rcs
