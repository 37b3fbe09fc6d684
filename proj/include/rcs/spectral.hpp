#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rcs/sweep.hpp"

namespace rcs {

enum class WindowKind { rectangular, hann, tukey };

/// Spectral taper. Tukey with alpha = 0 is rectangular, alpha = 1 is Hann.
struct WindowSpec {
    WindowKind kind = WindowKind::rectangular;
    double alpha = 0.0;  // only meaningful for tukey

    static WindowSpec rectangular() { return {WindowKind::rectangular, 0.0}; }
    static WindowSpec hann() { return {WindowKind::hann, 1.0}; }
    /// Throws InputError unless alpha is in [0, 1].
    static WindowSpec tukey(double alpha);

    bool operator==(const WindowSpec&) const = default;
};

/// Default frequency weighting applied before the inverse transform when
/// gating or forming range responses.
WindowSpec default_analysis_window();
/// Default shape of the time gate itself.
WindowSpec default_gate_taper();
inline constexpr int kDefaultZeroPad = 4;

std::string window_name(const WindowSpec& w);

/// Symmetric window of length n, evaluated at u = i / (n - 1).
std::vector<double> window_samples(const WindowSpec& w, std::size_t n);
/// Window value at normalized position u in [0, 1]; zero outside.
double window_value(const WindowSpec& w, double u) noexcept;
/// Mean of window_samples(w, n); always > 0 for n >= 2.
double coherent_gain(const WindowSpec& w, std::size_t n);

/// Delay-domain view of a sweep: samples[k] is the response at t0 + k * dt
/// (two-way delay). Carries what is needed to invert the transform.
struct TimeProfile {
    double dt = 0.0;
    double t0 = 0.0;
    std::vector<Complex> samples;
    std::size_t source_size = 0;  // frequency samples before zero padding
    int zero_pad = 1;
    WindowSpec window;
    double gain = 1.0;  // coherent gain the amplitudes were divided by

    std::size_t size() const noexcept { return samples.size(); }
    /// Unambiguous delay span, 1 / frequency step.
    double period() const noexcept { return dt * static_cast<double>(samples.size()); }
    double time(std::size_t k) const noexcept { return t0 + dt * static_cast<double>(k); }
};

/// Window-weighted inverse DFT, zero padded to zero_pad * N points.
/// Amplitudes are scaled by 1 / (N * coherent_gain) so an in-band unit tone
/// keeps unit peak. dt = 1 / (zero_pad * N * step).
TimeProfile to_time_domain(const FrequencySweep& sweep, const WindowSpec& window,
                           int zero_pad = 1);

/// Inverse of to_time_domain. Returns the window-weighted spectrum, which is
/// the original sweep exactly when the window is rectangular.
FrequencySweep to_frequency_domain(const TimeProfile& profile, const FrequencyGrid& grid,
                                   Scenario label = Scenario::target);

/// Divides the window back out where it exceeds `floor`; bins below it are zeroed.
FrequencySweep remove_window(const FrequencySweep& weighted, const WindowSpec& window,
                             double floor = 1e-12);

/// Unnormalized in-place style transforms on arbitrary lengths (FFTW backed).
/// forward: X[k] = sum x[n] exp(-j 2 pi k n / M); inverse uses +j and no scaling.
std::vector<Complex> dft_forward(std::span<const Complex> x);
std::vector<Complex> dft_inverse(std::span<const Complex> x);

}  // namespace rcs
