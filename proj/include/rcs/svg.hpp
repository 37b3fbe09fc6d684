#pragma once

#include <span>
#include <string>

#include "rcs/analysis.hpp"

namespace rcs {

/// Heatmap of a grid: azimuth on x, elevation on y, colour in dBsm.
/// Mirrored cells are hatched so synthesized values stay visible.
std::string heatmap_svg(const RcsGrid& grid, const std::string& title);

/// Freedman-Diaconis histogram of the samples with the analytic Gaussian overlaid.
std::string histogram_svg(std::span<const double> samples, const GaussianFit& fit, const std::string& title);

/// Azimuth (x) against centred range (y), colour in dB of |sqrt(sigma)|.
std::string range_azimuth_svg(const RangeAzimuthImage& image, double max_range_m, const std::string& title);

/// Polar view: each column drawn along its azimuth, signed range as radius offset.
std::string polar_range_svg(const RangeAzimuthImage& image, double max_range_m, const std::string& title);

}  // namespace rcs
