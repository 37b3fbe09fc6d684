#pragma once

#include <string>
#include <vector>

#include "rcs/analysis.hpp"
#include "rcs/geometry.hpp"

namespace rcs {

/// Shortest text that round-trips the double ("%.17g"); NaN is written empty.
std::string format_double(double v);

/// Header "theta_deg\phi_deg,<phi...>", one row per elevation, dBsm values.
std::string grid_to_csv(const RcsGrid& grid);
/// Cells with values are marked measured; empty fields are missing.
RcsGrid grid_from_csv(const std::string& text, const std::string& band_label);
std::string grid_to_json(const RcsGrid& grid);

std::string delta_to_csv(const std::vector<DeltaRcsSample>& samples);
std::string scale_table_to_json(const std::vector<ScaleRow>& rows, const std::string& band1,
                                const std::string& band2);
std::string scale_table_to_csv(const std::vector<ScaleRow>& rows);
/// Fixed-width text table: one column per row label, mu and sigma lines.
std::string scale_table_to_text(const std::vector<ScaleRow>& rows);

/// Header "range_m,<phi...>", one row per range bin.
std::string range_image_to_csv(const RangeAzimuthImage& image);
std::string contributors_to_json(const ContributorList& list);

std::string plan_to_json(const PlacementPlan& plan);
std::string plan_to_text(const PlacementPlan& plan);

}  // namespace rcs
