#pragma once

#include <string>
#include <string_view>

#include "rcs/sweep.hpp"

namespace rcs {

enum class FileFormat { touchstone, csv };
enum class FrequencyUnit { hz, khz, mhz, ghz };
/// RI: real/imag; MA: linear magnitude/angle in degrees; DB: 20log10 magnitude/angle.
enum class DataFormat { ri, ma, db };

double unit_scale(FrequencyUnit u) noexcept;

/// Describes how a sweep file is laid out. For CSV the column names select
/// the frequency and the two value columns from the header row.
struct SweepFileHeader {
    FileFormat format = FileFormat::csv;
    FrequencyUnit frequency_unit = FrequencyUnit::hz;
    DataFormat data_format = DataFormat::ri;
    std::size_t n_points = 0;  // 0 means "take whatever the file holds"
    std::string freq_column = "freq_hz";
    std::string a_column = "s11_re";
    std::string b_column = "s11_im";
};

/// Parses a 1-port Touchstone v1 file. An option line is mandatory.
/// Errors are ParseError carrying the offending line number.
FrequencySweep parse_touchstone_s1p(std::string_view text, Scenario label = Scenario::target);

struct TouchstoneWriteOptions {
    FrequencyUnit unit = FrequencyUnit::hz;
    DataFormat format = DataFormat::ri;
    std::string comment;
};

std::string write_touchstone_s1p(const FrequencySweep& sweep,
                                 const TouchstoneWriteOptions& options = {});

FrequencySweep parse_csv_sweep(std::string_view text, const SweepFileHeader& header,
                               Scenario label = Scenario::target);

/// Writes a CSV with a header row using the column names in `header`.
std::string write_csv_sweep(const FrequencySweep& sweep, const SweepFileHeader& header = {});

/// Reads a sweep file, choosing the parser from the extension (.s1p or .csv).
FrequencySweep read_sweep_file(const std::string& path, Scenario label = Scenario::target,
                               const SweepFileHeader& csv_header = {});

std::string read_text_file(const std::string& path);
/// Writes via a sibling temporary file and rename, so readers never see a partial file.
void write_text_file_atomic(const std::string& path, std::string_view content);

}  // namespace rcs
