#include "rcs/ingest.hpp"

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "rcs/constants.hpp"
#include "rcs/error.hpp"

namespace rcs {

namespace {

constexpr double kGridRelTol = 1e-6;

std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

std::vector<std::string_view> split_char(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool parse_number(std::string_view tok, double& out) {
    tok = trim(tok);
    if (tok.empty()) return false;
    if (tok.front() == '+') tok.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
    return ec == std::errc() && ptr == tok.data() + tok.size() && std::isfinite(out);
}

Complex to_complex(DataFormat fmt, double a, double b) {
    switch (fmt) {
        case DataFormat::ri: return {a, b};
        case DataFormat::ma: return std::polar(a, b * kPi / 180.0);
        case DataFormat::db: return std::polar(db_to_amplitude(a), b * kPi / 180.0);
    }
    return {};
}

struct Row {
    std::size_t line;
    double f;
    Complex s;
};

FrequencySweep build_sweep(const std::vector<Row>& rows, Scenario label) {
    if (rows.size() < 2) {
        throw ParseError(rows.empty() ? 0 : rows.front().line,
                         "a sweep needs at least 2 data rows");
    }
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].f > rows[i - 1].f)) {
            throw ParseError(rows[i].line, "frequencies are not strictly increasing");
        }
    }
    const double f0 = rows.front().f;
    const double f1 = rows.back().f;
    const double step = (f1 - f0) / static_cast<double>(rows.size() - 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double expected = f0 + static_cast<double>(i) * step;
        if (std::abs(rows[i].f - expected) > kGridRelTol * std::abs(expected)) {
            throw ParseError(rows[i].line, "non-uniform frequency grid");
        }
    }
    std::vector<Complex> samples;
    samples.reserve(rows.size());
    for (const auto& r : rows) samples.push_back(r.s);
    return FrequencySweep(FrequencyGrid(f0, f1, rows.size()), std::move(samples), label);
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        fn(line_no, line);
        if (end == text.size()) break;
        start = end + 1;
    }
}

const char* unit_token(FrequencyUnit u) {
    switch (u) {
        case FrequencyUnit::hz: return "HZ";
        case FrequencyUnit::khz: return "KHZ";
        case FrequencyUnit::mhz: return "MHZ";
        case FrequencyUnit::ghz: return "GHZ";
    }
    return "HZ";
}

const char* format_token(DataFormat f) {
    switch (f) {
        case DataFormat::ri: return "RI";
        case DataFormat::ma: return "MA";
        case DataFormat::db: return "DB";
    }
    return "RI";
}

std::pair<double, double> from_complex(DataFormat fmt, Complex s) {
    switch (fmt) {
        case DataFormat::ri: return {s.real(), s.imag()};
        case DataFormat::ma: return {std::abs(s), std::arg(s) * 180.0 / kPi};
        case DataFormat::db: return {amplitude_to_db(std::abs(s)), std::arg(s) * 180.0 / kPi};
    }
    return {};
}

}  // namespace

double unit_scale(FrequencyUnit u) noexcept {
    switch (u) {
        case FrequencyUnit::hz: return 1.0;
        case FrequencyUnit::khz: return 1e3;
        case FrequencyUnit::mhz: return 1e6;
        case FrequencyUnit::ghz: return 1e9;
    }
    return 1.0;
}

FrequencySweep parse_touchstone_s1p(std::string_view text, Scenario label) {
    bool have_options = false;
    double scale = 1e9;
    DataFormat fmt = DataFormat::ma;
    std::vector<Row> rows;

    for_each_line(text, [&](std::size_t line_no, std::string_view line) {
        if (const auto bang = line.find('!'); bang != std::string_view::npos) {
            line = line.substr(0, bang);
        }
        line = trim(line);
        if (line.empty()) return;

        if (line.front() == '#') {
            if (have_options) throw ParseError(line_no, "duplicate option line");
            if (!rows.empty()) throw ParseError(line_no, "option line after data");
            have_options = true;
            const auto toks = split_ws(line.substr(1));
            for (std::size_t i = 0; i < toks.size(); ++i) {
                const auto t = lower(toks[i]);
                if (t == "hz") scale = 1.0;
                else if (t == "khz") scale = 1e3;
                else if (t == "mhz") scale = 1e6;
                else if (t == "ghz") scale = 1e9;
                else if (t == "s") continue;
                else if (t == "y" || t == "z" || t == "h" || t == "g")
                    throw ParseError(line_no, "only S parameters are supported");
                else if (t == "ri") fmt = DataFormat::ri;
                else if (t == "ma") fmt = DataFormat::ma;
                else if (t == "db") fmt = DataFormat::db;
                else if (t == "r") {
                    double r = 0.0;
                    if (i + 1 >= toks.size() || !parse_number(toks[i + 1], r) || r <= 0.0) {
                        throw ParseError(line_no, "invalid reference impedance");
                    }
                    ++i;
                } else {
                    throw ParseError(line_no, "unknown option token '" + std::string(toks[i]) + "'");
                }
            }
            return;
        }
        if (line.front() == '[') {
            throw ParseError(line_no, "Touchstone v2 keywords are not supported");
        }
        if (!have_options) throw ParseError(line_no, "missing option line before data");

        const auto toks = split_ws(line);
        if (toks.size() != 3) {
            throw ParseError(line_no, "expected 3 values for a 1-port row, found " +
                                          std::to_string(toks.size()));
        }
        double f = 0.0, a = 0.0, b = 0.0;
        for (int k = 0; k < 3; ++k) {
            double& dst = k == 0 ? f : (k == 1 ? a : b);
            if (!parse_number(toks[k], dst)) {
                throw ParseError(line_no, "unparseable value '" + std::string(toks[k]) + "'");
            }
        }
        rows.push_back({line_no, f * scale, to_complex(fmt, a, b)});
    });

    if (!have_options) throw ParseError(0, "missing option line");
    return build_sweep(rows, label);
}

std::string write_touchstone_s1p(const FrequencySweep& sweep, const TouchstoneWriteOptions& options) {
    std::string out;
    out.reserve(64 * (sweep.size() + 4));
    if (!options.comment.empty()) {
        std::istringstream is(options.comment);
        for (std::string l; std::getline(is, l);) out += "! " + l + "\n";
    }
    out += "# ";
    out += unit_token(options.unit);
    out += " S ";
    out += format_token(options.format);
    out += " R 50\n";
    const double scale = unit_scale(options.unit);
    char buf[96];
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const auto [a, b] = from_complex(options.format, sweep[i]);
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", sweep.grid().frequency(i) / scale, a, b);
        out += buf;
    }
    return out;
}

FrequencySweep parse_csv_sweep(std::string_view text, const SweepFileHeader& header, Scenario label) {
    bool have_header = false;
    std::size_t ncols = 0, fi = 0, ai = 0, bi = 0;
    std::vector<Row> rows;
    const double scale = unit_scale(header.frequency_unit);

    for_each_line(text, [&](std::size_t line_no, std::string_view raw) {
        const auto line = trim(raw);
        if (line.empty() || line.front() == '#') return;
        const auto cols = split_char(line, ',');
        if (!have_header) {
            auto find = [&](const std::string& name) {
                for (std::size_t i = 0; i < cols.size(); ++i) {
                    if (cols[i] == name) return i;
                }
                throw ParseError(line_no, "header lacks declared column '" + name + "'");
            };
            fi = find(header.freq_column);
            ai = find(header.a_column);
            bi = find(header.b_column);
            ncols = cols.size();
            have_header = true;
            return;
        }
        if (cols.size() != ncols) {
            throw ParseError(line_no, "row has " + std::to_string(cols.size()) +
                                          " fields, header declares " + std::to_string(ncols));
        }
        double f = 0.0, a = 0.0, b = 0.0;
        if (!parse_number(cols[fi], f) || !parse_number(cols[ai], a) || !parse_number(cols[bi], b)) {
            throw ParseError(line_no, "unparseable numeric field");
        }
        rows.push_back({line_no, f * scale, to_complex(header.data_format, a, b)});
    });

    if (!have_header) throw ParseError(0, "missing CSV header row");
    if (header.n_points != 0 && rows.size() != header.n_points) {
        throw ParseError(0, "header declares " + std::to_string(header.n_points) +
                                " points, file has " + std::to_string(rows.size()));
    }
    return build_sweep(rows, label);
}

std::string write_csv_sweep(const FrequencySweep& sweep, const SweepFileHeader& header) {
    std::string out = header.freq_column + "," + header.a_column + "," + header.b_column + "\n";
    const double scale = unit_scale(header.frequency_unit);
    char buf[96];
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const auto [a, b] = from_complex(header.data_format, sweep[i]);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", sweep.grid().frequency(i) / scale, a, b);
        out += buf;
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure on '" + path + "'");
    return ss.str();
}

void write_text_file_atomic(const std::string& path, std::string_view content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
        if (ec) throw IoError("cannot create directory for '" + path + "': " + ec.message());
    }
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("write failure on '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("cannot rename into '" + path + "'");
    }
}

FrequencySweep read_sweep_file(const std::string& path, Scenario label, const SweepFileHeader& csv_header) {
    const auto text = read_text_file(path);
    const auto ext = lower(std::filesystem::path(path).extension().string());
    try {
        if (ext == ".csv") return parse_csv_sweep(text, csv_header, label);
        return parse_touchstone_s1p(text, label);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.message(), path);
    }
}

}  // namespace rcs
