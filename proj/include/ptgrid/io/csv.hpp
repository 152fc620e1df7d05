#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptgrid/types.hpp"

namespace ptgrid::io {

/// Which CSV header columns hold coordinates, responses and (optionally)
/// the sample id. Rows with the same sample id form one sample, in order of
/// first appearance.
struct CsvSchema {
    std::vector<std::string> coords{"x", "y"};
    std::vector<std::string> channels;
    std::optional<std::string> sample_column;
};

/// Per-axis affine rescale into [-1,1]. `ranges` empty means "use the data's
/// own bounding box".
struct RescaleSpec {
    std::vector<AxisRange> ranges;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

inline double parse_double(std::string_view s, std::size_t line_no, std::string_view column) {
    double v = 0.0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw FormatError(FormatErrc::schema, "line " + std::to_string(line_no) + ", column '" + std::string(column) +
                                                  "': cannot parse '" + std::string(s) + "' as a number");
    }
    return v;
}

} // namespace detail

/// Maps coordinates affinely so that [lo, hi] lands on [-1, 1] per axis and
/// records the map. With no explicit ranges the cloud's bounding box is used.
inline void rescale_to_unit(PointCloudBatch& cloud, const RescaleSpec& spec = {}) {
    const auto d = static_cast<std::size_t>(cloud.dim);
    std::vector<AxisRange> ranges = spec.ranges;
    if (ranges.empty()) {
        ranges.assign(d, {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
        for (const auto& s : cloud.samples) {
            for (std::size_t i = 0; i < s.coords.size(); ++i) {
                ranges[i % d].lo = std::min(ranges[i % d].lo, s.coords[i]);
                ranges[i % d].hi = std::max(ranges[i % d].hi, s.coords[i]);
            }
        }
    }
    if (ranges.size() != d) throw ValidationError("rescale needs one range per axis");
    for (const auto& r : ranges) {
        if (!(r.hi > r.lo)) throw ValidationError("rescale range must satisfy hi > lo");
    }
    for (auto& s : cloud.samples) {
        for (std::size_t i = 0; i < s.coords.size(); ++i) {
            const auto& r = ranges[i % d];
            const double t = (s.coords[i] - r.lo) / (r.hi - r.lo) * 2.0 - 1.0;
            // Endpoints map exactly; only round-off beyond them is clamped.
            s.coords[i] = std::abs(t) <= 1.0 + 1e-12 ? std::clamp(t, -1.0, 1.0) : t;
        }
    }
    cloud.rescale = ranges;
    cloud.raw_range = false;
    validate(cloud);
}

inline PointCloudBatch import_csv_text(std::string_view text, const CsvSchema& schema,
                                       const std::optional<RescaleSpec>& rescale = std::nullopt) {
    if (schema.coords.size() != 2 && schema.coords.size() != 3) {
        throw ValidationError("CSV schema needs 2 or 3 coordinate columns");
    }
    std::size_t pos = 0, line_no = 0;
    const auto next_line = [&](std::string_view& line) {
        while (pos < text.size()) {
            const auto nl = text.find('\n', pos);
            line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() : nl + 1;
            ++line_no;
            if (!detail::trim(line).empty()) return true;
        }
        return false;
    };

    std::string_view header;
    if (!next_line(header)) throw FormatError(FormatErrc::schema, "CSV is empty");
    const auto names = detail::split_csv(header);
    const auto column = [&](const std::string& name) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw FormatError(FormatErrc::schema, "CSV has no column '" + name + "'");
        return static_cast<std::size_t>(it - names.begin());
    };
    std::vector<std::size_t> coord_cols, chan_cols;
    for (const auto& n : schema.coords) coord_cols.push_back(column(n));
    for (const auto& n : schema.channels) chan_cols.push_back(column(n));
    const std::optional<std::size_t> sample_col =
        schema.sample_column ? std::optional(column(*schema.sample_column)) : std::nullopt;

    PointCloudBatch cloud;
    cloud.dim = static_cast<int>(coord_cols.size());
    cloud.channels = chan_cols.size();
    std::map<std::string, std::size_t> sample_of;
    std::string_view line;
    while (next_line(line)) {
        const auto cells = detail::split_csv(line);
        if (cells.size() != names.size()) {
            throw FormatError(FormatErrc::schema, "line " + std::to_string(line_no) + ": expected " +
                                                      std::to_string(names.size()) + " fields, got " +
                                                      std::to_string(cells.size()));
        }
        std::size_t m = 0;
        if (sample_col) {
            const std::string key(cells[*sample_col]);
            const auto [it, inserted] = sample_of.emplace(key, sample_of.size());
            m = it->second;
        }
        if (m >= cloud.samples.size()) cloud.samples.resize(m + 1);
        auto& s = cloud.samples[m];
        for (std::size_t i = 0; i < coord_cols.size(); ++i) {
            s.coords.push_back(detail::parse_double(cells[coord_cols[i]], line_no, schema.coords[i]));
        }
        for (std::size_t i = 0; i < chan_cols.size(); ++i) {
            s.channels.push_back(detail::parse_double(cells[chan_cols[i]], line_no, schema.channels[i]));
        }
    }
    if (cloud.samples.empty()) throw FormatError(FormatErrc::schema, "CSV has a header but no rows");

    if (rescale) {
        rescale_to_unit(cloud, *rescale);
    } else {
        const bool in_range = std::all_of(cloud.samples.begin(), cloud.samples.end(), [](const PointSample& s) {
            return std::all_of(s.coords.begin(), s.coords.end(), [](double v) { return v >= -1.0 && v <= 1.0; });
        });
        cloud.raw_range = !in_range;
        validate(cloud, in_range);
    }
    return cloud;
}

inline PointCloudBatch import_csv(const std::filesystem::path& path, const CsvSchema& schema,
                                  const std::optional<RescaleSpec>& rescale = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw FormatError(FormatErrc::io, "cannot open " + path.string());
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return import_csv_text(text, schema, rescale);
}

} // namespace ptgrid::io
