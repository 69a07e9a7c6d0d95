// SPDX-License-Identifier: Apache-2.0
//
// fbsim: multi-user MIMO downlink simulator with limited channel feedback
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FBSIM_REPORT_HPP
#define FBSIM_REPORT_HPP

// CSV result tables and SVG line charts.

#include "fbsim/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

namespace fbsim {

struct ResultRow {
    std::string scheme;
    std::size_t nt = 0;
    double snr_db = 0.0;
    int tfb = 0;
    int b = 0;
    std::size_t users = 0;
    double mean_rate = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    std::optional<double> extra;

    bool operator==(const ResultRow&) const = default;
};

inline constexpr std::string_view kCsvHeader = "scheme,nt,snr_db,tfb,b,users,mean_rate,std_error,trials,extra";

/// Shortest representation that parses back to the same double.
inline std::string format_double(double v)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{})
        throw DomainError("format_double: conversion failed");
    return {buf.data(), ptr};
}

inline std::string format_csv(const std::vector<ResultRow>& rows)
{
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        if (r.scheme.find_first_of(",\n\"") != std::string::npos)
            throw DomainError("format_csv: scheme label must not contain ',', '\"' or newlines");
        out += r.scheme + ',' + std::to_string(r.nt) + ',' + format_double(r.snr_db) + ',' + std::to_string(r.tfb) +
               ',' + std::to_string(r.b) + ',' + std::to_string(r.users) + ',' + format_double(r.mean_rate) + ',' +
               format_double(r.std_error) + ',' + std::to_string(r.trials) + ',' +
               (r.extra ? format_double(*r.extra) : std::string{}) + '\n';
    }
    return out;
}

namespace detail {

template <class T>
T csv_field(std::string_view text, int line)
{
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw ConfigError("csv line " + std::to_string(line) + ": bad number '" + std::string(text) + "'");
    return value;
}

} // namespace detail

inline std::vector<ResultRow> parse_csv(std::string_view text)
{
    std::vector<ResultRow> rows;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        const auto nl = std::min(text.find('\n', pos), text.size());
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line_no == 1) {
            if (line != kCsvHeader)
                throw ConfigError("csv: unexpected header");
            continue;
        }
        std::vector<std::string_view> f;
        std::size_t p = 0;
        while (true) {
            const auto c = line.find(',', p);
            f.push_back(line.substr(p, c == std::string_view::npos ? std::string_view::npos : c - p));
            if (c == std::string_view::npos)
                break;
            p = c + 1;
        }
        if (f.size() != 10)
            throw ConfigError("csv line " + std::to_string(line_no) + ": expected 10 fields");
        ResultRow r;
        r.scheme = std::string(f[0]);
        r.nt = detail::csv_field<std::size_t>(f[1], line_no);
        r.snr_db = detail::csv_field<double>(f[2], line_no);
        r.tfb = detail::csv_field<int>(f[3], line_no);
        r.b = detail::csv_field<int>(f[4], line_no);
        r.users = detail::csv_field<std::size_t>(f[5], line_no);
        r.mean_rate = detail::csv_field<double>(f[6], line_no);
        r.std_error = detail::csv_field<double>(f[7], line_no);
        r.trials = detail::csv_field<std::size_t>(f[8], line_no);
        if (!f[9].empty())
            r.extra = detail::csv_field<double>(f[9], line_no);
        rows.push_back(std::move(r));
    }
    return rows;
}

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool dashed = false; ///< analytic overlays are drawn dashed
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

namespace detail {

inline std::string xml_escape(std::string_view s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string fixed(double v, int digits = 2)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
    return ec == std::errc{} ? std::string(buf.data(), ptr) : std::string("0");
}

/// 1, 2 or 5 times a power of ten, giving about `target` intervals over span.
inline double nice_step(double span, int target = 5)
{
    if (!(span > 0.0))
        return 1.0;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    return (frac < 1.5 ? 1.0 : frac < 3.5 ? 2.0 : frac < 7.5 ? 5.0 : 10.0) * mag;
}

inline std::string tick_label(double v, double step)
{
    const int digits = step >= 1.0 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
    return fixed(std::abs(v) < 1e-12 * step ? 0.0 : v, digits);
}

} // namespace detail

inline std::string render_svg(const Plot& plot)
{
    constexpr double width = 720, height = 460;
    constexpr double left = 70, right = 200, top = 40, bottom = 60;
    constexpr double pw = width - left - right, ph = height - top - bottom;
    static constexpr std::array<const char*, 8> palette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                        "#9467bd", "#8c564b", "#e377c2", "#17becf"};

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : plot.series)
        for (const auto& [x, y] : s.points)
            if (std::isfinite(x) && std::isfinite(y)) {
                x0 = std::min(x0, x), x1 = std::max(x1, x);
                y0 = std::min(y0, y), y1 = std::max(y1, y);
            }
    if (!std::isfinite(x0))
        x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    y0 = std::min(y0, 0.0);
    if (x1 <= x0)
        x1 = x0 + 1;
    if (y1 <= y0)
        y1 = y0 + 1;
    const double xs = detail::nice_step(x1 - x0), ys = detail::nice_step(y1 - y0);
    x0 = std::floor(x0 / xs) * xs, x1 = std::ceil(x1 / xs) * xs;
    y0 = std::floor(y0 / ys) * ys, y1 = std::ceil(y1 / ys) * ys;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return top + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
      << detail::xml_escape(plot.title) << "</text>\n";

    for (double t = x0; t <= x1 + 1e-9 * xs; t += xs) {
        const auto x = detail::fixed(px(t));
        o << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\"" << top + ph
          << "\" stroke=\"#e0e0e0\"/>\n";
        o << "<text x=\"" << x << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
          << detail::tick_label(t, xs) << "</text>\n";
    }
    for (double t = y0; t <= y1 + 1e-9 * ys; t += ys) {
        const auto y = detail::fixed(py(t));
        o << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw << "\" y2=\"" << y
          << "\" stroke=\"#e0e0e0\"/>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << y << "\" text-anchor=\"end\" dominant-baseline=\"middle\">"
          << detail::tick_label(t, ys) << "</text>\n";
    }
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 18 << "\" text-anchor=\"middle\">"
      << detail::xml_escape(plot.x_label) << "</text>\n";
    o << "<text transform=\"translate(20," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
      << detail::xml_escape(plot.y_label) << "</text>\n";

    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& s = plot.series[i];
        const char* color = palette[i % palette.size()];
        std::string pts;
        for (const auto& [x, y] : s.points)
            if (std::isfinite(x) && std::isfinite(y))
                pts += detail::fixed(px(x)) + ',' + detail::fixed(py(y)) + ' ';
        if (!pts.empty())
            pts.pop_back();
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\""
          << (s.dashed ? " stroke-dasharray=\"6,4\"" : "") << " points=\"" << pts << "\"/>\n";
        if (!s.dashed)
            for (const auto& [x, y] : s.points)
                if (std::isfinite(x) && std::isfinite(y))
                    o << "<circle cx=\"" << detail::fixed(px(x)) << "\" cy=\"" << detail::fixed(py(y))
                      << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
        const double ly = top + 10 + 18.0 * static_cast<double>(i);
        o << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
          << "/>\n";
        o << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly << "\" dominant-baseline=\"middle\" font-size=\"11\">"
          << detail::xml_escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Writes `content` to out_dir/file_name, creating out_dir if needed.
inline std::filesystem::path write_output_file(const std::filesystem::path& out_dir, const std::string& file_name,
                                               const std::string& content)
{
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw IoError("cannot create output directory '" + out_dir.string() + "'");
    const auto path = out_dir / file_name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open '" + path.string() + "' for writing");
    out << content;
    out.close();
    if (!out)
        throw IoError("failed writing '" + path.string() + "'");
    return path;
}

} // namespace fbsim

#endif
