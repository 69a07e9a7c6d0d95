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

#ifndef FBSIM_CONFIG_HPP
#define FBSIM_CONFIG_HPP

// Experiment files: `key = value` lines grouped under [section] headers.
// Keys are global; sections only organize the file. '#' and ';' start comments.
//
//   [experiment]
//   scheme = zf
//   nt = 4
//   snr_db = 10
//   tfb = 300
//   b_values = 10:30:2, 36
//   [output]
//   name = zf_sweep

#include "fbsim/errors.hpp"
#include "fbsim/montecarlo.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fbsim {

struct RunConfig {
    ExperimentConfig experiment;
    std::string name = "run";
    std::string out_dir = ".";
    bool b_values_auto = true; ///< sweep every feasible b
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

class FieldError {
public:
    explicit FieldError(std::string msg) : message(std::move(msg)) {}
    std::string message;
};

template <class T>
T parse_number(std::string_view text)
{
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw FieldError("expected a number, got '" + std::string(text) + "'");
    return value;
}

template <class T>
T parse_positive(std::string_view text)
{
    const auto v = parse_number<long long>(text);
    if (v < 1)
        throw FieldError("expected a positive integer, got '" + std::string(text) + "'");
    return static_cast<T>(v);
}

inline bool parse_bool(std::string_view text)
{
    if (text == "true" || text == "yes" || text == "on" || text == "1")
        return true;
    if (text == "false" || text == "no" || text == "off" || text == "0")
        return false;
    throw FieldError("expected true/false, got '" + std::string(text) + "'");
}

/// "auto" or a comma list of integers and lo:hi[:step] ranges.
inline std::vector<int> parse_b_values(std::string_view text)
{
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        const auto item = trim(text.substr(pos, comma - pos));
        if (item.empty())
            throw FieldError("empty entry in b list");
        const auto c1 = item.find(':');
        if (c1 == std::string_view::npos) {
            out.push_back(parse_number<int>(item));
        } else {
            const auto rest = item.substr(c1 + 1);
            const auto c2 = rest.find(':');
            const int lo = parse_number<int>(trim(item.substr(0, c1)));
            const int hi = parse_number<int>(trim(rest.substr(0, c2)));
            const int step = c2 == std::string_view::npos ? 1 : parse_number<int>(trim(rest.substr(c2 + 1)));
            if (step < 1 || hi < lo)
                throw FieldError("bad range '" + std::string(item) + "'");
            for (int b = lo; b <= hi; b += step)
                out.push_back(b);
        }
        pos = comma + 1;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

template <class F>
auto wrap_enum(F&& parse, std::string_view text)
{
    try {
        return parse(text);
    } catch (const ConfigError& e) {
        throw FieldError(e.what());
    }
}

} // namespace detail

inline const std::set<std::string, std::less<>>& known_sections()
{
    static const std::set<std::string, std::less<>> s{"experiment", "channel", "feedback", "run", "output"};
    return s;
}

/// Applies one setting; `key` may use '-' or '_'. Throws detail::FieldError.
inline void apply_setting(RunConfig& rc, std::string key, std::string_view value)
{
    using namespace detail;
    std::replace(key.begin(), key.end(), '-', '_');
    auto& c = rc.experiment;
    if (key == "scheme")
        c.scheme = wrap_enum(parse_scheme, value);
    else if (key == "nt")
        c.nt = parse_positive<std::size_t>(value);
    else if (key == "snr_db")
        c.snr_db = parse_number<double>(value);
    else if (key == "tfb")
        c.tfb = parse_positive<int>(value);
    else if (key == "b" || key == "b_values") {
        rc.b_values_auto = value == "auto";
        c.b_values = rc.b_values_auto ? std::vector<int>{} : parse_b_values(value);
    } else if (key == "trials")
        c.trials = parse_positive<std::size_t>(value);
    else if (key == "seed")
        c.seed = parse_number<std::uint64_t>(value);
    else if (key == "quantizer")
        c.quantizer = wrap_enum(parse_quantizer_kind, value);
    else if (key == "cqi" || key == "cqi_kind")
        c.cqi_kind = wrap_enum(parse_cqi_kind, value);
    else if (key == "cqi_bits") {
        const int bits = value == "none" ? 0 : parse_number<int>(value);
        if (bits < 0)
            throw FieldError("expected a non-negative integer or 'none'");
        c.cqi_bits = bits > 0 ? std::optional<int>(bits) : std::nullopt;
    } else if (key == "perfect_receiver_csi")
        c.perfect_receiver_csi = parse_bool(value);
    else if (key == "beta") {
        c.beta = parse_number<double>(value);
        if (!(c.beta > 0.0))
            throw FieldError("beta must be positive");
        c.perfect_receiver_csi = false;
    } else if (key == "r") {
        c.r = parse_number<double>(value);
        if (!(c.r >= 0.0 && c.r <= 1.0))
            throw FieldError("r must lie in [0, 1]");
    } else if (key == "mmse_exact")
        c.mmse_exact = parse_bool(value);
    else if (key == "relaxed_users")
        c.relaxed_users = parse_bool(value);
    else if (key == "users")
        c.fixed_users = parse_positive<std::size_t>(value);
    else if (key == "threads")
        c.threads = parse_number<std::size_t>(value);
    else if (key == "name") {
        if (value.empty() || value.find_first_of("/\\ ") != std::string_view::npos)
            throw FieldError("name must be non-empty without spaces or slashes");
        rc.name = std::string(value);
    } else if (key == "out" || key == "out_dir")
        rc.out_dir = std::string(value);
    else
        throw FieldError("unknown key");
}

/// Parses config text; `origin` prefixes diagnostics ("file.conf:12: field 'nt': ...").
inline RunConfig parse_config(std::string_view text, const std::string& origin = "<config>")
{
    RunConfig rc;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto prefix = origin + ":" + std::to_string(line_no) + ": ";
        std::string_view line = raw;
        if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(prefix + "malformed section header");
            const auto section = detail::trim(line.substr(1, line.size() - 2));
            if (!known_sections().contains(section))
                throw ConfigError(prefix + "unknown section '" + std::string(section) + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(prefix + "expected key = value");
        const std::string key(detail::trim(line.substr(0, eq)));
        const auto value = detail::trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(prefix + "missing key");
        try {
            apply_setting(rc, key, value);
        } catch (const detail::FieldError& e) {
            throw ConfigError(prefix + "field '" + key + "': " + e.message);
        }
    }
    return rc;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    RunConfig rc = parse_config(buf.str(), path);
    if (rc.name == "run") {
        auto stem = path.substr(path.find_last_of("/\\") + 1);
        stem = stem.substr(0, stem.find('.'));
        if (!stem.empty())
            rc.name = stem;
    }
    return rc;
}

/// Command-line overrides, applied after the file.
inline void apply_overrides(RunConfig& rc, const std::vector<std::pair<std::string, std::string>>& overrides)
{
    for (const auto& [key, value] : overrides) {
        try {
            apply_setting(rc, key, value);
        } catch (const detail::FieldError& e) {
            throw ConfigError("override --" + key + ": " + e.message);
        }
    }
}

} // namespace fbsim

#endif
