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

// fbsim command-line front end.
//
//   fbsim preset <name> [--seed N] [--trials N] [--out DIR]
//   fbsim run <config> [--key value ...]
//   fbsim list
//
// Exit codes: 0 success, 2 configuration error, 3 I/O error, 1 anything else.

#include "fbsim/fbsim.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <utility>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

/// "--key value" and "--key=value" pairs left over after CLI11 parsing.
std::vector<std::pair<std::string, std::string>> parse_overrides(const std::vector<std::string>& extras)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const auto& a = extras[i];
        if (a.rfind("--", 0) != 0 || a.size() < 3)
            throw fbsim::ConfigError("unexpected argument '" + a + "'; overrides look like --key value");
        const auto eq = a.find('=');
        if (eq != std::string::npos) {
            out.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
        } else {
            if (i + 1 >= extras.size())
                throw fbsim::ConfigError("override '" + a + "' has no value");
            out.emplace_back(a.substr(2), extras[++i]);
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fbsim: multi-user MIMO downlink simulator with limited feedback"};
    app.require_subcommand(1);

    std::string preset_name;
    std::uint64_t seed = 1;
    std::size_t trials = fbsim::kDefaultPresetTrials;
    std::string out_dir = ".";
    auto* preset = app.add_subcommand("preset", "Run a named experiment suite");
    preset->add_option("name", preset_name, "Preset name (see `fbsim list`)")->required();
    preset->add_option("--seed", seed, "Base random seed");
    preset->add_option("--trials", trials, "Monte Carlo trials per point")->check(CLI::PositiveNumber);
    preset->add_option("--out", out_dir, "Output directory");

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
    run->add_option("config", config_path, "Config file")->required();
    run->allow_extras();

    auto* list = app.add_subcommand("list", "List preset names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*list) {
            for (const auto& n : fbsim::preset_names())
                std::cout << n << '\n';
        } else if (*preset) {
            const auto files = fbsim::run_preset(preset_name, seed, trials, out_dir);
            std::cout << files.csv.string() << '\n' << files.svg.string() << '\n';
        } else if (*run) {
            const auto files = fbsim::run_config(config_path, parse_overrides(run->remaining()));
            std::cout << files.csv.string() << '\n' << files.svg.string() << '\n';
        }
    } catch (const fbsim::ConfigError& e) {
        std::cerr << "fbsim: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fbsim::IoError& e) {
        std::cerr << "fbsim: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "fbsim: error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
