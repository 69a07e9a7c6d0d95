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

#ifndef FBSIM_PRESETS_HPP
#define FBSIM_PRESETS_HPP

// Named experiment suites and the free-form config runner. Every run writes
// <name>.csv and <name>.svg.

#include "fbsim/analytic.hpp"
#include "fbsim/config.hpp"
#include "fbsim/montecarlo.hpp"
#include "fbsim/report.hpp"

#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fbsim {

struct PresetContext {
    std::uint64_t seed = 1;
    std::size_t trials = 2000;
    std::size_t threads = 0;
};

struct RunOutput {
    std::vector<ResultRow> rows;
    Plot plot;
};

struct WrittenFiles {
    std::filesystem::path csv;
    std::filesystem::path svg;
};

inline constexpr std::size_t kDefaultPresetTrials = 2000;

namespace presets {

inline ExperimentConfig base(const PresetContext& ctx, Scheme scheme, std::size_t nt, double snr_db, int tfb)
{
    ExperimentConfig c;
    c.scheme = scheme;
    c.nt = nt;
    c.snr_db = snr_db;
    c.tfb = tfb;
    c.trials = ctx.trials;
    c.seed = ctx.seed;
    c.threads = ctx.threads;
    return c;
}

inline ResultRow make_row(const ExperimentConfig& c, const RateEstimate& e, std::string label,
                          std::optional<double> extra = std::nullopt)
{
    return {std::move(label), c.nt, c.snr_db, c.tfb, e.b, e.users, e.mean, e.std_error, e.trials, extra};
}

/// Values lo, lo+step, ... <= hi that the configuration admits.
inline std::vector<int> grid(const ExperimentConfig& c, int lo, int hi, int step = 1)
{
    const auto feasible = feasible_b_values(c);
    std::vector<int> out;
    for (int b : feasible)
        if (b >= lo && b <= hi && (b - lo) % step == 0)
            out.push_back(b);
    if (out.empty())
        throw ConfigError("preset grid [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] is empty; feasible values: " + join_ints(feasible));
    return out;
}

inline std::optional<double> safe(const std::function<double()>& f)
{
    try {
        const double v = f();
        return std::isfinite(v) ? std::optional<double>(v) : std::nullopt;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

inline std::optional<double> zf_overlay(const ExperimentConfig& c, int b)
{
    if (c.quantizer != QuantizerKind::rvq_statistical && c.quantizer != QuantizerKind::rvq_explicit)
        return std::nullopt;
    // nominal users tfb / (b + cqi) expressed through an effective budget
    const double tfb_eff = static_cast<double>(c.tfb) * b / bits_per_user(c, b);
    const double phi = (c.perfect_receiver_csi && c.r == 1.0)
                           ? 0.0
                           : analytic::training_delay_phi(c.r, c.beta, c.snr(), c.perfect_receiver_csi);
    return safe([&] {
        return analytic::zf_rate_approx({c.snr(), static_cast<double>(c.nt), tfb_eff, static_cast<double>(b), phi});
    });
}

inline std::optional<double> subf_overlay(const ExperimentConfig& c, int b)
{
    const double tfb_eff = static_cast<double>(c.tfb) * b / bits_per_user(c, b);
    return safe([&] { return analytic::subf_rate_approx(c.snr(), static_cast<double>(c.nt), tfb_eff, b); });
}

inline std::string db_label(double snr_db)
{
    return format_double(snr_db) + " dB";
}

inline std::string setting(const ExperimentConfig& c)
{
    return "Nt=" + std::to_string(c.nt) + ", " + db_label(c.snr_db) + ", Tfb=" + std::to_string(c.tfb);
}

/// Sweep with measured and (optionally) analytic series appended to `out`.
inline void sweep_into(RunOutput& out, const ExperimentConfig& c, const std::string& scheme_label,
                       const std::string& series_label,
                       const std::function<std::optional<double>(const ExperimentConfig&, int)>& overlay = {})
{
    Series measured{series_label, {}, false};
    Series approx{series_label + " (approx.)", {}, true};
    for (const auto& e : sweep_b(c)) {
        const auto extra = overlay ? overlay(c, e.b) : std::nullopt;
        out.rows.push_back(make_row(c, e, scheme_label, extra));
        measured.points.emplace_back(e.b, e.mean);
        if (extra)
            approx.points.emplace_back(e.b, *extra);
    }
    out.plot.series.push_back(std::move(measured));
    if (!approx.points.empty())
        out.plot.series.push_back(std::move(approx));
}

inline constexpr const char* kRateAxis = "Sum rate [bps/Hz]";
inline constexpr const char* kBitsAxis = "Feedback bits per user B [bits]";

inline double zf_center(const ExperimentConfig& c)
{
    return analytic::zf_bopt_fixed_point(c.snr(), static_cast<double>(c.nt), c.tfb).value;
}

/// Empirical ZF optimum over relaxed b in round(center) +- half_width.
inline EmpiricalBopt zf_optimum(ExperimentConfig c, int half_width = 6)
{
    c.relaxed_users = true;
    const int mid = static_cast<int>(std::lround(zf_center(c)));
    c.b_values = grid(c, mid - half_width, mid + half_width);
    return find_bopt_empirical(c);
}

inline EmpiricalBopt pu2rc_optimum(ExperimentConfig c, int extra_bits = 4)
{
    c.relaxed_users = true;
    const int lo = static_cast<int>(std::lround(std::log2(static_cast<double>(c.nt))));
    c.b_values = grid(c, lo, lo + extra_bits);
    return find_bopt_empirical(c);
}

inline RunOutput tab_intro_example(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"ZF with a 100-bit feedback budget (Nt=4, 10 dB)", kBitsAxis, kRateAxis, {}};
    auto c = base(ctx, Scheme::zf_greedy, 4, 10.0, 100);
    c.b_values = {4, 10, 20};
    sweep_into(out, c, "zf_greedy", setting(c), zf_overlay);
    return out;
}

inline RunOutput fig2_zf_sweep(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"Sum rate vs. feedback load, zero-forcing", kBitsAxis, kRateAxis, {}};
    struct Case {
        std::size_t nt;
        double snr_db;
        int tfb;
    };
    for (const Case k : {Case{4, 10, 300}, Case{4, 5, 300}, Case{4, 10, 100}, Case{2, 10, 100}, Case{2, 5, 100}}) {
        auto c = base(ctx, Scheme::zf_greedy, k.nt, k.snr_db, k.tfb);
        c.relaxed_users = true;
        c.b_values = k.nt == 4 ? grid(c, 4, std::min(40, k.tfb / 4), 2) : grid(c, 2, 24, 2);
        sweep_into(out, c, "zf_greedy", setting(c), zf_overlay);
    }
    return out;
}

inline RunOutput fig3_penalty(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"ZF with quantized vs. perfect CSI (Nt=4, 10 dB, Tfb=300)", kBitsAxis, kRateAxis, {}};
    auto c = base(ctx, Scheme::zf_greedy, 4, 10.0, 300);
    c.relaxed_users = true;
    c.b_values = grid(c, 4, 40, 2);

    Series quantized{"quantized CSI", {}, false}, perfect{"perfect CSI, same users", {}, false};
    Series approx{"perfect CSI minus penalty (approx.)", {}, true};
    const auto q = sweep_b(c);
    for (std::size_t i = 0; i < q.size(); ++i) {
        auto p_cfg = c;
        p_cfg.quantizer = QuantizerKind::perfect;
        p_cfg.fixed_users = q[i].users;
        const auto p = run_point(p_cfg, q[i].b, static_cast<std::uint64_t>(i) * c.trials);
        const auto penalty = safe([&] {
            return analytic::zf_penalty_approx({c.snr(), 4.0, static_cast<double>(c.tfb), static_cast<double>(q[i].b), 0.0});
        });
        const auto extra = penalty ? std::optional<double>(p.mean - *penalty) : std::nullopt;
        out.rows.push_back(make_row(c, q[i], "zf_greedy", extra));
        out.rows.push_back(make_row(c, p, "zf_greedy_perfect_csi"));
        quantized.points.emplace_back(q[i].b, q[i].mean);
        perfect.points.emplace_back(q[i].b, p.mean);
        if (extra)
            approx.points.emplace_back(q[i].b, *extra);
    }
    out.plot.series = {quantized, perfect, approx};
    return out;
}

/// Empirical optimum over the integer-user grid next to the rounded analytic optimum.
inline void bopt_point(RunOutput& out, Series& empirical, Series& analytic_series, const ExperimentConfig& c0, double x)
{
    auto c = c0;
    const double cont = zf_center(c);
    const int mid = static_cast<int>(std::lround(cont));
    c.b_values = grid(c, mid - 8, mid + 8);
    const auto best = find_bopt_empirical(c);
    const int rounded = analytic::zf_bopt_integer(c.snr(), static_cast<double>(c.nt), c.tfb);
    out.rows.push_back(make_row(c, best.estimate, "zf_greedy_bopt", static_cast<double>(rounded)));
    empirical.points.emplace_back(x, best.b);
    analytic_series.points.emplace_back(x, rounded);
}

inline RunOutput fig4_bopt_vs_tfb(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"Optimal feedback bits vs. feedback budget (10 dB)", "Total feedback budget Tfb [bits]",
                "Optimal bits per user B [bits]", {}};
    for (std::size_t nt : {2u, 4u}) {
        Series emp{"Nt=" + std::to_string(nt) + " simulated", {}, false};
        Series ana{"Nt=" + std::to_string(nt) + " approx.", {}, true};
        for (int tfb : {120, 240, 360, 600, 840})
            bopt_point(out, emp, ana, base(ctx, Scheme::zf_greedy, nt, 10.0, tfb), tfb);
        out.plot.series.push_back(std::move(emp));
        out.plot.series.push_back(std::move(ana));
    }
    return out;
}

inline RunOutput fig5_bopt_vs_snr(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"Optimal feedback bits vs. SNR (Tfb=360)", "SNR [dB]", "Optimal bits per user B [bits]", {}};
    for (std::size_t nt : {2u, 4u}) {
        Series emp{"Nt=" + std::to_string(nt) + " simulated", {}, false};
        Series ana{"Nt=" + std::to_string(nt) + " approx.", {}, true};
        for (double snr_db : {0.0, 5.0, 10.0, 15.0, 20.0})
            bopt_point(out, emp, ana, base(ctx, Scheme::zf_greedy, nt, snr_db, 360), snr_db);
        out.plot.series.push_back(std::move(emp));
        out.plot.series.push_back(std::move(ana));
    }
    return out;
}

inline RunOutput fig6_pu2rc_sweep(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"Sum rate vs. B for PU2RC (Nt=4, 10 dB)", kBitsAxis, kRateAxis, {}};
    for (int tfb : {100, 300, 500}) {
        auto c = base(ctx, Scheme::pu2rc, 4, 10.0, tfb);
        c.relaxed_users = true;
        c.b_values = grid(c, 2, 10);
        sweep_into(out, c, "pu2rc", "Tfb=" + std::to_string(tfb));
    }
    return out;
}

inline RunOutput fig7_zf_vs_pu2rc(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"ZF vs. PU2RC with optimized B", "SNR [dB]", kRateAxis, {}};
    for (int tfb : {100, 300})
        for (std::size_t nt : {2u, 4u}) {
            const std::string tail = ", Nt=" + std::to_string(nt) + ", Tfb=" + std::to_string(tfb);
            Series zf{"ZF" + tail, {}, false}, pu{"PU2RC" + tail, {}, false};
            for (double snr_db : {0.0, 5.0, 10.0, 15.0, 20.0}) {
                const auto cz = base(ctx, Scheme::zf_greedy, nt, snr_db, tfb);
                const auto z = zf_optimum(cz);
                out.rows.push_back(make_row(cz, z.estimate, "zf_greedy_opt"));
                zf.points.emplace_back(snr_db, z.estimate.mean);
                const auto cp = base(ctx, Scheme::pu2rc, nt, snr_db, tfb);
                const auto p = pu2rc_optimum(cp);
                out.rows.push_back(make_row(cp, p.estimate, "pu2rc_opt"));
                pu.points.emplace_back(snr_db, p.estimate.mean);
            }
            out.plot.series.push_back(std::move(zf));
            out.plot.series.push_back(std::move(pu));
        }
    return out;
}

inline RunOutput fig8_vs_nt(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"Sum rate vs. Nt with optimized B (10 dB, Tfb=500)", "Transmit antennas Nt", kRateAxis, {}};
    Series zf{"ZF", {}, false}, pu{"PU2RC", {}, false};
    for (std::size_t nt : {2u, 3u, 4u, 5u, 6u, 8u}) {
        const auto cz = base(ctx, Scheme::zf_greedy, nt, 10.0, 500);
        const auto z = zf_optimum(cz);
        out.rows.push_back(make_row(cz, z.estimate, "zf_greedy_opt"));
        zf.points.emplace_back(static_cast<double>(nt), z.estimate.mean);
        if ((nt & (nt - 1)) == 0) {
            const auto cp = base(ctx, Scheme::pu2rc, nt, 10.0, 500);
            const auto p = pu2rc_optimum(cp);
            out.rows.push_back(make_row(cp, p.estimate, "pu2rc_opt"));
            pu.points.emplace_back(static_cast<double>(nt), p.estimate.mean);
        }
    }
    out.plot.series = {zf, pu};
    return out;
}

inline RunOutput fig9_selection_cqi(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"User selection and CQI type (Nt=4, 10 dB, Tfb=300)", kBitsAxis, kRateAxis, {}};
    auto greedy = base(ctx, Scheme::zf_greedy, 4, 10.0, 300);
    greedy.relaxed_users = true;
    greedy.b_values = grid(greedy, 4, 40, 2);
    sweep_into(out, greedy, "zf_greedy", "greedy, norm CQI");
    auto sinr = greedy;
    sinr.cqi_kind = CqiKind::expected_sinr;
    sweep_into(out, sinr, "zf_greedy_sinr_cqi", "greedy, SINR CQI");
    auto simple = greedy;
    simple.scheme = Scheme::zf_simplified;
    sweep_into(out, simple, "zf_simplified", "simplified, norm CQI");
    return out;
}

inline RunOutput fig10_quantizers(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"ZF with different quantizers (10 dB)", kBitsAxis, kRateAxis, {}};
    auto c4 = base(ctx, Scheme::zf_greedy, 4, 10.0, 300);
    c4.relaxed_users = true;
    c4.b_values = grid(c4, 4, 40, 2);
    for (auto kind : {QuantizerKind::rvq_statistical, QuantizerKind::scalar, QuantizerKind::idealized}) {
        auto c = c4;
        c.quantizer = kind;
        sweep_into(out, c, "zf_greedy_" + std::string(to_string(kind)),
                   std::string(to_string(kind)) + ", Nt=4, Tfb=300");
    }
    auto c2 = base(ctx, Scheme::zf_greedy, 2, 10.0, 100);
    c2.relaxed_users = true;
    c2.b_values = grid(c2, 2, 24, 2);
    for (auto kind : {QuantizerKind::rvq_statistical, QuantizerKind::scalar}) {
        auto c = c2;
        c.quantizer = kind;
        sweep_into(out, c, "zf_greedy_" + std::string(to_string(kind)),
                   std::string(to_string(kind)) + ", Nt=2, Tfb=100");
    }
    return out;
}

inline RunOutput fig11_subf(const PresetContext& ctx)
{
    RunOutput out;
    out.plot = {"Single-user beamforming vs. feedback load (Nt=4)", kBitsAxis, kRateAxis, {}};
    for (int tfb : {70, 300})
        for (double snr_db : {0.0, 5.0}) {
            auto c = base(ctx, Scheme::subf, 4, snr_db, tfb);
            c.relaxed_users = true;
            c.b_values = grid(c, 1, 30);
            sweep_into(out, c, "subf", db_label(snr_db) + ", Tfb=" + std::to_string(tfb), subf_overlay);
        }
    return out;
}

} // namespace presets

using PresetFn = RunOutput (*)(const PresetContext&);

inline const std::map<std::string, PresetFn, std::less<>>& preset_registry()
{
    static const std::map<std::string, PresetFn, std::less<>> r{
        {"fig2_zf_sweep", presets::fig2_zf_sweep},
        {"fig3_penalty", presets::fig3_penalty},
        {"fig4_bopt_vs_tfb", presets::fig4_bopt_vs_tfb},
        {"fig5_bopt_vs_snr", presets::fig5_bopt_vs_snr},
        {"fig6_pu2rc_sweep", presets::fig6_pu2rc_sweep},
        {"fig7_zf_vs_pu2rc", presets::fig7_zf_vs_pu2rc},
        {"fig8_vs_nt", presets::fig8_vs_nt},
        {"fig9_selection_cqi", presets::fig9_selection_cqi},
        {"fig10_quantizers", presets::fig10_quantizers},
        {"fig11_subf", presets::fig11_subf},
        {"tab_intro_example", presets::tab_intro_example},
    };
    return r;
}

inline std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const auto& [name, fn] : preset_registry())
        names.push_back(name);
    return names;
}

inline RunOutput compute_preset(std::string_view name, const PresetContext& ctx)
{
    const auto& reg = preset_registry();
    const auto it = reg.find(name);
    if (it == reg.end()) {
        std::string all;
        for (const auto& n : preset_names())
            all += (all.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + std::string(name) + "'; available: " + all);
    }
    if (ctx.trials < 1)
        throw ConfigError("trials must be >= 1");
    return it->second(ctx);
}

inline WrittenFiles write_outputs(const RunOutput& out, const std::filesystem::path& out_dir, const std::string& name)
{
    WrittenFiles files;
    files.csv = write_output_file(out_dir, name + ".csv", format_csv(out.rows));
    files.svg = write_output_file(out_dir, name + ".svg", render_svg(out.plot));
    return files;
}

inline WrittenFiles run_preset(std::string_view name, std::uint64_t seed, std::size_t trials,
                               const std::filesystem::path& out_dir, std::size_t threads = 0)
{
    const auto out = compute_preset(name, {seed, trials, threads});
    return write_outputs(out, out_dir, std::string(name));
}

/// Sweeps rc.experiment over its b grid (every feasible b when unset).
inline RunOutput compute_config(const RunConfig& rc)
{
    ExperimentConfig c = rc.experiment;
    if (rc.b_values_auto)
        c.b_values = feasible_b_values(c);
    if (c.b_values.empty())
        throw ConfigError("no feasible b for " + std::string(to_string(c.scheme)) + " with tfb=" +
                          std::to_string(c.tfb));
    for (int b : c.b_values)
        users_for(c, b);

    RunOutput out;
    out.plot = {rc.name, presets::kBitsAxis, presets::kRateAxis, {}};
    std::function<std::optional<double>(const ExperimentConfig&, int)> overlay;
    if (is_zf(c.scheme))
        overlay = presets::zf_overlay;
    else if (c.scheme == Scheme::subf)
        overlay = presets::subf_overlay;
    presets::sweep_into(out, c, std::string(to_string(c.scheme)), presets::setting(c), overlay);
    return out;
}

inline WrittenFiles run_config(const std::string& path,
                               const std::vector<std::pair<std::string, std::string>>& overrides = {})
{
    RunConfig rc = load_config(path);
    apply_overrides(rc, overrides);
    return write_outputs(compute_config(rc), rc.out_dir, rc.name);
}

} // namespace fbsim

#endif
