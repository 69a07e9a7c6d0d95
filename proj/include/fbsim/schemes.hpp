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

#ifndef FBSIM_SCHEMES_HPP
#define FBSIM_SCHEMES_HPP

#include "fbsim/channel.hpp"
#include "fbsim/errors.hpp"
#include "fbsim/numerics.hpp"
#include "fbsim/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fbsim {

enum class CqiKind {
    norm2,         ///< ||h||^2
    expected_sinr, ///< ||h||^2 cos^2 / (nt/snr + ||h||^2 sin^2)
    rbf_sinr,      ///< per-beam SINR with all nt beams active
    subf_snr,      ///< snr ||h||^2 cos^2, post-beamforming SNR
};

inline std::string_view to_string(CqiKind kind)
{
    switch (kind) {
    case CqiKind::norm2: return "norm2";
    case CqiKind::expected_sinr: return "expected_sinr";
    case CqiKind::rbf_sinr: return "rbf_sinr";
    case CqiKind::subf_snr: return "subf_snr";
    }
    return "unknown";
}

inline CqiKind parse_cqi_kind(std::string_view s)
{
    if (s == "norm2" || s == "norm")
        return CqiKind::norm2;
    if (s == "expected_sinr" || s == "sinr")
        return CqiKind::expected_sinr;
    if (s == "rbf_sinr")
        return CqiKind::rbf_sinr;
    if (s == "subf_snr")
        return CqiKind::subf_snr;
    throw ConfigError("unknown cqi kind '" + std::string(s) + "'");
}

enum class Selection { greedy, simplified };

struct FeedbackReport {
    std::size_t user_id = 0;
    DirectionQuantization quant;
    double cqi = 0.0;
    CqiKind cqi_kind = CqiKind::norm2;
};

struct TransmissionPlan {
    std::vector<std::size_t> selected;
    std::vector<ComplexVector> beamformers; ///< aligned with `selected`
    double power_per_user = 0.0;
    double estimated_sum_rate = 0.0; ///< rate the scheduler believed it would get
};

struct BlockOutcome {
    TransmissionPlan plan;
    std::vector<double> realized_rates; ///< aligned with plan.selected
    double sum_rate = 0.0;
};

/// SINR of a ZF-served user with equal power snr/n on each of n streams.
inline double zf_realized_sinr(const ComplexVector& h_true, const ComplexVector& own_bf,
                               std::span<const ComplexVector> other_bfs, double snr, std::size_t n)
{
    if (n < 1)
        throw DomainError("zf_realized_sinr: n must be >= 1");
    const double s = snr / static_cast<double>(n);
    double interference = 0.0;
    for (const auto& v : other_bfs)
        interference += inner_power(h_true, v);
    return s * inner_power(h_true, own_bf) / (1.0 + s * interference);
}

namespace detail {

/// Channel gain the scheduler attributes to a report. For expected-SINR CQI
/// the value is read as a full-load SINR (power snr/nt), so cqi*nt/snr plays
/// the role of ||h||^2.
inline double effective_gain(const FeedbackReport& r, double snr, std::size_t nt)
{
    if (r.cqi_kind == CqiKind::expected_sinr)
        return r.cqi * static_cast<double>(nt) / snr;
    return r.cqi;
}

struct ZfEvaluation {
    double rate = 0.0;
    std::vector<ComplexVector> directions;
};

/// Estimated ZF sum rate of a candidate set, treating sqrt(g_k) * hhat_k as
/// the true channels. ZF nulls those exactly, so there is no interference term.
inline std::optional<ZfEvaluation> evaluate_zf_set(std::span<const FeedbackReport> reports,
                                                   std::span<const std::size_t> members, double snr,
                                                   std::size_t nt)
{
    std::vector<ComplexVector> dirs;
    dirs.reserve(members.size());
    for (auto m : members)
        dirs.push_back(reports[m].quant.direction);
    ZfEvaluation out;
    try {
        out.directions = zf_directions(dirs);
    } catch (const SingularSetError&) {
        return std::nullopt;
    }
    const double s = snr / static_cast<double>(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& r = reports[members[i]];
        const double gain = effective_gain(r, snr, nt) * inner_power(r.quant.direction, out.directions[i]);
        out.rate += std::log2(1.0 + s * gain);
    }
    return out;
}

inline TransmissionPlan make_zf_plan(std::span<const FeedbackReport> reports,
                                     std::span<const std::size_t> members, ZfEvaluation eval, double snr)
{
    TransmissionPlan plan;
    for (auto m : members)
        plan.selected.push_back(reports[m].user_id);
    plan.beamformers = std::move(eval.directions);
    plan.power_per_user = snr / static_cast<double>(members.size());
    plan.estimated_sum_rate = eval.rate;
    return plan;
}

inline std::size_t argmax_cqi(std::span<const FeedbackReport> reports)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < reports.size(); ++i)
        if (reports[i].cqi > reports[best].cqi)
            best = i;
    return best;
}

} // namespace detail

/// Greedy ZF user selection: seed with the largest CQI, then repeatedly add
/// the candidate giving the largest estimated sum rate while it strictly
/// increases, up to nt users.
inline TransmissionPlan zf_greedy_select(std::span<const FeedbackReport> reports, double snr, std::size_t nt)
{
    if (reports.empty())
        throw ConfigError("zf_greedy_select: no feedback reports");

    std::vector<std::size_t> members{detail::argmax_cqi(reports)};
    auto current = detail::evaluate_zf_set(reports, members, snr, nt);
    if (!current)
        throw SingularSetError("zf_greedy_select: seed user has a degenerate direction");

    std::vector<char> taken(reports.size(), 0);
    taken[members.front()] = 1;
    std::vector<std::size_t> trial;
    while (members.size() < nt) {
        std::optional<detail::ZfEvaluation> best;
        std::size_t best_idx = 0;
        for (std::size_t c = 0; c < reports.size(); ++c) {
            if (taken[c])
                continue;
            trial = members;
            trial.push_back(c);
            auto eval = detail::evaluate_zf_set(reports, trial, snr, nt);
            if (eval && (!best || eval->rate > best->rate)) {
                best = std::move(eval);
                best_idx = c;
            }
        }
        if (!best || !(best->rate > current->rate))
            break;
        members.push_back(best_idx);
        taken[best_idx] = 1;
        current = std::move(best);
    }
    return detail::make_zf_plan(reports, members, std::move(*current), snr);
}

/// Low-complexity selection: try the top-j users by CQI for j = 1..nt and keep
/// the j with the largest estimated sum rate.
inline TransmissionPlan zf_simplified_select(std::span<const FeedbackReport> reports, double snr,
                                             std::size_t nt)
{
    if (reports.empty())
        throw ConfigError("zf_simplified_select: no feedback reports");

    std::vector<std::size_t> order(reports.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return reports[a].cqi > reports[b].cqi; });

    std::optional<detail::ZfEvaluation> best;
    std::size_t best_j = 0;
    const std::size_t jmax = std::min(nt, reports.size());
    for (std::size_t j = 1; j <= jmax; ++j) {
        auto eval = detail::evaluate_zf_set(reports, std::span(order).first(j), snr, nt);
        if (eval && (!best || eval->rate > best->rate)) {
            best = std::move(eval);
            best_j = j;
        }
    }
    if (!best)
        throw SingularSetError("zf_simplified_select: every candidate set is singular");
    return detail::make_zf_plan(reports, std::span(order).first(best_j), std::move(*best), snr);
}

/// Realized rates of a ZF plan over the transmission channels h^+.
inline BlockOutcome realize_zf(const ChannelRealization& realization, TransmissionPlan plan, double snr)
{
    BlockOutcome out;
    const std::size_t n = plan.selected.size();
    std::vector<ComplexVector> others;
    for (std::size_t i = 0; i < n; ++i) {
        others.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                others.push_back(plan.beamformers[j]);
        const auto& h = realization.delayed_channels[plan.selected[i]];
        const double sinr = zf_realized_sinr(h, plan.beamformers[i], others, snr, n);
        out.realized_rates.push_back(std::log2(1.0 + sinr));
        out.sum_rate += out.realized_rates.back();
    }
    out.plan = std::move(plan);
    return out;
}

namespace detail {

inline double maybe_quantize_cqi(double cqi, const CqiQuantizerSpec* cqi_quantizer)
{
    return cqi_quantizer ? quantize_cqi(cqi, *cqi_quantizer) : cqi;
}

} // namespace detail

/// One ZF block: users quantize the direction of their channel estimate and
/// report a CQI computed from it; the scheduler selects on the reports and the
/// realized rate is evaluated on the transmission channels.
inline BlockOutcome zf_block(const ChannelRealization& realization, const QuantizerSpec& quantizer,
                             CqiKind cqi_kind, double snr, Selection selection, RngStream& rng,
                             const CqiQuantizerSpec* cqi_quantizer = nullptr)
{
    if (cqi_kind != CqiKind::norm2 && cqi_kind != CqiKind::expected_sinr)
        throw ConfigError("zf_block: CQI must be norm2 or expected_sinr");
    const std::size_t nt = quantizer.nt;
    std::vector<FeedbackReport> reports;
    reports.reserve(realization.num_users());
    for (std::size_t k = 0; k < realization.num_users(); ++k) {
        const ComplexVector& est = realization.estimates[k];
        FeedbackReport r{k, quantize_direction(est, quantizer, rng), 0.0, cqi_kind};
        const double g = est.squaredNorm();
        if (cqi_kind == CqiKind::norm2) {
            r.cqi = g;
        } else {
            const double s2 = r.quant.sin2_error;
            r.cqi = g * (1.0 - s2) / (static_cast<double>(nt) / snr + g * s2);
        }
        r.cqi = detail::maybe_quantize_cqi(r.cqi, cqi_quantizer);
        reports.push_back(std::move(r));
    }
    TransmissionPlan plan = selection == Selection::greedy ? zf_greedy_select(reports, snr, nt)
                                                           : zf_simplified_select(reports, snr, nt);
    return realize_zf(realization, std::move(plan), snr);
}

namespace detail {

/// Per-beam SINR with all beams of the set active at power snr/nt each.
inline double orthoset_sinr(const ComplexVector& h, const OrthonormalSet& set, Eigen::Index beam, double snr)
{
    const double s = snr / static_cast<double>(set.size());
    const Eigen::VectorXd powers = (set.basis.adjoint() * h).cwiseAbs2();
    const double interference = powers.sum() - powers[beam];
    return s * powers[beam] / (1.0 + s * interference);
}

} // namespace detail

/// PU2RC scheduling over a common codebook of orthonormal sets. Each user
/// reports its best (set, beam) and the SINR on that beam; per set the BS keeps
/// the best user per beam and transmits on the set with the largest sum rate.
/// All nt beams of the chosen set radiate snr/nt, occupied or not.
inline BlockOutcome orthoset_block(const ChannelRealization& realization,
                                   const std::vector<OrthonormalSet>& codebook, double snr)
{
    if (realization.num_users() == 0)
        throw ConfigError("orthoset_block: no users");
    const Eigen::Index nt = codebook.front().size();

    struct BeamWinner {
        double sinr = -1.0;
        std::size_t user = 0;
    };
    std::map<std::size_t, std::vector<BeamWinner>> per_set;
    for (std::size_t k = 0; k < realization.num_users(); ++k) {
        const ComplexVector& est = realization.estimates[k];
        const DirectionQuantization q = quantize_to_orthosets(est, codebook);
        const double sinr =
            detail::orthoset_sinr(est, codebook[q.set_index], static_cast<Eigen::Index>(q.beam_index), snr);
        auto& beams = per_set[q.set_index];
        if (beams.empty())
            beams.resize(static_cast<std::size_t>(nt));
        if (sinr > beams[q.beam_index].sinr)
            beams[q.beam_index] = {sinr, k};
    }

    std::size_t best_set = 0;
    double best_score = -1.0;
    for (const auto& [set, beams] : per_set) {
        double score = 0.0;
        for (const auto& b : beams)
            if (b.sinr >= 0.0)
                score += std::log2(1.0 + b.sinr);
        if (score > best_score) {
            best_score = score;
            best_set = set;
        }
    }

    BlockOutcome out;
    out.plan.power_per_user = snr / static_cast<double>(nt);
    out.plan.estimated_sum_rate = best_score;
    const auto& beams = per_set.at(best_set);
    const OrthonormalSet& set = codebook[best_set];
    for (Eigen::Index m = 0; m < nt; ++m) {
        const auto& w = beams[static_cast<std::size_t>(m)];
        if (w.sinr < 0.0)
            continue;
        out.plan.selected.push_back(w.user);
        out.plan.beamformers.push_back(set.beam(m));
        const double sinr = detail::orthoset_sinr(realization.delayed_channels[w.user], set, m, snr);
        out.realized_rates.push_back(std::log2(1.0 + sinr));
        out.sum_rate += out.realized_rates.back();
    }
    return out;
}

/// Random beamforming: one Haar orthonormal set per block.
inline BlockOutcome rbf_block(const ChannelRealization& realization, double snr, std::size_t nt, RngStream& rng)
{
    const std::vector<OrthonormalSet> codebook{haar_orthonormal_set(rng, static_cast<Eigen::Index>(nt))};
    return orthoset_block(realization, codebook, snr);
}

inline BlockOutcome pu2rc_block(const ChannelRealization& realization, int bits, double snr, std::size_t nt,
                                RngStream& rng)
{
    const auto codebook = build_orthosets_codebook(bits, nt, rng);
    return orthoset_block(realization, codebook, snr);
}

/// Single-user beamforming to the user reporting the largest snr ||h||^2 cos^2.
inline BlockOutcome subf_block(const ChannelRealization& realization, const QuantizerSpec& quantizer,
                               double snr, RngStream& rng, const CqiQuantizerSpec* cqi_quantizer = nullptr)
{
    if (realization.num_users() == 0)
        throw ConfigError("subf_block: no users");
    std::vector<FeedbackReport> reports;
    reports.reserve(realization.num_users());
    for (std::size_t k = 0; k < realization.num_users(); ++k) {
        const ComplexVector& est = realization.estimates[k];
        FeedbackReport r{k, quantize_direction(est, quantizer, rng), 0.0, CqiKind::subf_snr};
        r.cqi = detail::maybe_quantize_cqi(snr * est.squaredNorm() * (1.0 - r.quant.sin2_error), cqi_quantizer);
        reports.push_back(std::move(r));
    }
    const std::size_t best = detail::argmax_cqi(reports);

    BlockOutcome out;
    out.plan.selected = {best};
    out.plan.beamformers = {reports[best].quant.direction};
    out.plan.power_per_user = snr;
    out.plan.estimated_sum_rate = std::log2(1.0 + reports[best].cqi);
    const double gain = inner_power(realization.delayed_channels[best], reports[best].quant.direction);
    out.realized_rates = {std::log2(1.0 + snr * gain)};
    out.sum_rate = out.realized_rates.front();
    return out;
}

} // namespace fbsim

#endif
