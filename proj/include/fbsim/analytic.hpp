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

#ifndef FBSIM_ANALYTIC_HPP
#define FBSIM_ANALYTIC_HPP

// Closed-form sum-rate approximations and feedback-bit optimizers.
//
// Inner logarithms (multi-user diversity terms such as log(T_fb N_t / B)) are
// natural logs, they stand for E[max ||h||^2] ~ log(K N_t). Rate logs are base 2.

#include "fbsim/errors.hpp"
#include "fbsim/numerics.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

namespace fbsim::analytic {

struct AnalyticParams {
    double snr = 10.0; ///< linear
    double nt = 4.0;
    double tfb = 300.0;
    double b = 20.0;   ///< bits per user, continuous
    double phi = 0.0;  ///< extra interference from training error and delay
};

/// phi = 1 - r^2 + (1 + beta snr)^-1; the estimation term vanishes with perfect receiver CSI.
inline double training_delay_phi(double r, double beta, double snr, bool perfect_receiver_csi = false)
{
    const double est = perfect_receiver_csi ? 0.0 : 1.0 / (1.0 + beta * snr);
    return 1.0 - r * r + est;
}

/// Penalty N_t log2(1 + SNR 2^{-B/(N_t-1)}) of ZF with B-bit RVQ and no selection.
inline double zf_loss_bound(double snr, double nt, double b)
{
    if (b < 0.0)
        throw DomainError("zf_loss_bound: b must be >= 0");
    if (std::isinf(b))
        return 0.0;
    return nt * std::log2(1.0 + snr * std::exp2(-b / (nt - 1.0)));
}

namespace detail {

inline double diversity_log(double tfb, double nt, double b)
{
    const double users_times_nt = tfb * nt / b;
    if (!(users_times_nt > 1.0))
        throw DomainError("multi-user diversity term needs tfb * nt / b > 1");
    return std::log(users_times_nt);
}

inline double rvq_interference_factor(double nt, double b)
{
    return std::isinf(b) ? 0.0 : std::exp2(-b / (nt - 1.0));
}

} // namespace detail

/// ZF sum-rate approximation: every selected user has gain log(T_fb N_t / B),
/// n = N_t users, residual interference 2^{-B/(N_t-1)} of the signal. With
/// phi > 0 the denominator carries the training/delay term phi N_t/(N_t-1) SNR.
inline double zf_rate_approx(const AnalyticParams& p)
{
    const double l = detail::diversity_log(p.tfb, p.nt, p.b);
    const double signal = p.snr / p.nt * l;
    const double interference = signal * detail::rvq_interference_factor(p.nt, p.b);
    const double td = p.phi * p.nt / (p.nt - 1.0) * p.snr;
    return p.nt * std::log2(1.0 + signal / (1.0 + td + interference));
}

/// Crude interference-limited regime: rate ~ N_t B / (N_t - 1).
inline double zf_rate_linear_regime(double nt, double b)
{
    return nt * b / (nt - 1.0);
}

/// Imperfect-CSI penalty N_t log2(1 + (SNR/N_t) 2^{-B/(N_t-1)} log(T_fb N_t / B)).
inline double zf_penalty_approx(const AnalyticParams& p)
{
    const double l = detail::diversity_log(p.tfb, p.nt, p.b);
    return p.nt * std::log2(1.0 + p.snr / p.nt * detail::rvq_interference_factor(p.nt, p.b) * l);
}

/// Left side minus one of the stationarity condition of zf_rate_approx:
/// (SNR/N_t) 2^{-B/(N_t-1)} (B log 2 / (N_t-1)) log(T_fb N_t / B)^2 - 1.
inline double zf_bopt_residual(double snr, double nt, double tfb, double b)
{
    const double l = std::log(tfb * nt / b);
    return snr / nt * std::exp2(-b / (nt - 1.0)) * (b * std::numbers::ln2 / (nt - 1.0)) * l * l - 1.0;
}

struct BoptResult {
    double value = 0.0;
    bool at_boundary = false; ///< no sign change on [log2 nt, tfb/nt]; value is an endpoint
};

/// Continuous maximizer of zf_rate_approx by bisection on [log2 nt, tfb / nt].
inline BoptResult zf_bopt_fixed_point(double snr, double nt, double tfb)
{
    if (!(snr > 0.0))
        throw DomainError("zf_bopt_fixed_point: snr must be positive");
    double lo = std::log2(nt);
    double hi = tfb / nt;
    if (!(hi > lo))
        throw DomainError("zf_bopt_fixed_point: need tfb > nt log2(nt)");
    const double f_lo = zf_bopt_residual(snr, nt, tfb, lo);
    const double f_hi = zf_bopt_residual(snr, nt, tfb, hi);
    if (f_lo <= 0.0)
        return {lo, true};
    if (f_hi >= 0.0)
        return {hi, true};
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double f = zf_bopt_residual(snr, nt, tfb, mid);
        if (f == 0.0)
            return {mid, false};
        (f > 0.0 ? lo : hi) = mid;
    }
    return {0.5 * (lo + hi), false};
}

/// Same maximizer through the Lambert-W form
/// B = -(N_t-1)/log 2 * W_{-1}(-N_t / (SNR L)), L = log(T_fb N_t / B)^2,
/// iterated from B0 = (N_t-1) log2(SNR/N_t) until |dB| <= 1e-12.
inline double zf_bopt_lambert(double snr, double nt, double tfb)
{
    if (!(snr > 0.0))
        throw DomainError("zf_bopt_lambert: snr must be positive");
    double b = std::max((nt - 1.0) * std::log2(snr / nt), std::log2(nt));
    double prev_step = 0.0;
    double damping = 1.0;
    for (int iter = 0; iter < 500; ++iter) {
        const double l = std::log(tfb * nt / b);
        const double arg = -nt / (snr * l * l);
        if (!(l > 0.0) || arg < -1.0 / std::numbers::e)
            throw InfeasibleRegimeError("zf_bopt_lambert: Lambert-W argument below -1/e");
        const double next = -(nt - 1.0) / std::numbers::ln2 * lambert_w_m1(arg);
        double step = next - b;
        if (iter > 0 && step * prev_step < 0.0 && std::abs(step) > 0.5 * std::abs(prev_step))
            damping = 0.5;
        step *= damping;
        b += step;
        prev_step = step;
        if (std::abs(step) <= 1e-12 * std::max(1.0, b))
            return b;
    }
    return b;
}

/// Feasible integer bit counts for ZF: log2 nt <= b <= tfb/nt with tfb / b integral.
inline std::vector<int> integer_feasible_bits(double nt, int tfb)
{
    std::vector<int> out;
    const double lo = std::log2(nt);
    for (int b = 1; b <= tfb; ++b)
        if (b >= lo - 1e-12 && b <= tfb / nt + 1e-12 && tfb % b == 0)
            out.push_back(b);
    return out;
}

/// Integer projection of the continuous optimum: the better (under
/// zf_rate_approx) of the nearest feasible integers on either side.
inline int zf_bopt_integer(double snr, double nt, int tfb)
{
    const double cont = zf_bopt_fixed_point(snr, nt, tfb).value;
    const auto feasible = integer_feasible_bits(nt, tfb);
    if (feasible.empty())
        throw DomainError("zf_bopt_integer: no feasible integer bit count");
    std::optional<int> below;
    std::optional<int> above;
    for (int b : feasible) {
        if (b <= cont)
            below = b;
        else if (!above)
            above = b;
    }
    auto rate = [&](int b) { return zf_rate_approx({snr, nt, static_cast<double>(tfb), static_cast<double>(b), 0.0}); };
    if (!below)
        return *above;
    if (!above)
        return *below;
    return rate(*above) > rate(*below) ? *above : *below;
}

struct RbfBudget {
    double users = 0.0; ///< K needed by RBF to match optimized ZF
    double t_rbf = 0.0; ///< K log2(nt) feedback bits
};

/// Users/bits random beamforming needs to reach the per-user SINR of
/// optimized ZF with t_zf bits: K = (T N_t/B)(1 + (SNR/N_t) log(T N_t/B))^{N_t-1}.
inline RbfBudget rbf_matching_budget(double t_zf, double nt, double snr, double b_opt)
{
    if (!(b_opt > 0.0))
        throw DomainError("rbf_matching_budget: b_opt must be positive");
    const double ratio = t_zf * nt / b_opt;
    const double k = ratio * std::pow(1.0 + snr / nt * std::log(ratio), nt - 1.0);
    return {k, k * std::log2(nt)};
}

/// Single-user beamforming rate approximation
/// log2[1 + SNR(log(T N_t / B) - 2^{-B/(N_t-1)} log(T N_t))].
inline double subf_rate_approx(double snr, double nt, double tfb, double b)
{
    const double l = detail::diversity_log(tfb, nt, b);
    const double arg = 1.0 + snr * (l - detail::rvq_interference_factor(nt, b) * std::log(tfb * nt));
    if (!(arg > 0.0))
        throw DomainError("subf_rate_approx: rate argument is not positive");
    return std::log2(arg);
}

/// The form before dropping the unit mean of the non-maximized Gamma(1,1) term
/// and the 2^{-B/(N_t-1)} log B correction:
/// log2(1 + SNR(1 + (1 - 2^{-B/(N_t-1)}) log(T N_t / B))).
inline double subf_rate_approx_full(double snr, double nt, double tfb, double b)
{
    const double l = detail::diversity_log(tfb, nt, b);
    return std::log2(1.0 + snr * (1.0 + (1.0 - detail::rvq_interference_factor(nt, b)) * l));
}

/// Maximizer of subf_rate_approx, independent of SNR:
/// -(N_t-1)/log 2 * W_{-1}(-1 / log(T N_t)), clamped to [1, T].
inline double subf_bopt(double nt, double tfb)
{
    const double l = std::log(tfb * nt);
    if (!(l >= std::numbers::e))
        throw InfeasibleRegimeError("subf_bopt: log(tfb * nt) must be >= e");
    const double b = -(nt - 1.0) / std::numbers::ln2 * lambert_w_m1(-1.0 / l);
    return std::clamp(b, 1.0, tfb);
}

struct BoptScalingReport {
    double exact = 0.0;         ///< continuous maximizer of zf_rate_approx
    double snr_leading = 0.0;   ///< (N_t-1) log2(SNR/N_t), large-SNR leading term
    double nt_leading = 0.0;    ///< (N_t-1) log2(SNR), large-N_t leading term
    double tfb_leading = 0.0;   ///< 2 (N_t-1) log2(log(T N_t)), the log log T growth
    double expansion = 0.0;     ///< two-term W_{-1} expansion with L evaluated at `exact`
};

inline BoptScalingReport bopt_scaling_report(double snr, double nt, double tfb)
{
    BoptScalingReport r;
    r.exact = zf_bopt_fixed_point(snr, nt, tfb).value;
    r.snr_leading = (nt - 1.0) * std::log2(snr / nt);
    r.nt_leading = (nt - 1.0) * std::log2(snr);
    r.tfb_leading = 2.0 * (nt - 1.0) * std::log2(std::log(tfb * nt));
    const double l = std::pow(std::log(tfb * nt / r.exact), 2.0);
    r.expansion = r.snr_leading + (nt - 1.0) * std::log2(l) + (nt - 1.0) * std::log2(std::log(snr / nt * l));
    return r;
}

} // namespace fbsim::analytic

#endif
