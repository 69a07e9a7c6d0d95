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

#ifndef FBSIM_MONTECARLO_HPP
#define FBSIM_MONTECARLO_HPP

#include "fbsim/channel.hpp"
#include "fbsim/errors.hpp"
#include "fbsim/numerics.hpp"
#include "fbsim/quantization.hpp"
#include "fbsim/schemes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace fbsim {

enum class Scheme { zf_greedy, zf_simplified, rbf, pu2rc, subf };

inline std::string_view to_string(Scheme s)
{
    switch (s) {
    case Scheme::zf_greedy: return "zf_greedy";
    case Scheme::zf_simplified: return "zf_simplified";
    case Scheme::rbf: return "rbf";
    case Scheme::pu2rc: return "pu2rc";
    case Scheme::subf: return "subf";
    }
    return "unknown";
}

inline Scheme parse_scheme(std::string_view s)
{
    if (s == "zf" || s == "zf_greedy")
        return Scheme::zf_greedy;
    if (s == "zf_simplified")
        return Scheme::zf_simplified;
    if (s == "rbf")
        return Scheme::rbf;
    if (s == "pu2rc")
        return Scheme::pu2rc;
    if (s == "subf")
        return Scheme::subf;
    throw ConfigError("unknown scheme '" + std::string(s) + "'");
}

inline bool is_zf(Scheme s) { return s == Scheme::zf_greedy || s == Scheme::zf_simplified; }

struct ExperimentConfig {
    Scheme scheme = Scheme::zf_greedy;
    std::size_t nt = 4;
    double snr_db = 10.0;
    int tfb = 300;
    std::vector<int> b_values;
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    QuantizerKind quantizer = QuantizerKind::rvq_statistical;
    CqiKind cqi_kind = CqiKind::norm2;
    std::optional<int> cqi_bits; ///< when set, CQI is quantized and charged to the budget

    bool perfect_receiver_csi = true;
    double beta = 1.0;
    double r = 1.0;
    bool mmse_exact = true;

    bool relaxed_users = false;               ///< floor(tfb / b) users instead of requiring tfb % b == 0
    std::optional<std::size_t> fixed_users;   ///< override the user count (e.g. perfect-CSI baselines)
    std::size_t threads = 0;                  ///< 0: FBSIM_THREADS, else hardware concurrency

    double snr() const { return std::pow(10.0, snr_db / 10.0); }
};

struct RateEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
    int b = 0;
    std::size_t users = 0;
    double mean_scheduled = 0.0; ///< average number of users served per block
};

/// Bits each user spends per block, direction plus optional CQI.
inline int bits_per_user(const ExperimentConfig& cfg, int b)
{
    return b + cfg.cqi_bits.value_or(0);
}

/// Smallest / largest direction bits the scheme admits (before divisibility).
inline std::pair<int, int> bit_range(const ExperimentConfig& cfg)
{
    const auto nt = static_cast<double>(cfg.nt);
    const int log2nt = static_cast<int>(std::ceil(std::log2(nt) - 1e-12));
    switch (cfg.scheme) {
    case Scheme::zf_greedy:
    case Scheme::zf_simplified:
        return {std::max(1, log2nt), static_cast<int>(std::floor(cfg.tfb / nt))};
    case Scheme::rbf:
        return {log2nt, log2nt};
    case Scheme::pu2rc:
        return {log2nt, kMaxOrthosetBits};
    case Scheme::subf:
        return {1, cfg.tfb};
    }
    return {1, cfg.tfb};
}

/// Direction-bit values for which the configuration is runnable.
inline std::vector<int> feasible_b_values(const ExperimentConfig& cfg)
{
    std::vector<int> out;
    const auto [lo, hi] = bit_range(cfg);
    for (int b = lo; b <= hi; ++b) {
        const int per_user = bits_per_user(cfg, b);
        if (per_user > cfg.tfb)
            break;
        if (!cfg.relaxed_users && !cfg.fixed_users && cfg.tfb % per_user != 0)
            continue;
        if (cfg.scheme == Scheme::pu2rc || cfg.scheme == Scheme::rbf) {
            const std::uint64_t size = std::uint64_t{1} << b;
            if (size < cfg.nt || size % cfg.nt != 0)
                continue;
        }
        out.push_back(b);
    }
    return out;
}

inline std::string join_ints(const std::vector<int>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

/// Validates a point and returns the number of users feeding back.
inline std::size_t users_for(const ExperimentConfig& cfg, int b)
{
    if (cfg.nt < 1)
        throw ConfigError("nt must be >= 1");
    if (cfg.trials < 1)
        throw ConfigError("trials must be >= 1");
    if (cfg.tfb < 1)
        throw ConfigError("tfb must be >= 1");
    if (is_zf(cfg.scheme) || cfg.scheme == Scheme::subf)
        QuantizerSpec{cfg.quantizer, b, cfg.nt}.validate();

    const auto feasible = feasible_b_values(cfg);
    if (std::find(feasible.begin(), feasible.end(), b) == feasible.end())
        throw ConfigError("b=" + std::to_string(b) + " is infeasible for " + std::string(to_string(cfg.scheme)) +
                          " with tfb=" + std::to_string(cfg.tfb) + "; feasible values: " + join_ints(feasible));
    if (cfg.fixed_users)
        return *cfg.fixed_users;
    const std::size_t users = static_cast<std::size_t>(cfg.tfb / bits_per_user(cfg, b));
    if (users == 0)
        throw ConfigError("no users can feed back with b=" + std::to_string(b));
    return users;
}

/// Reference (0 dB point) of the CQI quantizer range: the mean of the CQI statistic.
inline double cqi_reference(const ExperimentConfig& cfg)
{
    const auto nt = static_cast<double>(cfg.nt);
    switch (cfg.scheme) {
    case Scheme::subf: return cfg.snr() * nt;
    case Scheme::rbf:
    case Scheme::pu2rc: return cfg.snr() / nt;
    default: return cfg.cqi_kind == CqiKind::expected_sinr ? cfg.snr() : nt;
    }
}

/// One coherence block: fresh channels, codebooks and quantizations from rng.
inline BlockOutcome run_block(const ExperimentConfig& cfg, int b, std::size_t users, RngStream& rng)
{
    ChannelModelConfig ch;
    ch.nt = cfg.nt;
    ch.num_users = users;
    ch.snr = cfg.snr();
    ch.perfect_receiver_csi = cfg.perfect_receiver_csi;
    ch.beta = cfg.beta;
    ch.r = cfg.r;
    ch.mmse_exact = cfg.mmse_exact;
    const ChannelRealization real = draw_block(ch, rng);

    std::optional<CqiQuantizerSpec> cqi_q;
    if (cfg.cqi_bits)
        cqi_q = CqiQuantizerSpec{*cfg.cqi_bits, -10.0, 15.0, cqi_reference(cfg)};
    const CqiQuantizerSpec* cqi_ptr = cqi_q ? &*cqi_q : nullptr;

    const QuantizerSpec qspec{cfg.quantizer, b, cfg.nt};
    switch (cfg.scheme) {
    case Scheme::zf_greedy:
        return zf_block(real, qspec, cfg.cqi_kind, ch.snr, Selection::greedy, rng, cqi_ptr);
    case Scheme::zf_simplified:
        return zf_block(real, qspec, cfg.cqi_kind, ch.snr, Selection::simplified, rng, cqi_ptr);
    case Scheme::rbf:
        return rbf_block(real, ch.snr, cfg.nt, rng);
    case Scheme::pu2rc:
        return pu2rc_block(real, b, ch.snr, cfg.nt, rng);
    case Scheme::subf:
        return subf_block(real, qspec, ch.snr, rng, cqi_ptr);
    }
    throw ConfigError("unknown scheme");
}

inline std::size_t resolve_threads(const ExperimentConfig& cfg)
{
    if (cfg.threads > 0)
        return cfg.threads;
    if (const char* env = std::getenv("FBSIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0)
            return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Mean sum rate over cfg.trials independent blocks. Trial t uses the stream
/// (cfg.seed, stream_offset + t) and writes its own slot, so the result does
/// not depend on the number of worker threads.
inline RateEstimate run_point(const ExperimentConfig& cfg, int b, std::uint64_t stream_offset = 0)
{
    const std::size_t users = users_for(cfg, b);
    const std::size_t trials = cfg.trials;
    std::vector<double> rates(trials, 0.0);
    std::vector<double> scheduled(trials, 0.0);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (std::size_t t = next++; t < trials; t = next++) {
                RngStream rng(cfg.seed, stream_offset + t);
                const BlockOutcome out = run_block(cfg, b, users, rng);
                rates[t] = out.sum_rate;
                scheduled[t] = static_cast<double>(out.plan.selected.size());
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
            next = trials;
        }
    };

    const std::size_t n_threads = std::min(resolve_threads(cfg), trials);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    RateEstimate est;
    est.trials = trials;
    est.b = b;
    est.users = users;
    double sum = 0.0;
    double sched = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        sum += rates[t];
        sched += scheduled[t];
    }
    est.mean = sum / static_cast<double>(trials);
    est.mean_scheduled = sched / static_cast<double>(trials);
    if (trials > 1) {
        double ss = 0.0;
        for (double r : rates)
            ss += (r - est.mean) * (r - est.mean);
        est.std_error = std::sqrt(ss / static_cast<double>(trials - 1)) / std::sqrt(static_cast<double>(trials));
    }
    return est;
}

/// run_point for every cfg.b_values entry; point i draws from streams
/// [i * trials, (i + 1) * trials) of the common seed.
inline std::vector<RateEstimate> sweep_b(const ExperimentConfig& cfg)
{
    if (cfg.b_values.empty())
        throw ConfigError("sweep_b: b_values is empty; feasible values: " + join_ints(feasible_b_values(cfg)));
    std::vector<RateEstimate> out;
    out.reserve(cfg.b_values.size());
    for (std::size_t i = 0; i < cfg.b_values.size(); ++i)
        out.push_back(run_point(cfg, cfg.b_values[i], static_cast<std::uint64_t>(i) * cfg.trials));
    return out;
}

struct EmpiricalBopt {
    int b = 0;
    RateEstimate estimate;
    double runner_up_gap_se = 0.0; ///< (best - second best) / pooled standard error
    std::vector<RateEstimate> sweep;
};

inline double pooled_se(const RateEstimate& a, const RateEstimate& b)
{
    return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

/// Argmax of the sweep means; ties go to the smaller b.
inline EmpiricalBopt find_bopt_empirical(const ExperimentConfig& cfg)
{
    EmpiricalBopt out;
    out.sweep = sweep_b(cfg);
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.sweep.size(); ++i) {
        const auto& cand = out.sweep[i];
        const auto& cur = out.sweep[best];
        if (cand.mean > cur.mean || (cand.mean == cur.mean && cand.b < cur.b))
            best = i;
    }
    out.b = out.sweep[best].b;
    out.estimate = out.sweep[best];
    std::optional<std::size_t> second;
    for (std::size_t i = 0; i < out.sweep.size(); ++i)
        if (i != best && (!second || out.sweep[i].mean > out.sweep[*second].mean))
            second = i;
    if (second) {
        const double se = pooled_se(out.sweep[best], out.sweep[*second]);
        out.runner_up_gap_se = se > 0.0 ? (out.sweep[best].mean - out.sweep[*second].mean) / se : 0.0;
    }
    return out;
}

} // namespace fbsim

#endif
