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

#ifndef FBSIM_CHANNEL_HPP
#define FBSIM_CHANNEL_HPP

#include "fbsim/errors.hpp"
#include "fbsim/numerics.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace fbsim {

/// Block-fading Rayleigh channel with optional receiver training error and
/// feedback delay.
struct ChannelModelConfig {
    std::size_t nt = 4;
    std::size_t num_users = 1;
    double snr = 10.0;                 ///< linear
    bool perfect_receiver_csi = true;  ///< receivers know h exactly (infinite pilots)
    double beta = 1.0;                 ///< pilots per antenna, used when !perfect_receiver_csi
    double r = 1.0;                    ///< temporal correlation between feedback and transmission
    bool mmse_exact = true;            ///< draw (estimate, error) orthogonal as MMSE implies

    void validate() const
    {
        if (nt < 1)
            throw ConfigError("channel: nt must be >= 1");
        if (num_users < 1)
            throw ConfigError("channel: num_users must be >= 1");
        if (!(snr > 0.0) || !std::isfinite(snr))
            throw ConfigError("channel: snr must be positive and finite");
        if (!(r >= 0.0 && r <= 1.0))
            throw ConfigError("channel: r must lie in [0, 1]");
        if (!perfect_receiver_csi && !(beta > 0.0))
            throw ConfigError("channel: beta must be > 0 with imperfect receiver CSI");
    }

    /// Per-entry variance of h - h_estimate, (1 + beta snr)^-1; zero with perfect CSI.
    double estimation_error_variance() const
    {
        return perfect_receiver_csi ? 0.0 : 1.0 / (1.0 + beta * snr);
    }
};

struct ChannelRealization {
    std::vector<ComplexVector> true_channels;    ///< h_k during training/feedback
    std::vector<ComplexVector> estimates;        ///< receiver estimate of h_k, quantized and fed back
    std::vector<ComplexVector> delayed_channels; ///< h_k^+ during data transmission

    std::size_t num_users() const { return true_channels.size(); }
};

/// Draws one coherence block.
///
/// h = estimate + n with n ~ CN(0, (1+beta snr)^-1 I). In mmse_exact mode the
/// estimate and n are drawn independently (estimate variance 1 - sigma^2) and h
/// is their sum; otherwise h is drawn first and n subtracted from it. The
/// transmission channel is h^+ = r h + sqrt(1 - r^2) Delta.
inline ChannelRealization draw_block(const ChannelModelConfig& cfg, RngStream& rng)
{
    cfg.validate();
    const auto nt = static_cast<Eigen::Index>(cfg.nt);
    const double err_var = cfg.estimation_error_variance();
    const double innovation = std::sqrt(std::max(0.0, 1.0 - cfg.r * cfg.r));

    ChannelRealization out;
    out.true_channels.reserve(cfg.num_users);
    out.estimates.reserve(cfg.num_users);
    out.delayed_channels.reserve(cfg.num_users);

    for (std::size_t k = 0; k < cfg.num_users; ++k) {
        ComplexVector h;
        ComplexVector est;
        if (cfg.perfect_receiver_csi) {
            h = rng.complex_gaussian_vector(nt);
            est = h;
        } else if (cfg.mmse_exact) {
            est = rng.complex_gaussian_vector(nt, 1.0 - err_var);
            h = est + rng.complex_gaussian_vector(nt, err_var);
        } else {
            h = rng.complex_gaussian_vector(nt);
            est = h - rng.complex_gaussian_vector(nt, err_var);
        }

        ComplexVector delayed;
        if (cfg.r == 1.0)
            delayed = h;
        else
            delayed = cfg.r * h + innovation * rng.complex_gaussian_vector(nt);

        out.true_channels.push_back(std::move(h));
        out.estimates.push_back(std::move(est));
        out.delayed_channels.push_back(std::move(delayed));
    }
    return out;
}

} // namespace fbsim

#endif
