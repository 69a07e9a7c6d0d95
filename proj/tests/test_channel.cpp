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

#include "fbsim/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace fbsim;

namespace {

struct Moments {
    double mean = 0;
    double se = 0;
};

template <class F>
Moments sample(int n, F&& f)
{
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const double v = f();
        s += v, s2 += v * v;
    }
    Moments m;
    m.mean = s / n;
    m.se = std::sqrt(std::max(0.0, s2 / n - m.mean * m.mean) / n);
    return m;
}

} // namespace

TEST(Channel, PerfectCsiWithoutDelayKeepsAllCopiesEqual)
{
    ChannelModelConfig cfg;
    cfg.nt = 3;
    cfg.num_users = 5;
    RngStream rng(1, 0);
    const auto real = draw_block(cfg, rng);
    ASSERT_EQ(real.num_users(), 5u);
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(real.true_channels[k].size(), 3);
        EXPECT_TRUE(real.true_channels[k] == real.estimates[k]);
        EXPECT_TRUE(real.true_channels[k] == real.delayed_channels[k]);
    }
}

TEST(Channel, EntriesHaveUnitVariance)
{
    ChannelModelConfig cfg;
    cfg.nt = 4;
    cfg.num_users = 1;
    RngStream rng(2, 0);
    const auto m = sample(20000, [&] { return draw_block(cfg, rng).true_channels[0].squaredNorm(); });
    EXPECT_NEAR(m.mean, 4.0, 4 * m.se);
}

class ChannelEstimation : public ::testing::TestWithParam<bool> {};

TEST_P(ChannelEstimation, ErrorVarianceAndOrthogonality)
{
    ChannelModelConfig cfg;
    cfg.nt = 2;
    cfg.num_users = 1;
    cfg.snr = 10.0;
    cfg.perfect_receiver_csi = false;
    cfg.beta = 1.0;
    cfg.mmse_exact = GetParam();
    const double expected = 1.0 / 11.0;
    EXPECT_DOUBLE_EQ(cfg.estimation_error_variance(), expected);

    RngStream rng(3, 0);
    double err = 0, err2 = 0, cross_re = 0, total = 0;
    constexpr int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto real = draw_block(cfg, rng);
        const ComplexVector e = real.true_channels[0] - real.estimates[0];
        const double p = e.squaredNorm() / 2.0;
        err += p, err2 += p * p;
        cross_re += std::real(real.estimates[0].dot(e));
        total += real.true_channels[0].squaredNorm() / 2.0;
    }
    const double mean = err / n;
    const double se = std::sqrt((err2 / n - mean * mean) / n);
    EXPECT_NEAR(mean, expected, 4 * se);
    EXPECT_NEAR(total / n, 1.0, 0.03);
    if (cfg.mmse_exact)
        EXPECT_NEAR(cross_re / n, 0.0, 0.01); // estimate uncorrelated with its error
}

INSTANTIATE_TEST_SUITE_P(BothDrawOrders, ChannelEstimation, ::testing::Values(true, false));

TEST(Channel, DelayedChannelCorrelation)
{
    ChannelModelConfig cfg;
    cfg.nt = 1;
    cfg.num_users = 1;
    cfg.r = 0.8;
    RngStream rng(4, 0);
    double corr = 0, power = 0;
    constexpr int n = 40000;
    for (int i = 0; i < n; ++i) {
        const auto real = draw_block(cfg, rng);
        corr += std::real(std::conj(real.true_channels[0][0]) * real.delayed_channels[0][0]);
        power += std::norm(real.delayed_channels[0][0]);
    }
    EXPECT_NEAR(corr / n, 0.8, 0.02);
    EXPECT_NEAR(power / n, 1.0, 0.03);
}

TEST(Channel, ValidationRejectsBadConfigs)
{
    ChannelModelConfig cfg;
    cfg.nt = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.num_users = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.r = 1.5;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.snr = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.perfect_receiver_csi = false;
    cfg.beta = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.perfect_receiver_csi = true;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_EQ(cfg.estimation_error_variance(), 0.0);
}
