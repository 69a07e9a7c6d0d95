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

#include "fbsim/analytic.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fbsim;
using namespace fbsim::analytic;

TEST(LossBound, IntroductionAnchors)
{
    EXPECT_NEAR(zf_loss_bound(10.0, 4.0, 10.0), 3.977210, 1e-3);
    EXPECT_NEAR(zf_loss_bound(10.0, 4.0, 17.0), 1.037016, 1e-3);
    EXPECT_EQ(std::round(zf_loss_bound(10.0, 4.0, 10.0)), 4.0);
    EXPECT_EQ(std::round(zf_loss_bound(10.0, 4.0, 17.0)), 1.0);
    EXPECT_EQ(zf_loss_bound(10.0, 4.0, INFINITY), 0.0);
    EXPECT_THROW(zf_loss_bound(10.0, 4.0, -1.0), DomainError);
}

TEST(RateApprox, FrozenValue)
{
    EXPECT_NEAR(zf_rate_approx({10.0, 4.0, 300.0, 20.0, 0.0}), 13.457705, 1e-5);
    EXPECT_THROW(zf_rate_approx({10.0, 4.0, 10.0, 40.0, 0.0}), DomainError);
}

TEST(RateApprox, SlopeBetweenNineAndTwelveBits)
{
    // Far from the nt/(nt-1) per-bit slope of the interference-limited regime at 10 dB.
    const double slope =
        (zf_rate_approx({10.0, 4.0, 300.0, 12.0, 0.0}) - zf_rate_approx({10.0, 4.0, 300.0, 9.0, 0.0})) / 3.0;
    EXPECT_NEAR(slope, 0.532, 2e-3);
    EXPECT_DOUBLE_EQ(zf_rate_linear_regime(4.0, 12.0) - zf_rate_linear_regime(4.0, 9.0), 4.0);
}

TEST(RateApprox, SlopeGrowsTowardLinearRegimeWithSnr)
{
    auto slope = [](double snr) {
        return (zf_rate_approx({snr, 4.0, 300.0, 12.0, 0.0}) - zf_rate_approx({snr, 4.0, 300.0, 9.0, 0.0})) / 3.0;
    };
    // the shrinking user pool keeps the slope below nt/(nt-1)
    EXPECT_LT(slope(10.0), slope(1e4));
    EXPECT_LT(slope(1e4), slope(1e8));
    EXPECT_LT(slope(1e8), 4.0 / 3.0);
}

TEST(RateApprox, TrainingDelayEquivalentSnrIdentity)
{
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const double snr = std::pow(10.0, -1.0 + 3.0 * u(gen));
        const double nt = 2.0 + std::floor(7.0 * u(gen));
        const double tfb = 100.0 + 900.0 * u(gen);
        const double b = 1.0 + 30.0 * u(gen);
        const double phi = training_delay_phi(0.5 + 0.5 * u(gen), 0.5 + 4.0 * u(gen), snr);
        const double lhs = zf_rate_approx({snr, nt, tfb, b, phi});
        const double snr_eff = snr / (1.0 + phi * nt / (nt - 1.0) * snr);
        const double rhs = zf_rate_approx({snr_eff, nt, tfb, b, 0.0});
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(TrainingPhi, Components)
{
    EXPECT_DOUBLE_EQ(training_delay_phi(1.0, 1.0, 10.0), 1.0 / 11.0);
    EXPECT_DOUBLE_EQ(training_delay_phi(0.9, 1.0, 10.0, true), 1.0 - 0.81);
}

TEST(Penalty, FrozenValue)
{
    EXPECT_NEAR(zf_penalty_approx({10.0, 4.0, 300.0, 10.0, 0.0}), 4.517, 1e-3);
}

TEST(Bopt, FixedPointMatchesGoldenSectionOracle)
{
    for (double snr_db : {0.0, 5.0, 10.0, 15.0, 20.0})
        for (double nt : {2.0, 4.0, 6.0}) {
            const double snr = std::pow(10.0, snr_db / 10.0);
            const auto fp = zf_bopt_fixed_point(snr, nt, 300.0);
            if (fp.at_boundary)
                continue;
            const double ref = oracle::argmax(
                [&](double b) { return zf_rate_approx({snr, nt, 300.0, b, 0.0}); }, std::log2(nt), 300.0 / nt);
            EXPECT_NEAR(fp.value, ref, 1e-5) << snr_db << " dB, nt=" << nt;
        }
}

TEST(Bopt, TenAndFiveDecibelValues)
{
    EXPECT_NEAR(zf_bopt_fixed_point(10.0, 4.0, 300.0).value, 23.1, 0.2);
    EXPECT_NEAR(zf_bopt_fixed_point(std::pow(10.0, 0.5), 4.0, 300.0).value, 17.5, 0.3);
    EXPECT_NEAR(zf_bopt_fixed_point(10.0, 4.0, 300.0).value, 23.1063, 1e-3);
}

TEST(Bopt, LambertAgreesWithFixedPoint)
{
    for (double snr_db : {5.0, 10.0, 15.0, 20.0})
        for (double nt : {2.0, 4.0, 8.0})
            for (double tfb : {200.0, 300.0, 1000.0}) {
                const double snr = std::pow(10.0, snr_db / 10.0);
                const auto fp = zf_bopt_fixed_point(snr, nt, tfb);
                if (fp.at_boundary)
                    continue;
                EXPECT_NEAR(zf_bopt_lambert(snr, nt, tfb), fp.value, 1e-4)
                    << snr_db << " dB, nt=" << nt << ", tfb=" << tfb;
            }
}

TEST(Bopt, LambertReportsInfeasibleRegime)
{
    EXPECT_THROW(zf_bopt_lambert(0.1, 4.0, 300.0), InfeasibleRegimeError);
    EXPECT_THROW(zf_bopt_fixed_point(0.0, 4.0, 300.0), DomainError);
}

TEST(Bopt, GrowsWithSnrBudgetAndAntennas)
{
    EXPECT_GT(zf_bopt_fixed_point(10.0, 4.0, 600.0).value, zf_bopt_fixed_point(10.0, 4.0, 300.0).value);
    EXPECT_GT(zf_bopt_fixed_point(20.0, 4.0, 300.0).value, zf_bopt_fixed_point(10.0, 4.0, 300.0).value);
    EXPECT_GT(zf_bopt_fixed_point(10.0, 4.0, 300.0).value, zf_bopt_fixed_point(10.0, 2.0, 300.0).value);
}

TEST(Bopt, IntegerProjectionUsesDivisors)
{
    EXPECT_EQ(integer_feasible_bits(4.0, 100), (std::vector<int>{2, 4, 5, 10, 20, 25}));
    const int b = zf_bopt_integer(10.0, 4.0, 300);
    const auto feasible = integer_feasible_bits(4.0, 300);
    EXPECT_NE(std::find(feasible.begin(), feasible.end(), b), feasible.end());
    EXPECT_TRUE(b == 20 || b == 25);
}

TEST(Bopt, ScalingReport)
{
    const auto r = bopt_scaling_report(std::pow(10.0, 2.0), 4.0, 300.0);
    EXPECT_NEAR(r.snr_leading, 3.0 * std::log2(25.0), 1e-12);
    EXPECT_NEAR(r.nt_leading, 3.0 * std::log2(100.0), 1e-12);
    EXPECT_NEAR(r.tfb_leading, 6.0 * std::log2(std::log(1200.0)), 1e-12);
    EXPECT_NEAR(r.expansion, r.exact, 1.5);
    // the leading SNR term carries the slope: (nt-1) log2(10) bits per decade
    const auto lo = bopt_scaling_report(1e3, 4.0, 300.0), hi = bopt_scaling_report(1e4, 4.0, 300.0);
    EXPECT_NEAR(hi.exact - lo.exact, 3.0 * std::log2(10.0), 1.5);
}

TEST(RbfBudget, MatchingUsersAndBits)
{
    const auto r = rbf_matching_budget(300.0, 4.0, std::pow(10.0, 0.5), 20.0);
    EXPECT_NEAR(r.users, 4563.36, 0.01);
    EXPECT_NEAR(r.t_rbf, 2.0 * r.users, 1e-9);
    EXPECT_LT(std::max(r.users / 5000.0, 5000.0 / r.users), 1.25);
    EXPECT_LT(std::max(r.t_rbf / 10000.0, 10000.0 / r.t_rbf), 1.25);
    EXPECT_THROW(rbf_matching_budget(300.0, 4.0, 3.0, 0.0), DomainError);
}

TEST(Subf, OptimumIsThirteenBitsAndSnrFree)
{
    EXPECT_NEAR(subf_bopt(4.0, 300.0), 13.3537, 1e-3);
    EXPECT_EQ(std::lround(subf_bopt(4.0, 300.0)), 13);
    for (double snr : {1.0, 10.0}) {
        const double ref = oracle::argmax([&](double b) { return subf_rate_approx(snr, 4.0, 300.0, b); }, 1.0, 60.0);
        EXPECT_NEAR(ref, subf_bopt(4.0, 300.0), 1e-5);
    }
    EXPECT_NEAR(subf_bopt(4.0, 70.0), 11.838, 1e-3);
}

TEST(Subf, SimplifiedFormGap)
{
    const double full = subf_rate_approx_full(1.0, 4.0, 300.0, 13.0);
    const double simple = subf_rate_approx(1.0, 4.0, 300.0, 13.0);
    EXPECT_NEAR(full - simple, 0.284, 1e-3);
}
