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

#include "fbsim/quantization.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <string>

using namespace fbsim;

namespace {

struct Stat {
    double mean = 0;
    double se = 0;
};

template <class F>
Stat mean_sin2(int n, RngStream& rng, std::size_t nt, F&& quantize)
{
    double s = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
        const ComplexVector h = rng.complex_gaussian_vector(static_cast<Eigen::Index>(nt));
        const double v = quantize(h).sin2_error;
        s += v, s2 += v * v;
    }
    Stat st;
    st.mean = s / n;
    st.se = std::sqrt(std::max(0.0, s2 / n - st.mean * st.mean) / n);
    return st;
}

} // namespace

TEST(QuantizerSpec, ExplicitRvqCapacityErrorNamesAlternative)
{
    QuantizerSpec spec{QuantizerKind::rvq_explicit, 30, 4};
    try {
        spec.validate();
        FAIL() << "expected CapacityError";
    } catch (const CapacityError& e) {
        EXPECT_NE(std::string(e.what()).find("rvq_statistical"), std::string::npos);
    }
    RngStream rng(1, 0);
    EXPECT_THROW(quantize_rvq_explicit(rng.complex_gaussian_vector(4), 25, rng), CapacityError);
    EXPECT_NO_THROW((QuantizerSpec{QuantizerKind::rvq_statistical, 60, 4}.validate()));
}

TEST(QuantizerSpec, OrthosetGuards)
{
    EXPECT_THROW((QuantizerSpec{QuantizerKind::orthosets, 21, 4}.validate()), CapacityError);
    EXPECT_THROW((QuantizerSpec{QuantizerKind::orthosets, 1, 4}.validate()), ConfigError);
    EXPECT_THROW((QuantizerSpec{QuantizerKind::orthosets, 3, 3}.validate()), ConfigError);
    EXPECT_NO_THROW((QuantizerSpec{QuantizerKind::orthosets, 2, 4}.validate()));
    EXPECT_THROW((QuantizerSpec{QuantizerKind::scalar, 0, 4}.validate()), ConfigError);
}

TEST(QuantizerKinds, RoundTripNames)
{
    for (auto k : {QuantizerKind::rvq_explicit, QuantizerKind::rvq_statistical, QuantizerKind::scalar,
                   QuantizerKind::idealized, QuantizerKind::orthosets, QuantizerKind::perfect})
        EXPECT_EQ(parse_quantizer_kind(to_string(k)), k);
    EXPECT_EQ(parse_quantizer_kind("rvq"), QuantizerKind::rvq_statistical);
    EXPECT_THROW(parse_quantizer_kind("lattice"), ConfigError);
}

TEST(Rvq, ReportedErrorMatchesDirection)
{
    RngStream rng(2, 0);
    for (int i = 0; i < 50; ++i) {
        const ComplexVector h = rng.complex_gaussian_vector(4);
        for (const auto& q : {quantize_rvq_explicit(h, 6, rng), quantize_rvq_statistical(h, 6, rng),
                              quantize_idealized(h, 6, rng), quantize_scalar(h, 6), quantize_perfect(h)}) {
            ASSERT_NEAR(q.direction.norm(), 1.0, 1e-12);
            const double cos2 = std::norm(h.dot(q.direction)) / h.squaredNorm();
            EXPECT_NEAR(q.sin2_error, 1.0 - cos2, 1e-12);
        }
    }
}

TEST(Rvq, TwoAntennaOneBitMeanIsOneThird)
{
    RngStream rng(3, 0);
    const auto st = mean_sin2(40000, rng, 2, [&](const ComplexVector& h) { return quantize_rvq_explicit(h, 1, rng); });
    EXPECT_NEAR(st.mean, 1.0 / 3.0, 3 * st.se);
    EXPECT_NEAR(oracle::min_power_law_mean(2, 1), 1.0 / 3.0, 1e-12);
}

class RvqAgreement : public ::testing::TestWithParam<std::tuple<std::size_t, int>> {};

TEST_P(RvqAgreement, ExplicitAndStatisticalAgree)
{
    const auto [nt, bits] = GetParam();
    RngStream a(4, static_cast<std::uint64_t>(nt * 100 + bits)), b(5, static_cast<std::uint64_t>(nt * 100 + bits));
    const int n = bits >= 8 ? 3000 : 12000;
    const auto ex = mean_sin2(n, a, nt, [&](const ComplexVector& h) { return quantize_rvq_explicit(h, bits, a); });
    const auto st = mean_sin2(n, b, nt, [&](const ComplexVector& h) { return quantize_rvq_statistical(h, bits, b); });
    const double pooled = std::hypot(ex.se, st.se);
    EXPECT_NEAR(ex.mean, st.mean, 3 * pooled);
    const double exact = oracle::min_power_law_mean(std::exp2(bits), static_cast<double>(nt - 1));
    EXPECT_NEAR(st.mean, exact, 3 * st.se);
    EXPECT_LE(st.mean, std::exp2(-bits / static_cast<double>(nt - 1)));
}

INSTANTIATE_TEST_SUITE_P(Grid, RvqAgreement,
                         ::testing::Combine(::testing::Values(std::size_t{2}, std::size_t{4}),
                                            ::testing::Values(1, 4, 8)));

TEST(Rvq, MeanErrorBelowBoundEverywhere)
{
    for (std::size_t nt : {2u, 3u, 4u, 6u, 8u})
        for (int bits = 1; bits <= 24; ++bits) {
            const double exact = oracle::min_power_law_mean(std::exp2(bits), static_cast<double>(nt - 1));
            EXPECT_LE(exact, std::exp2(-bits / static_cast<double>(nt - 1))) << nt << " " << bits;
        }
    RngStream rng(6, 0);
    for (int bits : {2, 10, 20, 30}) {
        const auto st = mean_sin2(4000, rng, 4, [&](const ComplexVector& h) { return quantize_rvq_statistical(h, bits, rng); });
        EXPECT_LE(st.mean, std::exp2(-bits / 3.0));
    }
}

TEST(Rvq, StatisticalSamplerIsStableForLargeCodebooks)
{
    const double x = detail::sample_rvq_sin2(0.5, 60, 4);
    EXPECT_GT(x, 0.0);
    // median of the minimum: (1 - 2^{-2^-B})^{1/3} ~ (ln 2 2^-B)^{1/3}
    EXPECT_NEAR(x, std::cbrt(std::numbers::ln2 * std::exp2(-60.0)), 1e-3 * x);
    EXPECT_EQ(detail::sample_rvq_sin2(0.3, 5, 1), 0.0);
}

TEST(Idealized, ThreeQuartersOfRvq)
{
    RngStream a(7, 0), b(7, 0);
    const auto rvq = mean_sin2(20000, a, 4, [&](const ComplexVector& h) { return quantize_rvq_statistical(h, 8, a); });
    const auto ideal = mean_sin2(20000, b, 4, [&](const ComplexVector& h) { return quantize_idealized(h, 8, b); });
    // same streams: the scaling is exact sample by sample
    EXPECT_NEAR(ideal.mean, 0.75 * rvq.mean, 1e-12);
}

TEST(Scalar, BitSplitRoundRobin)
{
    EXPECT_EQ(scalar_bit_split(7, 4), (std::vector<int>{2, 1, 1, 1, 1, 1}));
    EXPECT_EQ(scalar_bit_split(12, 4), (std::vector<int>{2, 2, 2, 2, 2, 2}));
    EXPECT_EQ(scalar_bit_split(3, 2), (std::vector<int>{2, 1}));
    EXPECT_TRUE(scalar_bit_split(5, 1).empty());
}

TEST(Scalar, CellMidpoints)
{
    EXPECT_DOUBLE_EQ(uniform_cell_midpoint(0.1, 0.0, 1.0, 1), 0.25);
    EXPECT_DOUBLE_EQ(uniform_cell_midpoint(0.9, 0.0, 1.0, 2), 0.875);
    EXPECT_DOUBLE_EQ(uniform_cell_midpoint(1.0, 0.0, 1.0, 2), 0.875);
    EXPECT_DOUBLE_EQ(uniform_cell_midpoint(-3.0, 0.0, 1.0, 2), 0.125);
    EXPECT_DOUBLE_EQ(uniform_cell_midpoint(0.3, 0.0, 1.0, 0), 0.5);
}

TEST(Scalar, FirstEntryRealPositiveAndErrorShrinks)
{
    RngStream rng(8, 0);
    const ComplexVector h = rng.complex_gaussian_vector(4);
    const auto q = quantize_scalar(h, 12);
    EXPECT_NEAR(q.direction[0].imag(), 0.0, 1e-15);
    EXPECT_GT(q.direction[0].real(), 0.0);
    const auto coarse = mean_sin2(3000, rng, 4, [](const ComplexVector& x) { return quantize_scalar(x, 6); });
    const auto fine = mean_sin2(3000, rng, 4, [](const ComplexVector& x) { return quantize_scalar(x, 18); });
    EXPECT_LT(fine.mean, coarse.mean);
}

TEST(Scalar, RejectsZeroPivot)
{
    ComplexVector h(3);
    h << Complex(0, 0), Complex(1, 0), Complex(0, 1);
    EXPECT_THROW(quantize_scalar(h, 6), DomainError);
    EXPECT_THROW(quantize_scalar(ComplexVector::Zero(3), 6), DomainError);
}

TEST(Orthosets, CodebookShapeAndBestBeam)
{
    RngStream rng(9, 0);
    const auto cb = build_orthosets_codebook(4, 4, rng);
    ASSERT_EQ(cb.size(), 4u);
    const ComplexVector h = rng.complex_gaussian_vector(4);
    const auto q = quantize_to_orthosets(h, cb);
    double best = 0;
    for (const auto& s : cb)
        for (Eigen::Index m = 0; m < 4; ++m)
            best = std::max(best, std::norm(s.beam(m).dot(h)));
    EXPECT_NEAR(std::norm(q.direction.dot(h)), best, 1e-12);
    EXPECT_TRUE(q.direction.isApprox(cb[q.set_index].beam(static_cast<Eigen::Index>(q.beam_index))));
    EXPECT_EQ(build_orthosets_codebook(2, 4, rng).size(), 1u);
    EXPECT_THROW(quantize_to_orthosets(h, {}), ConfigError);
    EXPECT_THROW(quantize_direction(h, {QuantizerKind::orthosets, 4, 4}, rng), ConfigError);
}

TEST(Cqi, QuantizerReconstructsCellMidpoints)
{
    const CqiQuantizerSpec spec{4, -10.0, 15.0, 2.0};
    const double width = 25.0 / 16.0;
    // 0 dB relative to the reference sits in cell 6: [-0.625, 0.9375)
    const double q = quantize_cqi(2.0, spec);
    EXPECT_NEAR(10 * std::log10(q / 2.0), -10.0 + 6.5 * width, 1e-12);
    EXPECT_NEAR(10 * std::log10(quantize_cqi(0.0, spec) / 2.0), -10.0 + 0.5 * width, 1e-12);
    EXPECT_NEAR(10 * std::log10(quantize_cqi(1e9, spec) / 2.0), 15.0 - 0.5 * width, 1e-12);
    EXPECT_THROW(quantize_cqi(1.0, {0, -10.0, 15.0, 1.0}), ConfigError);
    EXPECT_THROW(quantize_cqi(1.0, {4, -10.0, 15.0, 0.0}), ConfigError);
}
