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

#ifndef FBSIM_QUANTIZATION_HPP
#define FBSIM_QUANTIZATION_HPP

#include "fbsim/errors.hpp"
#include "fbsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace fbsim {

enum class QuantizerKind {
    rvq_explicit,    ///< explicit random codebook, scanned codeword by codeword
    rvq_statistical, ///< samples the RVQ error law directly
    scalar,          ///< per-component phase / arctan-magnitude quantization
    idealized,       ///< RVQ error law scaled by (nt-1)/nt
    orthosets,       ///< common codebook of Haar orthonormal sets (RBF / PU2RC)
    perfect,         ///< no quantization; the direction is fed back exactly
};

inline constexpr int kMaxExplicitRvqBits = 24;
inline constexpr int kMaxOrthosetBits = 20;

inline std::string_view to_string(QuantizerKind kind)
{
    switch (kind) {
    case QuantizerKind::rvq_explicit: return "rvq_explicit";
    case QuantizerKind::rvq_statistical: return "rvq_statistical";
    case QuantizerKind::scalar: return "scalar";
    case QuantizerKind::idealized: return "idealized";
    case QuantizerKind::orthosets: return "orthosets";
    case QuantizerKind::perfect: return "perfect";
    }
    return "unknown";
}

inline QuantizerKind parse_quantizer_kind(std::string_view s)
{
    for (auto k : {QuantizerKind::rvq_explicit, QuantizerKind::rvq_statistical, QuantizerKind::scalar,
                   QuantizerKind::idealized, QuantizerKind::orthosets, QuantizerKind::perfect})
        if (to_string(k) == s)
            return k;
    if (s == "rvq")
        return QuantizerKind::rvq_statistical;
    throw ConfigError("unknown quantizer '" + std::string(s) + "'");
}

struct QuantizerSpec {
    QuantizerKind kind = QuantizerKind::rvq_statistical;
    int bits = 1;
    std::size_t nt = 4;

    void validate() const
    {
        if (nt < 1)
            throw ConfigError("quantizer: nt must be >= 1");
        if (kind == QuantizerKind::perfect)
            return;
        if (bits < 1)
            throw ConfigError("quantizer: bits must be >= 1");
        if (kind == QuantizerKind::rvq_explicit && bits > kMaxExplicitRvqBits)
            throw CapacityError("quantizer: rvq_explicit supports at most 24 bits (requested " +
                                std::to_string(bits) + "); use rvq_statistical");
        if (kind == QuantizerKind::orthosets) {
            if (bits > kMaxOrthosetBits)
                throw CapacityError("quantizer: orthosets codebook limited to 20 bits");
            const std::uint64_t size = std::uint64_t{1} << bits;
            if (size < nt || size % nt != 0)
                throw ConfigError("quantizer: orthosets needs 2^B divisible by nt and B >= log2(nt)");
        }
    }
};

struct DirectionQuantization {
    ComplexVector direction;   ///< unit norm
    double sin2_error = 0.0;   ///< sin^2 of the angle between h and direction
    std::size_t set_index = 0; ///< orthosets only
    std::size_t beam_index = 0;
};

namespace detail {

inline double sin2_between(const ComplexVector& h, const ComplexVector& unit)
{
    const double cos2 = inner_power(h, unit) / h.squaredNorm();
    return std::clamp(1.0 - cos2, 0.0, 1.0);
}

inline void require_nonzero(const ComplexVector& h, const char* who)
{
    if (h.size() == 0 || !(h.squaredNorm() > 0.0))
        throw DomainError(std::string(who) + ": zero channel vector");
}

/// sin^2 of the best of 2^B isotropic codewords: the minimum of 2^B
/// Beta(nt-1, 1) variates, by inverse CDF x = (1 - (1-u)^{2^-B})^{1/(nt-1)}.
inline double sample_rvq_sin2(double u, int bits, std::size_t nt)
{
    if (nt == 1)
        return 0.0;
    const double inv_size = std::exp2(-static_cast<double>(bits));
    const double base = -std::expm1(inv_size * std::log1p(-u));
    return std::pow(base, 1.0 / static_cast<double>(nt - 1));
}

/// Unit vector at angle asin(sqrt(sin2)) from h, uniform in h's orthogonal complement.
inline ComplexVector place_at_angle(const ComplexVector& h, double sin2, RngStream& rng)
{
    const ComplexVector u = h / h.norm();
    if (h.size() == 1)
        return u;
    ComplexVector e = rng.complex_gaussian_vector(h.size());
    e -= u * u.dot(e);
    e /= e.norm();
    return std::sqrt(1.0 - sin2) * u + std::sqrt(sin2) * e;
}

} // namespace detail

/// Best codeword from a fresh 2^B-entry isotropic codebook drawn from rng.
inline DirectionQuantization quantize_rvq_explicit(const ComplexVector& h, int bits, RngStream& rng)
{
    if (bits > kMaxExplicitRvqBits)
        throw CapacityError("rvq_explicit: " + std::to_string(bits) +
                            " bits exceeds the 24-bit explicit codebook limit; use rvq_statistical");
    if (bits < 0)
        throw ConfigError("rvq_explicit: negative bit count");
    detail::require_nonzero(h, "rvq_explicit");

    const std::uint64_t size = std::uint64_t{1} << bits;
    ComplexVector best;
    double best_power = -1.0;
    for (std::uint64_t i = 0; i < size; ++i) {
        ComplexVector w = rng.isotropic_unit_vector(h.size());
        const double p = inner_power(h, w);
        if (p > best_power) {
            best_power = p;
            best = std::move(w);
        }
    }
    const double sin2 = detail::sin2_between(h, best);
    return {std::move(best), sin2, 0, 0};
}

inline DirectionQuantization quantize_rvq_statistical(const ComplexVector& h, int bits, RngStream& rng)
{
    detail::require_nonzero(h, "rvq_statistical");
    const auto nt = static_cast<std::size_t>(h.size());
    const double sin2 = detail::sample_rvq_sin2(rng.uniform(), bits, nt);
    return {detail::place_at_angle(h, sin2, rng), sin2, 0, 0};
}

/// Statistical RVQ with the error scaled down by (nt-1)/nt, the expected
/// distortion of a codebook meeting the quantization upper bound.
inline DirectionQuantization quantize_idealized(const ComplexVector& h, int bits, RngStream& rng)
{
    detail::require_nonzero(h, "idealized");
    const auto nt = static_cast<std::size_t>(h.size());
    const double scale = static_cast<double>(nt - 1) / static_cast<double>(nt);
    const double sin2 = scale * detail::sample_rvq_sin2(rng.uniform(), bits, nt);
    return {detail::place_at_angle(h, sin2, rng), sin2, 0, 0};
}

/// Bits per scalar in the order phase_2, mag_2, phase_3, mag_3, ...; assigned
/// round-robin so leftovers go to lower-indexed components, phases first.
inline std::vector<int> scalar_bit_split(int bits, std::size_t nt)
{
    if (nt < 2)
        return {};
    std::vector<int> split(2 * (nt - 1), 0);
    for (int i = 0; i < bits; ++i)
        ++split[static_cast<std::size_t>(i) % split.size()];
    return split;
}

/// Midpoint of the uniform cell of [lo, hi] (2^bits cells) containing value.
inline double uniform_cell_midpoint(double value, double lo, double hi, int bits)
{
    const double cells = std::exp2(static_cast<double>(bits));
    const double width = (hi - lo) / cells;
    double idx = std::floor((value - lo) / width);
    idx = std::clamp(idx, 0.0, cells - 1.0);
    return lo + (idx + 0.5) * width;
}

/// Scalar quantization: every component is divided by h[0]; relative phases are
/// quantized on [-pi, pi] and arctan(|h_m|/|h_1|) on [0, pi/2].
inline DirectionQuantization quantize_scalar(const ComplexVector& h, int bits)
{
    detail::require_nonzero(h, "scalar");
    if (h[0] == Complex{0.0, 0.0})
        throw DomainError("scalar: degenerate pivot, first channel entry is zero");
    const auto nt = static_cast<std::size_t>(h.size());
    const std::vector<int> split = scalar_bit_split(bits, nt);

    ComplexVector v(h.size());
    v[0] = 1.0;
    for (std::size_t m = 1; m < nt; ++m) {
        const Complex rel = h[static_cast<Eigen::Index>(m)] / h[0];
        const double phase = uniform_cell_midpoint(std::arg(rel), -std::numbers::pi, std::numbers::pi,
                                                   split[2 * (m - 1)]);
        const double angle = uniform_cell_midpoint(std::atan(std::abs(rel)), 0.0, std::numbers::pi / 2.0,
                                                   split[2 * (m - 1) + 1]);
        v[static_cast<Eigen::Index>(m)] = std::polar(std::tan(angle), phase);
    }
    v /= v.norm();
    const double sin2 = detail::sin2_between(h, v);
    return {std::move(v), sin2, 0, 0};
}

inline DirectionQuantization quantize_perfect(const ComplexVector& h)
{
    detail::require_nonzero(h, "perfect");
    return {h / h.norm(), 0.0, 0, 0};
}

/// Common PU2RC codebook: 2^B / nt independent Haar orthonormal sets.
inline std::vector<OrthonormalSet> build_orthosets_codebook(int bits, std::size_t nt, RngStream& rng)
{
    QuantizerSpec{QuantizerKind::orthosets, bits, nt}.validate();
    const std::uint64_t sets = (std::uint64_t{1} << bits) / nt;
    std::vector<OrthonormalSet> codebook;
    codebook.reserve(sets);
    for (std::uint64_t s = 0; s < sets; ++s)
        codebook.push_back(haar_orthonormal_set(rng, static_cast<Eigen::Index>(nt)));
    return codebook;
}

/// Global best (set, beam) of a common orthonormal-set codebook.
inline DirectionQuantization quantize_to_orthosets(const ComplexVector& h,
                                                   const std::vector<OrthonormalSet>& codebook)
{
    if (codebook.empty())
        throw ConfigError("orthosets: empty codebook");
    detail::require_nonzero(h, "orthosets");
    std::size_t best_set = 0;
    Eigen::Index best_beam = 0;
    double best_power = -1.0;
    for (std::size_t s = 0; s < codebook.size(); ++s) {
        const ComplexMatrix& basis = codebook[s].basis;
        if (basis.rows() != h.size())
            throw ConfigError("orthosets: codebook dimension does not match channel");
        const Eigen::VectorXd powers = (basis.adjoint() * h).cwiseAbs2();
        Eigen::Index beam = 0;
        const double p = powers.maxCoeff(&beam);
        if (p > best_power) {
            best_power = p;
            best_set = s;
            best_beam = beam;
        }
    }
    ComplexVector w = codebook[best_set].beam(best_beam);
    const double sin2 = detail::sin2_between(h, w);
    return {std::move(w), sin2, best_set, static_cast<std::size_t>(best_beam)};
}

/// Quantizes with any per-user kind (everything except orthosets, which needs
/// a shared codebook).
inline DirectionQuantization quantize_direction(const ComplexVector& h, const QuantizerSpec& spec,
                                                RngStream& rng)
{
    switch (spec.kind) {
    case QuantizerKind::rvq_explicit: return quantize_rvq_explicit(h, spec.bits, rng);
    case QuantizerKind::rvq_statistical: return quantize_rvq_statistical(h, spec.bits, rng);
    case QuantizerKind::scalar: return quantize_scalar(h, spec.bits);
    case QuantizerKind::idealized: return quantize_idealized(h, spec.bits, rng);
    case QuantizerKind::perfect: return quantize_perfect(h);
    case QuantizerKind::orthosets:
        throw ConfigError("quantize_direction: orthosets requires a common codebook");
    }
    throw ConfigError("quantize_direction: unknown quantizer");
}

/// Uniform quantizer of a positive CQI in dB, relative to `reference`.
struct CqiQuantizerSpec {
    int bits = 4;
    double lo_db = -10.0;
    double hi_db = 15.0;
    double reference = 1.0; ///< linear value mapped to 0 dB (typically the mean CQI)

    void validate() const
    {
        if (bits < 1)
            throw ConfigError("cqi quantizer: bits must be >= 1");
        if (!(lo_db < hi_db))
            throw ConfigError("cqi quantizer: empty dB range");
        if (!(reference > 0.0))
            throw ConfigError("cqi quantizer: reference must be positive");
    }
};

/// Reconstructed linear CQI at the midpoint of its dB cell; values outside the
/// range (including 0) clamp to the edge cells.
inline double quantize_cqi(double value, const CqiQuantizerSpec& spec)
{
    spec.validate();
    const double db = value > 0.0 ? 10.0 * std::log10(value / spec.reference) : spec.lo_db;
    const double q_db = uniform_cell_midpoint(db, spec.lo_db, spec.hi_db, spec.bits);
    return spec.reference * std::pow(10.0, q_db / 10.0);
}

} // namespace fbsim

#endif
