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

#ifndef FBSIM_NUMERICS_HPP
#define FBSIM_NUMERICS_HPP

#include "fbsim/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace fbsim {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Squared magnitude of the Hermitian inner product a^H b.
inline double inner_power(const ComplexVector& a, const ComplexVector& b)
{
    return std::norm(a.dot(b));
}

/// Seeded random stream. Every Monte Carlo trial owns one stream keyed by
/// (seed, stream_id); equal keys reproduce identical draw sequences.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id)
    {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id),
                          static_cast<std::uint32_t>(stream_id >> 32), 0x9e3779b9u};
        engine_.seed(seq);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Uniform on [0, 1).
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    double normal() { return normal_(engine_); }

    /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
    Complex complex_gaussian(double variance = 1.0)
    {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

    ComplexVector complex_gaussian_vector(Eigen::Index n, double variance = 1.0)
    {
        ComplexVector v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v[i] = complex_gaussian(variance);
        return v;
    }

    /// Uniformly distributed unit vector in C^n.
    ComplexVector isotropic_unit_vector(Eigen::Index n)
    {
        ComplexVector v = complex_gaussian_vector(n);
        return v / v.norm();
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// N unit-norm, mutually orthogonal vectors stored as the columns of `basis`.
struct OrthonormalSet {
    ComplexMatrix basis;

    Eigen::Index size() const { return basis.cols(); }
    Eigen::Index dimension() const { return basis.rows(); }
    ComplexVector beam(Eigen::Index i) const { return basis.col(i); }
};

/// Haar-distributed unitary basis: QR of an i.i.d. complex Gaussian matrix with
/// the phases of diag(R) absorbed into Q so the law is rotation invariant.
inline OrthonormalSet haar_orthonormal_set(RngStream& rng, Eigen::Index n)
{
    if (n < 1)
        throw DomainError("haar_orthonormal_set: dimension must be >= 1");
    ComplexMatrix g(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            g(r, c) = rng.complex_gaussian();
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(n, n);
    const ComplexMatrix& packed = qr.matrixQR();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex d = packed(i, i);
        const double mag = std::abs(d);
        if (mag > 0.0)
            q.col(i) *= d / mag;
    }
    return OrthonormalSet{std::move(q)};
}

/// Singular-value ratio below which a set of channel directions is rank deficient.
inline constexpr double kSingularRatio = 1e-9;

/// Zero-forcing beam directions for the given (quantized) channels.
///
/// Returns unit vectors v_k with h_j^H v_k = 0 for j != k. Computed from the
/// pseudo-inverse H^H (H H^H)^{-1} of the stacked conjugated rows, each column
/// normalized. Throws SingularSetError when sigma_min < 1e-9 sigma_max.
inline std::vector<ComplexVector> zf_directions(std::span<const ComplexVector> channels)
{
    const auto n = static_cast<Eigen::Index>(channels.size());
    if (n == 0)
        throw DomainError("zf_directions: empty channel set");
    const Eigen::Index nt = channels.front().size();
    if (n > nt)
        throw SingularSetError("zf_directions: more channels than antennas");

    ComplexMatrix h(n, nt);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (channels[static_cast<std::size_t>(k)].size() != nt)
            throw DomainError("zf_directions: inconsistent channel dimensions");
        h.row(k) = channels[static_cast<std::size_t>(k)].adjoint();
    }

    const ComplexMatrix gram = h * h.adjoint();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(gram, Eigen::EigenvaluesOnly);
    const double lmax = eig.eigenvalues().maxCoeff();
    const double lmin = eig.eigenvalues().minCoeff();
    if (!(lmax > 0.0) || lmin <= 0.0 || std::sqrt(lmin / lmax) < kSingularRatio)
        throw SingularSetError("zf_directions: rank-deficient channel set");

    const ComplexMatrix pinv = h.adjoint() * gram.ldlt().solve(ComplexMatrix::Identity(n, n));
    std::vector<ComplexVector> out;
    out.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k)
        out.emplace_back(pinv.col(k) / pinv.col(k).norm());
    return out;
}

/// Lower branch W_{-1} of the Lambert W function on [-1/e, 0).
///
/// Starts from the branch-point series near -1/e and from the two-term
/// asymptotic expansion log(-x) - log(-log(-x)) elsewhere, then runs Halley
/// steps until the step is below 1e-12 (relative).
inline double lambert_w_m1(double x)
{
    constexpr double inv_e = 1.0 / std::numbers::e;
    if (!(x >= -inv_e && x < 0.0))
        throw DomainError("lambert_w_m1: argument must lie in [-1/e, 0)");

    const double q = 1.0 + std::numbers::e * x; // distance from the branch point
    if (q <= 1e-300)
        return -1.0;

    double w;
    if (x < -0.25) {
        const double p = -std::sqrt(2.0 * q);
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else {
        const double l1 = std::log(-x);
        w = l1 - std::log(-l1);
    }

    for (int iter = 0; iter < 64; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0)
            break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 1e-12 * (1.0 + std::abs(w)))
            break;
    }
    return std::min(w, -1.0);
}

enum class GammaMaxForm {
    harmonic_sum,      ///< sum_{k=1}^{K N_t} 1/k
    log_plus_euler,    ///< log(K N_t) + gamma
    log_only,          ///< log(K N_t), Euler-Mascheroni constant dropped
};

/// Approximations to E[max of K i.i.d. Gamma(N_t, 1)] (the largest of K channel norms).
inline double max_gamma_expectation(std::size_t k_users, std::size_t nt,
                                    GammaMaxForm form = GammaMaxForm::harmonic_sum)
{
    if (k_users == 0 || nt == 0)
        throw DomainError("max_gamma_expectation: counts must be >= 1");
    const double kn = static_cast<double>(k_users) * static_cast<double>(nt);
    switch (form) {
    case GammaMaxForm::harmonic_sum: {
        double sum = 0.0;
        // smallest terms first
        for (std::size_t i = k_users * nt; i >= 1; --i)
            sum += 1.0 / static_cast<double>(i);
        return sum;
    }
    case GammaMaxForm::log_plus_euler:
        return std::log(kn) + std::numbers::egamma;
    case GammaMaxForm::log_only:
        return std::log(kn);
    }
    return 0.0;
}

} // namespace fbsim

#endif
