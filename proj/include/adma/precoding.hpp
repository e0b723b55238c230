// SPDX-License-Identifier: Apache-2.0
//
// adma-sim: link-level simulator for mmWave angle-division multiple access
// Copyright (C) 2026 The adma-sim authors
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

#ifndef ADMA_PRECODING_HPP
#define ADMA_PRECODING_HPP

#include "adma/beam.hpp"
#include "adma/channel.hpp"

#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace adma
{
    enum class PrecoderKind
    {
        Mrt,
        Zf,
        Mmse,
        ZfNeighborApprox
    };

    inline std::string_view to_string(PrecoderKind kind)
    {
        switch (kind)
        {
        case PrecoderKind::Mrt:
            return "MRT";
        case PrecoderKind::Zf:
            return "ZF";
        case PrecoderKind::Mmse:
            return "MMSE";
        case PrecoderKind::ZfNeighborApprox:
            return "ZF_NEIGHBOR_APPROX";
        }
        return "?";
    }

    inline std::optional<PrecoderKind> parse_precoder(std::string_view name)
    {
        for (auto kind : {PrecoderKind::Mrt, PrecoderKind::Zf, PrecoderKind::Mmse, PrecoderKind::ZfNeighborApprox})
            if (to_string(kind) == name)
                return kind;
        return std::nullopt;
    }

    // N x K precoder, column k serves user k. MRT/ZF/MMSE outputs have unit
    // Frobenius norm; the neighbour approximation has unit-norm columns.
    struct PrecodingMatrix
    {
        CMatrix columns;
        PrecoderKind method = PrecoderKind::Mrt;

        std::size_t n_beams() const { return static_cast<std::size_t>(columns.cols()); }
        CVector column(std::size_t k) const { return columns.col(static_cast<Eigen::Index>(k)); }
    };

    namespace detail
    {
        // Most collinear pair of rows of the channel behind a Gram matrix.
        inline std::pair<std::size_t, std::size_t> most_correlated_pair(const CMatrix &gram)
        {
            std::pair<std::size_t, std::size_t> best{0, gram.rows() > 1 ? 1 : 0};
            double best_corr = -1.0;
            for (Eigen::Index i = 0; i < gram.rows(); ++i)
                for (Eigen::Index j = i + 1; j < gram.rows(); ++j)
                {
                    const double den = std::sqrt(std::abs(gram(i, i).real() * gram(j, j).real()));
                    const double c = den > 0.0 ? std::abs(gram(i, j)) / den : 1.0;
                    if (c > best_corr)
                    {
                        best_corr = c;
                        best = {static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
                    }
                }
            return best;
        }
    } // namespace detail

    // Largest condition number accepted before a Gram matrix counts as singular.
    inline constexpr double max_gram_condition = 1e12;

    // (J + reg I)^{-1} for a Hermitian PSD Gram matrix J. The matrix is
    // symmetrically equilibrated first, so the condition estimate reflects
    // collinearity of the users rather than their path-loss spread.
    inline CMatrix regularized_gram_inverse(const CMatrix &gram, double reg = 0.0)
    {
        const Eigen::Index k = gram.rows();
        Eigen::VectorXd scale(k);
        for (Eigen::Index i = 0; i < k; ++i)
        {
            const double d = gram(i, i).real() + reg;
            if (!(d > 0.0))
            {
                const auto pair = detail::most_correlated_pair(gram);
                throw SingularGramError(pair.first, pair.second, std::numeric_limits<double>::infinity());
            }
            scale[i] = 1.0 / std::sqrt(d);
        }

        CMatrix a = scale.asDiagonal() * gram * scale.asDiagonal();
        a.diagonal().array() += reg * scale.array().square();
        a = 0.5 * (a + a.adjoint()).eval();

        const CMatrix eye = CMatrix::Identity(k, k);
        Eigen::LLT<CMatrix> llt(a);
        if (llt.info() == Eigen::Success && (reg > 0.0 || llt.rcond() * max_gram_condition >= 1.0))
            return scale.asDiagonal() * llt.solve(eye) * scale.asDiagonal();

        // the spectrum decides borderline cases; LU condition estimates can
        // miss exact rank deficiency
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
        const Eigen::VectorXd lambda = eig.eigenvalues();
        const double lmin = lambda.minCoeff();
        const double lmax = lambda.maxCoeff();
        // a positive regularizer always leaves an invertible matrix
        if (reg == 0.0 && !(lmin > 0.0 && lmax <= lmin * max_gram_condition))
        {
            const auto pair = detail::most_correlated_pair(gram);
            throw SingularGramError(pair.first, pair.second,
                                    lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity());
        }
        const CMatrix inv_a = eig.eigenvectors() * lambda.cwiseInverse().asDiagonal() * eig.eigenvectors().adjoint();
        return scale.asDiagonal() * inv_a * scale.asDiagonal();
    }

    inline PrecodingMatrix normalized(CMatrix p, PrecoderKind kind)
    {
        const double fro = p.norm();
        if (!(fro > 0.0) || !std::isfinite(fro))
            throw std::invalid_argument("precoder: degenerate (zero) channel matrix");
        p /= fro;
        return {std::move(p), kind};
    }

    // P' = H^H
    inline PrecodingMatrix mrt(const ChannelMatrix &h)
    {
        return normalized(h.matrix().adjoint(), PrecoderKind::Mrt);
    }

    // P' = H^H (H H^H)^{-1}
    inline PrecodingMatrix zf(const ChannelMatrix &h)
    {
        if (h.n_users() > h.n_antennas())
            throw std::invalid_argument("zf: more users than antennas");
        return normalized(h.matrix().adjoint() * regularized_gram_inverse(h.gram()), PrecoderKind::Zf);
    }

    // P' = H^H (H H^H + sigma^2 I)^{-1}
    inline PrecodingMatrix mmse(const ChannelMatrix &h, double noise_power)
    {
        if (!(noise_power >= 0.0))
            throw std::invalid_argument("mmse: noise power must be nonnegative");
        if (noise_power == 0.0 && h.n_users() > h.n_antennas())
            throw std::invalid_argument("mmse: unregularized inverse needs K <= N");
        return normalized(h.matrix().adjoint() * regularized_gram_inverse(h.gram(), noise_power), PrecoderKind::Mmse);
    }

    inline PrecodingMatrix make_precoder(PrecoderKind kind, const ChannelMatrix &h, double noise_power)
    {
        switch (kind)
        {
        case PrecoderKind::Mrt:
            return mrt(h);
        case PrecoderKind::Zf:
            return zf(h);
        case PrecoderKind::Mmse:
            return mmse(h, noise_power);
        case PrecoderKind::ZfNeighborApprox:
            break;
        }
        throw std::invalid_argument("make_precoder: the neighbour approximation needs sorted angles, not a channel matrix");
    }

    // ---------------------------------------------------------------------
    // Closed-form zero forcing for a pair of pure-LOS users.
    //
    // The column for user j is a signal beam N a_j^H minus a cancellation
    // beam aimed at user k with weight a_k a_j^H, which is exactly what
    // leaks into user k from the signal beam.

    struct PairZfDecomposition
    {
        CVector signal_beam;       // N a_j^H
        CVector cancel_beam;       // (a_k a_j^H) a_k^H
        CVector column;            // normalized ZF column p_j of the 2-user precoder
        double received_amplitude; // h_j p_j
        double inv_coeff;          // |b_j|^2 |b_k|^2 (N^2 - Omega(t_{j,k}))
    };

    inline PairZfDecomposition pair_zf(const UserChannel &hj, const UserChannel &hk, double spacing_ratio = 0.5)
    {
        if (!hj.nlos.empty() || !hk.nlos.empty())
            throw std::invalid_argument("pair_zf: closed form requires pure-LOS channels");
        const auto n = static_cast<std::size_t>(hj.vector.size());
        if (hk.vector.size() != hj.vector.size())
            throw std::invalid_argument("pair_zf: channel lengths differ");
        if (hj.los.doa == hk.los.doa)
            throw SingularGramError(0, 1, std::numeric_limits<double>::infinity());

        const double nd = static_cast<double>(n);
        const double bj2 = std::norm(hj.los.gain);
        const double bk2 = std::norm(hk.los.gain);
        const double t = AngularSpacing::between(hj.los.doa, hk.los.doa).t;
        const double om = omega(2.0 * spacing_ratio * t, n);

        PairZfDecomposition out;
        const CVector aj = steering_vector_at(hj.los.doa, n, spacing_ratio);
        const CVector ak = steering_vector_at(hk.los.doa, n, spacing_ratio);
        out.signal_beam = nd * aj.conjugate();
        out.cancel_beam = array_sum(-t, n, spacing_ratio) * ak.conjugate();
        out.inv_coeff = bj2 * bk2 * (nd * nd - om);
        if (!(out.inv_coeff > 0.0))
            throw SingularGramError(0, 1, std::numeric_limits<double>::infinity());

        out.column = (bk2 * std::conj(hj.los.gain) / (std::sqrt(nd * out.inv_coeff) * std::sqrt(bj2 + bk2))) *
                     (out.signal_beam - out.cancel_beam);
        out.received_amplitude = std::sqrt(bj2 * bk2) * std::sqrt(nd * nd - om) / std::sqrt(nd * (bj2 + bk2));
        return out;
    }

    // Both columns of the closed-form 2-user ZF precoder.
    inline PrecodingMatrix pair_zf_precoder(const UserChannel &hj, const UserChannel &hk, double spacing_ratio = 0.5)
    {
        CMatrix p(hj.vector.size(), 2);
        p.col(0) = pair_zf(hj, hk, spacing_ratio).column;
        p.col(1) = pair_zf(hk, hj, spacing_ratio).column;
        return {std::move(p), PrecoderKind::Zf};
    }

    // Closed-form inverse of the 2x2 Gram matrix of two pure-LOS users.
    inline CMatrix pair_gram_inverse(cplx beta_j, cplx beta_k, double theta_j, double theta_k, std::size_t n,
                                     double spacing_ratio = 0.5)
    {
        const double nd = static_cast<double>(n);
        const double t = AngularSpacing::between(theta_j, theta_k).t;
        const cplx s_jk = array_sum(t, n, spacing_ratio);
        const cplx s_kj = array_sum(-t, n, spacing_ratio);
        const double inv = std::norm(beta_j) * std::norm(beta_k) * (nd * nd - omega(2.0 * spacing_ratio * t, n));
        CMatrix m(2, 2);
        m(0, 0) = std::norm(beta_k) * nd;
        m(0, 1) = -beta_j * std::conj(beta_k) * s_jk;
        m(1, 0) = -std::conj(beta_j) * beta_k * s_kj;
        m(1, 1) = std::norm(beta_j) * nd;
        return m / inv;
    }

    // ---------------------------------------------------------------------
    // Neighbour approximation of multi-user ZF: each beam only cancels the
    // leakage into its angular neighbours. Boundary users have one neighbour.

    inline CVector neighbor_zf_bracket(std::span<const double> sorted_angles, std::size_t j, std::size_t n,
                                       double spacing_ratio = 0.5)
    {
        const double nd = static_cast<double>(n);
        CVector v = nd * steering_vector_at(sorted_angles[j], n, spacing_ratio).conjugate();
        auto cancel = [&](std::size_t i)
        {
            const double t_ij = std::cos(sorted_angles[i]) - std::cos(sorted_angles[j]);
            v -= array_sum(t_ij, n, spacing_ratio) * steering_vector_at(sorted_angles[i], n, spacing_ratio).conjugate();
        };
        if (j > 0)
            cancel(j - 1);
        if (j + 1 < sorted_angles.size())
            cancel(j + 1);
        return v;
    }

    inline PrecodingMatrix zf_neighbor_approx(std::span<const double> sorted_angles, std::size_t n,
                                              double spacing_ratio = 0.5)
    {
        if (sorted_angles.size() < 3)
            throw std::invalid_argument("zf_neighbor_approx: needs at least 3 users");
        for (std::size_t i = 1; i < sorted_angles.size(); ++i)
            if (!(sorted_angles[i] > sorted_angles[i - 1]))
                throw std::invalid_argument("zf_neighbor_approx: users must be strictly increasing in angle");

        CMatrix p(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(sorted_angles.size()));
        for (std::size_t j = 0; j < sorted_angles.size(); ++j)
        {
            CVector v = neighbor_zf_bracket(sorted_angles, j, n, spacing_ratio);
            p.col(static_cast<Eigen::Index>(j)) = v / v.norm();
        }
        return {std::move(p), PrecoderKind::ZfNeighborApprox};
    }

} // namespace adma

#endif
