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

#ifndef ADMA_RATES_HPP
#define ADMA_RATES_HPP

// SINR / spectral-efficiency evaluation for grouped ADMA.
//
// Users in one group share a time/frequency resource and see intra-group
// interference only; groups are orthogonal and weighted by their resource
// share S_g. Rates are in bits/s/Hz.

#include "adma/beam.hpp"
#include "adma/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

namespace adma
{
    // Powers for one group. per_beam[k] weights column k of a precoder.
    struct PowerBudget
    {
        double total_power = 1.0; // p, W
        double noise_power = 1.0; // sigma^2, W
        std::vector<double> per_beam;

        static PowerBudget equal_split(double total_power, double noise_power, std::size_t beams)
        {
            const double share = beams > 0 ? total_power / static_cast<double>(beams) : 0.0;
            return {total_power, noise_power, std::vector<double>(beams, share)};
        }

        void validate() const
        {
            if (!(total_power >= 0.0 && noise_power >= 0.0))
                throw std::invalid_argument("PowerBudget: powers must be nonnegative");
            double sum = 0.0;
            for (double p : per_beam)
            {
                if (!(p >= 0.0))
                    throw std::invalid_argument("PowerBudget: beam powers must be nonnegative");
                sum += p;
            }
            if (sum > total_power + 1e-12)
                throw std::invalid_argument("PowerBudget: beam powers exceed the total");
        }
    };

    // Cell-level powers; each group splits the total equally over its beams.
    struct LinkBudget
    {
        double total_power = 1.0;
        double noise_power = 1.0;

        static LinkBudget from(const SimParams &params) { return {params.tx_power_w(), params.noise_power_w()}; }
        PowerBudget for_group(std::size_t beams) const { return PowerBudget::equal_split(total_power, noise_power, beams); }
    };

    struct RateReport
    {
        std::vector<double> per_user;  // indexed by global user index
        std::vector<double> per_group; // R_{U_g}
        std::vector<double> shares;    // S_g
        double system = 0.0;           // sum_g S_g R_{U_g}
    };

    namespace detail
    {
        inline double sinr_rate(std::span<const cplx> received, std::size_t k, std::span<const double> beam_power, double noise)
        {
            double interference = 0.0;
            for (std::size_t i = 0; i < received.size(); ++i)
                if (i != k)
                    interference += beam_power[i] * std::norm(received[i]);
            return std::log2(1.0 + beam_power[k] * std::norm(received[k]) / (interference + noise));
        }
    } // namespace detail

    // Rate of user k of a group given its channels and precoder.
    inline double user_rate(const ChannelMatrix &h_group, const PrecodingMatrix &p_group, std::size_t k,
                            const PowerBudget &budget)
    {
        const auto m = h_group.n_users();
        if (k >= m || p_group.n_beams() != m || budget.per_beam.size() != m ||
            p_group.columns.rows() != static_cast<Eigen::Index>(h_group.n_antennas()))
            throw std::invalid_argument("user_rate: inconsistent dimensions");
        const Eigen::RowVectorXcd received = h_group.matrix().row(static_cast<Eigen::Index>(k)) * p_group.columns;
        return detail::sinr_rate(std::span<const cplx>(received.data(), m), k, budget.per_beam, budget.noise_power);
    }

    inline std::vector<double> group_rates(const ChannelMatrix &h_group, const PrecodingMatrix &p_group,
                                           const PowerBudget &budget)
    {
        std::vector<double> r(h_group.n_users());
        for (std::size_t k = 0; k < r.size(); ++k)
            r[k] = user_rate(h_group, p_group, k, budget);
        return r;
    }

    inline double group_sum_rate(const ChannelMatrix &h_group, const PrecodingMatrix &p_group, const PowerBudget &budget)
    {
        const auto r = group_rates(h_group, p_group, budget);
        return std::accumulate(r.begin(), r.end(), 0.0);
    }

    // Largest intra-group interference power seen by any user, over sigma^2.
    inline double max_interference_to_noise(const ChannelMatrix &h_group, const PrecodingMatrix &p_group,
                                            const PowerBudget &budget)
    {
        const CMatrix hp = h_group.matrix() * p_group.columns;
        double worst = 0.0;
        for (Eigen::Index k = 0; k < hp.rows(); ++k)
        {
            double interference = 0.0;
            for (Eigen::Index i = 0; i < hp.cols(); ++i)
                if (i != k)
                    interference += budget.per_beam[static_cast<std::size_t>(i)] * std::norm(hp(k, i));
            worst = std::max(worst, interference / budget.noise_power);
        }
        return worst;
    }

    inline std::vector<double> equal_shares(std::size_t groups)
    {
        return std::vector<double>(groups, 1.0 / static_cast<double>(groups));
    }

    inline void check_shares(std::span<const double> shares, std::size_t groups)
    {
        if (shares.size() != groups)
            throw std::invalid_argument("resource shares: one share per group required");
        double sum = 0.0;
        for (double s : shares)
        {
            if (!(s > 0.0))
                throw std::invalid_argument("resource shares must be positive");
            sum += s;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("resource shares must sum to 1");
    }

    // System rate of a grouping: per-group precoding, equal beam power within
    // a group, groups weighted by their resource shares (default 1/G).
    inline RateReport system_sum_rate(const ChannelMatrix &h, std::span<const std::vector<std::size_t>> groups,
                                      PrecoderKind kind, const LinkBudget &link, std::vector<double> shares = {})
    {
        if (shares.empty())
            shares = equal_shares(groups.size());
        check_shares(shares, groups.size());

        RateReport report;
        report.per_user.assign(h.n_users(), 0.0);
        report.per_group.assign(groups.size(), 0.0);
        for (std::size_t g = 0; g < groups.size(); ++g)
        {
            if (groups[g].empty())
                continue;
            const auto hg = h.subset(groups[g]);
            const auto pg = make_precoder(kind, hg, link.noise_power);
            const auto rates = group_rates(hg, pg, link.for_group(groups[g].size()));
            for (std::size_t i = 0; i < rates.size(); ++i)
            {
                report.per_user[groups[g][i]] = rates[i];
                report.per_group[g] += rates[i];
            }
            report.system += shares[g] * report.per_group[g];
        }
        report.shares = std::move(shares);
        return report;
    }

    // ---------------------------------------------------------------------
    // Rates evaluated from the Gram matrix H H^H alone. For P' = H^H X the
    // received matrix is H P' = J X and ||P'||_F^2 = tr(X^H J X), so a group
    // never needs its N-dimensional channel once J is known. Grouping searches
    // use this to score many candidate groups cheaply.

    class GramRateEvaluator
    {
    public:
        GramRateEvaluator(const ChannelMatrix &h, PrecoderKind kind, const LinkBudget &link)
            : gram_(h.gram()), kind_(kind), link_(link)
        {
            if (kind == PrecoderKind::ZfNeighborApprox)
                throw std::invalid_argument("GramRateEvaluator: unsupported precoder");
        }

        std::size_t n_users() const { return static_cast<std::size_t>(gram_.rows()); }

        std::vector<double> group_rates(std::span<const std::size_t> users) const
        {
            const auto m = static_cast<Eigen::Index>(users.size());
            if (m == 0)
                return {};
            CMatrix j(m, m);
            for (Eigen::Index a = 0; a < m; ++a)
                for (Eigen::Index b = 0; b < m; ++b)
                    j(a, b) = gram_(static_cast<Eigen::Index>(users[a]), static_cast<Eigen::Index>(users[b]));

            const auto budget = link_.for_group(users.size());
            std::vector<double> out(users.size());

            if (kind_ == PrecoderKind::Zf)
            {
                // H P' = I exactly, so every user sees 1 / ||P'||_F and no interference
                const CMatrix x = regularized_gram_inverse(j);
                const double fro2 = x.trace().real();
                for (std::size_t k = 0; k < users.size(); ++k)
                    out[k] = std::log2(1.0 + budget.per_beam[k] / (fro2 * budget.noise_power));
                return out;
            }

            CMatrix received;
            double fro2 = 0.0;
            if (kind_ == PrecoderKind::Mrt)
            {
                received = j;
                fro2 = j.trace().real();
            }
            else
            {
                const CMatrix x = regularized_gram_inverse(j, link_.noise_power);
                received = j * x;
                fro2 = (x.adjoint() * received).trace().real();
            }
            if (!(fro2 > 0.0))
                throw std::invalid_argument("GramRateEvaluator: degenerate group");
            received /= std::sqrt(fro2);

            std::vector<cplx> row(users.size());
            for (std::size_t k = 0; k < users.size(); ++k)
            {
                for (std::size_t i = 0; i < users.size(); ++i)
                    row[i] = received(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
                out[k] = detail::sinr_rate(row, k, budget.per_beam, budget.noise_power);
            }
            return out;
        }

        double group_sum_rate(std::span<const std::size_t> users) const
        {
            const auto r = group_rates(users);
            return std::accumulate(r.begin(), r.end(), 0.0);
        }

        // Equal shares 1/G.
        double system_rate(std::span<const std::vector<std::size_t>> groups) const
        {
            double total = 0.0;
            for (const auto &g : groups)
                total += group_sum_rate(g);
            return total / static_cast<double>(groups.size());
        }

    private:
        CMatrix gram_;
        PrecoderKind kind_;
        LinkBudget link_;
    };

    // ---------------------------------------------------------------------
    // High-SNR approximation of a ZF user rate from angular spacing alone.

    // Gamma_k = p_k |beta_k|^2 / (zeta_k^2 sigma^2)
    inline double gamma_coefficient(double beam_power, double beta_abs, double zeta, double noise_power)
    {
        return beam_power * beta_abs * beta_abs / (zeta * zeta * noise_power);
    }

    // log2(Gamma N^4) - (2/N^2) (Omega(t_{k-,k}) + Omega(t_{k,k+})); a boundary
    // user has only one neighbour term.
    inline double approx_user_rate(std::span<const double> sorted_group_angles, std::size_t k, double gamma_k,
                                   std::size_t n)
    {
        if (k >= sorted_group_angles.size())
            throw std::out_of_range("approx_user_rate: user index out of range");
        const double nd = static_cast<double>(n);
        double attenuation = 0.0;
        if (k > 0)
            attenuation += omega(std::cos(sorted_group_angles[k - 1]) - std::cos(sorted_group_angles[k]), n);
        if (k + 1 < sorted_group_angles.size())
            attenuation += omega(std::cos(sorted_group_angles[k]) - std::cos(sorted_group_angles[k + 1]), n);
        return std::log2(gamma_k * nd * nd * nd * nd) - 2.0 / (nd * nd) * attenuation;
    }

    // ---------------------------------------------------------------------
    // Spacing objectives. Members of every group are ordered by coordinate and
    // the gain function is summed over adjacent differences, averaged over G.

    using SpacingGain = std::function<double(double)>;

    // sqrt|x|: symmetric, increasing and strictly concave for x > 0
    inline double sqrt_gain(double x) { return std::sqrt(std::abs(x)); }

    // -Omega(x), which is only increasing and concave on (1/N, 2/N).
    inline SpacingGain neg_omega_gain(std::size_t n)
    {
        return [n](double x)
        {
            const double a = std::abs(x), nd = static_cast<double>(n);
            if (a < 1.0 / nd || a > 2.0 / nd)
                throw std::domain_error("neg_omega_gain: spacing outside (1/N, 2/N)");
            return -omega(x, n);
        };
    }

    struct ObjectiveValue
    {
        double value = 0.0;
        std::size_t empty_groups = 0;
    };

    inline ObjectiveValue spacing_objective(std::span<const std::vector<std::size_t>> groups,
                                            std::span<const double> coords, const SpacingGain &gain)
    {
        ObjectiveValue out;
        if (groups.empty())
            return out;
        std::vector<double> c;
        for (const auto &g : groups)
        {
            if (g.empty())
            {
                ++out.empty_groups;
                continue;
            }
            c.clear();
            for (auto u : g)
                c.push_back(coords[u]);
            std::sort(c.begin(), c.end());
            for (std::size_t i = 0; i + 1 < c.size(); ++i)
                out.value += gain(c[i + 1] - c[i]);
        }
        out.value /= static_cast<double>(groups.size());
        return out;
    }

    // P2: concave gain of adjacent azimuth gaps.
    inline double p2_objective(std::span<const std::vector<std::size_t>> groups, std::span<const double> angles,
                               const SpacingGain &gain = sqrt_gain)
    {
        return spacing_objective(groups, angles, gain).value;
    }

    // P1: -Omega of adjacent cosine-domain gaps.
    inline double p1_objective(std::span<const std::vector<std::size_t>> groups, std::span<const double> angles,
                               std::size_t n)
    {
        std::vector<double> cosines(angles.size());
        std::transform(angles.begin(), angles.end(), cosines.begin(), [](double a) { return std::cos(a); });
        return spacing_objective(groups, cosines, [n](double t) { return -omega(t, n); }).value;
    }

} // namespace adma

#endif
