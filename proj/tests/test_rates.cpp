// SPDX-License-Identifier: Apache-2.0
//
// adma-sim: cell_link-level simulator for mmWave angle-division multiple access
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

#include "adma/grouping.hpp"
#include "adma/rates.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace adma;

namespace
{
    struct Instance
    {
        std::vector<UserChannel> users;
        ChannelMatrix h;
        std::vector<double> angles;
    };

    Instance draw(std::size_t k, std::uint64_t seed, std::size_t n = 128)
    {
        SimParams p;
        p.n_antennas = n;
        Rng rng(seed);
        Instance out;
        for (const auto &g : place_users(p, k, rng))
            out.users.push_back(draw_user_channel(p, g, rng));
        out.h = channel_matrix(out.users);
        for (const auto &u : out.users)
            out.angles.push_back(u.los.doa);
        return out;
    }

    UserChannel los_user(double theta, cplx gain, std::size_t n) { return make_user_channel({theta, gain}, {}, n); }

    const LinkBudget cell_link = LinkBudget::from(SimParams{});
} // namespace

TEST(UserRate, NoInterferenceReducesToSnr)
{
    const std::size_t n = 32;
    const std::vector<CVector> rows{2.0 * oracle::steering(0.0, n), 0.5 * oracle::steering(4.0 / n, n)};
    const auto h = channel_matrix(rows);
    const auto p = mrt(h);
    const PowerBudget b{3.0, 0.1, {1.2, 1.8}};
    for (std::size_t k = 0; k < 2; ++k)
    {
        const double s = std::norm(h.matrix().row(static_cast<Eigen::Index>(k)).dot(p.column(k).conjugate()));
        EXPECT_NEAR(user_rate(h, p, k, b), std::log2(1.0 + s * b.per_beam[k] / 0.1), 1e-10);
    }
}

TEST(UserRate, VanishesAsNoiseGrows)
{
    const auto inst = draw(4, 2);
    const auto p = mmse(inst.h, cell_link.noise_power);
    double prev = 1e300;
    for (double noise = 1e-14; noise < 1e6; noise *= 10.0)
    {
        const double r = user_rate(inst.h, p, 1, PowerBudget::equal_split(100.0, noise, 4));
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, prev);
        prev = r;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(UserRate, MonotoneInOwnBeamPower)
{
    const auto inst = draw(5, 3);
    const auto p = mrt(inst.h);
    auto b = PowerBudget::equal_split(10.0, cell_link.noise_power, 5);
    double prev = -1.0;
    for (double pk = 0.0; pk <= 2.0; pk += 0.25)
    {
        b.per_beam[2] = pk;
        const double r = user_rate(inst.h, p, 2, b);
        EXPECT_GE(r, prev);
        prev = r;
    }
}

TEST(UserRate, PairZfClosedFormRate)
{
    Rng rng(12);
    std::uniform_real_distribution<double> ang(pi / 6, 5 * pi / 6), dist(10.0, 300.0), ph(0.0, 2 * pi);
    for (int rep = 0; rep < 50; ++rep)
    {
        auto gain = [&] { return std::polar(path_amplitude(path_loss_db(PathKind::Los, dist(rng), 28000.0, 0.0)), ph(rng)); };
        const auto a = los_user(ang(rng), gain(), 128), b = los_user(ang(rng), gain(), 128);
        const std::vector<UserChannel> users{a, b};
        const auto h = channel_matrix(users);
        const auto budget = cell_link.for_group(2);
        const double amp = pair_zf(a, b).received_amplitude;
        const double closed = std::log2(1.0 + budget.per_beam[0] * amp * amp / budget.noise_power);
        EXPECT_NEAR(user_rate(h, zf(h), 0, budget), closed, 1e-8);
    }
}

TEST(SystemRate, SingleGroupIsGroupSum)
{
    const auto inst = draw(6, 4);
    const std::vector<std::vector<std::size_t>> groups{{0, 1, 2, 3, 4, 5}};
    const auto r = system_sum_rate(inst.h, groups, PrecoderKind::Zf, cell_link);
    EXPECT_NEAR(r.system, group_sum_rate(inst.h, zf(inst.h), cell_link.for_group(6)), 1e-12);
}

TEST(SystemRate, TwoIdenticalGroups)
{
    auto inst = draw(3, 5);
    std::vector<UserChannel> doubled = inst.users;
    doubled.insert(doubled.end(), inst.users.begin(), inst.users.end());
    const auto h = channel_matrix(doubled);
    const std::vector<std::vector<std::size_t>> groups{{0, 1, 2}, {3, 4, 5}};
    const auto r = system_sum_rate(h, groups, PrecoderKind::Mmse, cell_link, {0.5, 0.5});
    EXPECT_NEAR(r.system, r.per_group[0], 1e-12);
    EXPECT_NEAR(r.per_group[0], r.per_group[1], 1e-12);
}

TEST(SystemRate, MatchesIndependentWeightedSum)
{
    const auto inst = draw(12, 6);
    Rng rng(1);
    const auto grouping = random_grouping(12, 4, rng);
    const std::vector<double> shares{0.1, 0.2, 0.3, 0.4};
    const auto r = system_sum_rate(inst.h, grouping.groups, PrecoderKind::Zf, cell_link, shares);
    double expected = 0.0;
    for (std::size_t g = 0; g < 4; ++g)
    {
        const auto sub = inst.h.subset(grouping.groups[g]).matrix();
        expected += shares[g] * oracle::group_rate(sub, oracle::zf_pinv(sub), cell_link.total_power / 3.0, cell_link.noise_power);
    }
    EXPECT_NEAR(r.system, expected, 1e-9 * expected);

    const auto even = system_sum_rate(inst.h, grouping.groups, PrecoderKind::Zf, cell_link);
    const double mean = std::accumulate(even.per_group.begin(), even.per_group.end(), 0.0) / 4.0;
    EXPECT_NEAR(even.system, mean, 1e-12 * mean);
    for (double u : even.per_user)
        EXPECT_GE(u, 0.0);
}

TEST(SystemRate, ShareValidation)
{
    const auto inst = draw(4, 7);
    const std::vector<std::vector<std::size_t>> groups{{0, 1}, {2, 3}};
    EXPECT_THROW(system_sum_rate(inst.h, groups, PrecoderKind::Zf, cell_link, {0.5, 0.6}), std::invalid_argument);
    EXPECT_THROW(system_sum_rate(inst.h, groups, PrecoderKind::Zf, cell_link, {1.0}), std::invalid_argument);
    EXPECT_THROW(system_sum_rate(inst.h, groups, PrecoderKind::Zf, cell_link, {1.0, 0.0}), std::invalid_argument);
}

TEST(SystemRate, ZfGroupsSeeNoInterference)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        const auto inst = draw(16, 40 + seed);
        for (const auto &g : aseg(inst.angles, 4).groups)
        {
            const auto hg = inst.h.subset(g);
            EXPECT_LE(max_interference_to_noise(hg, zf(hg), cell_link.for_group(g.size())), 1e-8);
        }
    }
}

TEST(GramEvaluator, AgreesWithPrecoderPipeline)
{
    for (auto kind : {PrecoderKind::Mrt, PrecoderKind::Zf, PrecoderKind::Mmse})
        for (std::uint64_t seed = 1; seed <= 5; ++seed)
        {
            const auto inst = draw(12, 70 + seed);
            Rng rng(seed);
            const auto grouping = random_grouping(12, 3, rng);
            const GramRateEvaluator eval(inst.h, kind, cell_link);
            const double pipeline = system_sum_rate(inst.h, grouping.groups, kind, cell_link).system;
            EXPECT_NEAR(eval.system_rate(grouping.groups), pipeline, 1e-9 * pipeline) << to_string(kind);
        }
}

TEST(ApproxRate, NoAttenuationAtNulls)
{
    const std::size_t n = 64;
    // successive cosines 2/N apart: every neighbour sits on a null
    const std::vector<double> angles{std::acos(2.0 / n), std::acos(0.0), std::acos(-2.0 / n)};
    for (std::size_t k = 0; k < 3; ++k)
        EXPECT_NEAR(approx_user_rate(angles, k, 3.0, n), std::log2(3.0 * std::pow(64.0, 4)), 1e-9);
}

TEST(ApproxRate, MiddleUserPaysTwice)
{
    const std::size_t n = 64;
    const double s = 1.3 / n;
    const std::vector<double> angles{std::acos(s), std::acos(0.0), std::acos(-s)};
    const double mid = approx_user_rate(angles, 1, 2.0, n);
    EXPECT_LT(mid, approx_user_rate(angles, 0, 2.0, n));
    EXPECT_LT(mid, approx_user_rate(angles, 2, 2.0, n));
}

// High-SNR ZF groups whose neighbours sit between 1.5/N and 2/N apart in
// cosine; exact rates use ZF with each beam normalised on its own, as the
// approximation does.
TEST(ApproxRate, TracksExactZfRate)
{
    const std::size_t n = 128, k = 4;
    Rng rng(33);
    std::uniform_real_distribution<double> gap(1.5 / n, 2.0 / n), dist(20.0, 300.0), ph(0.0, 2 * pi);
    std::uniform_real_distribution<double> start(-0.8, 0.7);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep)
    {
        std::vector<double> cosines{start(rng)};
        for (std::size_t i = 1; i < k; ++i)
            cosines.push_back(cosines.back() + gap(rng));
        std::vector<double> angles;
        for (auto it = cosines.rbegin(); it != cosines.rend(); ++it)
            angles.push_back(std::acos(*it));
        std::vector<UserChannel> users;
        for (double a : angles)
            users.push_back(los_user(a, std::polar(path_amplitude(path_loss_db(PathKind::Los, dist(rng), 28000.0, 0.0)), ph(rng)), n));
        const auto h = channel_matrix(users);
        CMatrix exact = zf(h).columns;
        const double pk = cell_link.total_power / k;
        for (std::size_t j = 0; j < k; ++j)
        {
            exact.col(static_cast<Eigen::Index>(j)).normalize();
            const double amp2 = std::norm(oracle::received(users[j].vector, exact.col(static_cast<Eigen::Index>(j))));
            const double rate = std::log2(1.0 + pk * amp2 / cell_link.noise_power);
            const double zeta = neighbor_zf_bracket(angles, j, n).norm();
            const double gamma = gamma_coefficient(pk, std::abs(users[j].los.gain), zeta, cell_link.noise_power);
            worst = std::max(worst, std::abs(approx_user_rate(angles, j, gamma, n) - rate));
        }
    }
    EXPECT_LE(worst, 0.5);
}

TEST(P2Objective, HandEvaluated)
{
    const std::vector<double> angles{0.1, 0.2, 0.4};
    const std::vector<std::vector<std::size_t>> one{{0, 1, 2}};
    EXPECT_NEAR(p2_objective(one, angles), std::sqrt(0.1) + std::sqrt(0.2), 1e-12);
    EXPECT_NEAR(p2_objective(one, angles), 0.7634, 1e-4);
    const std::vector<std::vector<std::size_t>> singletons{{0}, {1}, {2}};
    EXPECT_EQ(p2_objective(singletons, angles), 0.0);
}

TEST(P2Objective, AsegBeatsAllTenPartitionsOfSix)
{
    Rng rng(8);
    std::uniform_real_distribution<double> ang(pi / 6, 5 * pi / 6);
    for (int rep = 0; rep < 20; ++rep)
    {
        std::vector<double> angles(6);
        for (auto &a : angles)
            a = ang(rng);
        const double best_aseg = p2_objective(aseg(angles, 2).groups, angles);
        std::size_t count = 0;
        oracle::for_each_partition(6, 2, [&](const oracle::Partition &part)
                                   {
                                       ++count;
                                       EXPECT_LE(oracle::p2_sqrt(part, angles), best_aseg + 1e-12); });
        EXPECT_EQ(count, 10u);
    }
}

TEST(P2Objective, RelabelAndReflectionInvariant)
{
    Rng rng(9);
    std::uniform_real_distribution<double> ang(0.5, 2.6);
    std::vector<double> angles(9);
    for (auto &a : angles)
        a = ang(rng);
    const auto g = random_grouping(9, 3, rng);
    auto relabeled = g.groups;
    std::reverse(relabeled.begin(), relabeled.end());
    std::vector<double> mirrored(angles.size());
    std::transform(angles.begin(), angles.end(), mirrored.begin(), [](double a) { return -a; });
    const double v = p2_objective(g.groups, angles);
    EXPECT_NEAR(p2_objective(relabeled, angles), v, 1e-14);
    EXPECT_NEAR(p2_objective(g.groups, mirrored), v, 1e-14);
}

TEST(P2Objective, OmegaGainGuard)
{
    const auto g = neg_omega_gain(16);
    EXPECT_NEAR(g(2.0 / 16), 0.0, 1e-12);
    EXPECT_NEAR(g(1.5 / 16), -omega(1.5 / 16, 16), 1e-15);
    EXPECT_THROW(g(0.5 / 16), std::domain_error);
    EXPECT_THROW(g(3.0 / 16), std::domain_error);
}

TEST(P1Objective, ZeroWhenEveryGapIsANull)
{
    const std::size_t n = 32;
    std::vector<double> angles;
    for (int i = -3; i <= 3; ++i)
        angles.push_back(std::acos(2.0 * i / n));
    const std::vector<std::vector<std::size_t>> one{{0, 1, 2, 3, 4, 5, 6}};
    EXPECT_NEAR(p1_objective(one, angles, n), 0.0, 1e-9);
}

TEST(P1Objective, SplittingAClusterHelps)
{
    const std::size_t n = 64;
    Rng rng(10);
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);
    std::vector<double> angles;
    for (int i = 0; i < 8; ++i)
        angles.push_back(pi / 2 + jitter(rng));
    const auto g1 = aseg(angles, 1), g2 = aseg(angles, 2);
    EXPECT_GT(p1_objective(g2.groups, angles, n), p1_objective(g1.groups, angles, n));
}

TEST(P1Objective, IsSpacingObjectiveOfNegOmegaInCosines)
{
    const auto inst = draw(9, 11);
    Rng rng(2);
    const auto g = random_grouping(9, 3, rng);
    std::vector<double> cosines;
    for (double a : inst.angles)
        cosines.push_back(std::cos(a));
    const auto direct = spacing_objective(g.groups, cosines, [](double t) { return -omega(t, 128); });
    EXPECT_NEAR(p1_objective(g.groups, inst.angles, 128), direct.value, 1e-12);
    EXPECT_EQ(direct.empty_groups, 0u);
}

TEST(SpacingObjective, CountsEmptyGroups)
{
    const std::vector<double> angles{1.0, 2.0};
    const std::vector<std::vector<std::size_t>> groups{{0, 1}, {}};
    const auto v = spacing_objective(groups, angles, sqrt_gain);
    EXPECT_EQ(v.empty_groups, 1u);
    EXPECT_NEAR(v.value, 0.5, 1e-15);
}
