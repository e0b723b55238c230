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

#include "adma/channel.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace adma;

TEST(SteeringVector, ZeroRampIsAllOnes)
{
    const auto a = steering_vector(0.0, 4);
    for (Eigen::Index m = 0; m < 4; ++m)
        EXPECT_NEAR(std::abs(a[m] - cplx(1.0, 0.0)), 0.0, 1e-15);
}

TEST(SteeringVector, HalfRampAlternates)
{
    const auto a = steering_vector(0.5, 3);
    EXPECT_NEAR(std::abs(a[0] - cplx(1, 0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a[1] - cplx(-1, 0)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a[2] - cplx(1, 0)), 0.0, 1e-12);
}

TEST(SteeringVector, QuarterRampReachesI)
{
    const auto a = steering_vector(0.25, 2);
    EXPECT_NEAR(std::abs(a[1] - cplx(0, 1)), 0.0, 1e-12);
}

TEST(SteeringVector, UnitModulusAndMatchesOracle)
{
    Rng rng(7);
    std::uniform_real_distribution<double> xi(-0.5, 0.5);
    for (int rep = 0; rep < 50; ++rep)
    {
        const double x = xi(rng);
        const auto a = steering_vector(x, 64);
        const auto ref = oracle::steering(x, 64);
        for (Eigen::Index m = 0; m < 64; ++m)
            EXPECT_NEAR(std::abs(a[m]), 1.0, 1e-12);
        EXPECT_LT((a - ref).norm(), 1e-10);
    }
}

TEST(SteeringVector, RejectsEmptyArray)
{
    EXPECT_THROW(steering_vector(0.1, 0), std::invalid_argument);
}

TEST(PlaceUsers, SingleUserInsideSector)
{
    SimParams p;
    Rng rng(3);
    const auto u = place_users(p, 1, rng);
    ASSERT_EQ(u.size(), 1u);
    EXPECT_GE(u[0].theta, p.sector_min());
    EXPECT_LE(u[0].theta, p.sector_max());
    EXPECT_GT(u[0].distance_m, 0.0);
    EXPECT_LE(u[0].distance_m, p.cell_radius_m);
}

TEST(PlaceUsers, AreaUniformMoments)
{
    SimParams p;
    Rng rng(11);
    const auto users = place_users(p, 10000, rng);
    double m2 = 0.0, lo = 10.0, hi = -10.0;
    std::size_t inside_half = 0;
    for (const auto &u : users)
    {
        const double r = u.distance_m / p.cell_radius_m;
        m2 += r * r;
        lo = std::min(lo, u.theta);
        hi = std::max(hi, u.theta);
        inside_half += r <= 0.5 ? 1 : 0;
    }
    EXPECT_NEAR(m2 / 10000.0, 0.5, 0.02);
    EXPECT_GE(lo, pi / 6.0);
    EXPECT_LE(hi, 5.0 * pi / 6.0);
    // P(r <= R/2) = 1/4; 4 binomial standard deviations
    EXPECT_NEAR(inside_half / 10000.0, 0.25, 4.0 * std::sqrt(0.25 * 0.75 / 10000.0));
}

TEST(PathLoss, ConstantTerm)
{
    EXPECT_NEAR(path_loss_db(PathKind::Los, 1.0, 1.0, 0.0), -30.18, 1e-12);
}

TEST(PathLoss, ReferenceValues)
{
    EXPECT_NEAR(path_loss_db(PathKind::Los, 100.0, 28000.0, 0.0), -30.18 + 42.0 + 20.0 * std::log10(28000.0), 1e-10);
    EXPECT_NEAR(path_loss_db(PathKind::Los, 100.0, 28000.0, 0.0), 100.763, 1e-3);
    EXPECT_NEAR(path_loss_db(PathKind::Nlos, 10.0, 28000.0, 0.0), 88.413, 1e-3);
    EXPECT_NEAR(path_loss_db(PathKind::Nlos, 10.0, 28000.0, 3.5) - path_loss_db(PathKind::Nlos, 10.0, 28000.0, 0.0), 3.5,
                1e-12);
}

TEST(PathLoss, RejectsNonPositiveDistance)
{
    EXPECT_THROW(path_loss_db(PathKind::Los, 0.0, 28000.0, 0.0), std::domain_error);
    EXPECT_THROW(path_loss_db(PathKind::Nlos, -1.0, 28000.0, 0.0), std::domain_error);
}

TEST(DrawChannel, LosOnlyIsScaledSteeringVector)
{
    SimParams p;
    p.n_nlos_paths = 0;
    Rng rng(5);
    const UserGeometry g{80.0, 1.2};
    const auto ch = draw_user_channel(p, g, rng);
    EXPECT_TRUE(ch.nlos.empty());
    const CVector ref = ch.los.gain * oracle::steering(0.5 * std::cos(1.2), p.n_antennas);
    EXPECT_LT((ch.vector - ref).norm(), 1e-12 * ref.norm());
}

TEST(DrawChannel, PathsReassembleToVector)
{
    SimParams p;
    Rng rng(9);
    for (const auto &g : place_users(p, 20, rng))
    {
        const auto ch = draw_user_channel(p, g, rng);
        ASSERT_EQ(ch.nlos.size(), 2u);
        CVector sum = ch.los.gain * oracle::steering(0.5 * std::cos(ch.los.doa), p.n_antennas);
        for (const auto &path : ch.nlos)
        {
            EXPECT_GE(path.doa, p.sector_min());
            EXPECT_LE(path.doa, p.sector_max());
            sum += path.gain * oracle::steering(0.5 * std::cos(path.doa), p.n_antennas);
        }
        EXPECT_LT((ch.vector - sum).norm(), 1e-12 * sum.norm());
    }
}

TEST(DrawChannel, UnitGainNorm)
{
    const auto ch = make_user_channel({0.9, {1.0, 0.0}}, {}, 128);
    EXPECT_NEAR(ch.vector.squaredNorm(), 128.0, 1e-10);
}

TEST(DrawChannel, SeedDeterminism)
{
    SimParams p;
    Rng a(1234), b(1234);
    const auto ga = place_users(p, 5, a), gb = place_users(p, 5, b);
    for (std::size_t k = 0; k < 5; ++k)
    {
        const auto ca = draw_user_channel(p, ga[k], a);
        const auto cb = draw_user_channel(p, gb[k], b);
        EXPECT_EQ(ga[k].theta, gb[k].theta);
        EXPECT_TRUE(ca.vector == cb.vector);
    }
}

// Mean path power relative to the LOS path at one distance. Shadowing is a
// zero-mean Gaussian in dB, so E[10^(-X/10)] = exp(var (ln 10 / 10)^2 / 2).
TEST(DrawChannel, NlosToLosPowerRatioMatchesPathLossLaw)
{
    SimParams p;
    p.n_antennas = 2; // only the path gains matter here
    const double d = 50.0;
    const UserGeometry g{d, pi / 2.0};
    Rng rng(2024);
    double los = 0.0, nlos = 0.0;
    const int draws = 200000;
    for (int i = 0; i < draws; ++i)
    {
        const auto ch = draw_user_channel(p, g, rng);
        los += std::norm(ch.los.gain);
        for (const auto &path : ch.nlos)
            nlos += std::norm(path.gain);
    }
    const double measured = (nlos / (2.0 * draws)) / (los / draws);

    const double c = std::log(10.0) / 10.0;
    auto mean_power = [&](double pl_db, double var) { return std::pow(10.0, -pl_db / 10.0) * std::exp(var * c * c / 2.0); };
    const double expected = mean_power(-34.53 + 34.0 * std::log10(d) + 20.0 * std::log10(p.carrier_freq_mhz), p.nlos_shadow_var_db2) /
                            mean_power(-30.18 + 21.0 * std::log10(d) + 20.0 * std::log10(p.carrier_freq_mhz), p.los_shadow_var_db2);
    EXPECT_NEAR(measured / expected, 1.0, 0.10);
}

TEST(ChannelMatrix, SingleUser)
{
    const auto ch = make_user_channel({1.0, {0.5, 0.2}}, {}, 16);
    const std::vector<UserChannel> users{ch};
    const auto h = channel_matrix(users);
    EXPECT_EQ(h.n_users(), 1u);
    EXPECT_EQ(h.n_antennas(), 16u);
    EXPECT_TRUE(h.row(0) == ch.vector);
}

TEST(ChannelMatrix, RowsRoundTripExactly)
{
    SimParams p;
    Rng rng(77);
    std::vector<UserChannel> users;
    for (const auto &g : place_users(p, 6, rng))
        users.push_back(draw_user_channel(p, g, rng));
    const auto h = channel_matrix(users);
    for (std::size_t k = 0; k < users.size(); ++k)
        EXPECT_TRUE(h.row(k) == users[k].vector);
    const std::vector<std::size_t> pick{4, 1};
    const auto sub = h.subset(pick);
    EXPECT_TRUE(sub.row(0) == users[4].vector);
    EXPECT_TRUE(sub.row(1) == users[1].vector);
}

TEST(ChannelMatrix, DuplicatedUsersGiveRankOneGram)
{
    const auto ch = make_user_channel({1.1, {1.0, 0.0}}, {{0.7, {0.3, 0.1}}}, 32);
    const std::vector<UserChannel> users{ch, ch};
    const auto gram = channel_matrix(users).gram();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram);
    EXPECT_LT(std::abs(eig.eigenvalues()[0]), 1e-8 * 32.0);
    EXPECT_GT(eig.eigenvalues()[1], 1.0);
}

TEST(ChannelMatrix, RejectsMixedLengths)
{
    const std::vector<CVector> rows{CVector::Ones(4), CVector::Ones(5)};
    EXPECT_THROW(channel_matrix(rows), std::invalid_argument);
}

TEST(SimParams, Validation)
{
    SimParams p;
    EXPECT_NO_THROW(p.validate());
    p.antenna_spacing_ratio = 0.7;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    EXPECT_NEAR(SimParams{}.noise_power_w(), std::pow(10.0, -13.4), 1e-25);
    EXPECT_NEAR(SimParams{}.tx_power_w(), 100.0, 1e-12);
}
