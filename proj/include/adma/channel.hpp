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

#ifndef ADMA_CHANNEL_HPP
#define ADMA_CHANNEL_HPP

#include "adma/core.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace adma
{
    // Cell, array and link-budget parameters of one simulated sector.
    struct SimParams
    {
        std::size_t n_antennas = 128;          // ULA size N
        double antenna_spacing_ratio = 0.5;    // d / lambda
        double carrier_freq_mhz = 28000.0;     // f_c
        double cell_radius_m = 300.0;          // fan radius
        double sector_halfwidth = pi / 3.0;    // served sector is [pi/2 - w, pi/2 + w]
        std::size_t n_nlos_paths = 2;          // L
        double tx_power_dbm = 50.0;            // rho_DL
        double noise_power_dbm = -104.0;       // sigma^2
        double los_shadow_var_db2 = 5.248074602497726;   // 10^0.72
        double nlos_shadow_var_db2 = 87.09635899560806;  // 10^1.94

        double sector_min() const { return pi / 2.0 - sector_halfwidth; }
        double sector_max() const { return pi / 2.0 + sector_halfwidth; }
        double tx_power_w() const { return dbm_to_watt(tx_power_dbm); }
        double noise_power_w() const { return dbm_to_watt(noise_power_dbm); }

        void validate() const
        {
            if (n_antennas < 2)
                throw std::invalid_argument("n_antennas must be at least 2");
            if (!(antenna_spacing_ratio > 0.0 && antenna_spacing_ratio <= 0.5))
                throw std::invalid_argument("antenna_spacing_ratio must lie in (0, 0.5]");
            if (!(carrier_freq_mhz > 0.0))
                throw std::invalid_argument("carrier_freq_mhz must be positive");
            if (!(cell_radius_m > 0.0))
                throw std::invalid_argument("cell_radius_m must be positive");
            if (!(sector_halfwidth > 0.0 && sector_halfwidth <= pi / 2.0))
                throw std::invalid_argument("sector_halfwidth must lie in (0, pi/2]");
            if (!(los_shadow_var_db2 >= 0.0 && nlos_shadow_var_db2 >= 0.0))
                throw std::invalid_argument("shadow fading variances must be nonnegative");
        }
    };

    // Polar position of a user, azimuth measured from the array axis.
    struct UserGeometry
    {
        double distance_m = 0.0;
        double theta = pi / 2.0;
    };

    struct PathComponent
    {
        double doa = pi / 2.0;
        cplx gain{1.0, 0.0};
    };

    struct UserChannel
    {
        PathComponent los;
        std::vector<PathComponent> nlos;
        CVector vector; // h_k, length N; stored as a column but acts as a row of H
    };

    enum class PathKind
    {
        Los,
        Nlos
    };

    // Spatial frequency of a path arriving from azimuth theta.
    inline double spatial_frequency(double theta, double spacing_ratio)
    {
        return spacing_ratio * std::cos(theta);
    }

    // ULA response: element m is exp(i 2 pi m xi).
    inline CVector steering_vector(double xi, std::size_t n)
    {
        if (n < 1)
            throw std::invalid_argument("steering_vector: n must be at least 1");
        CVector a(static_cast<Eigen::Index>(n));
        for (std::size_t m = 0; m < n; ++m)
            a[static_cast<Eigen::Index>(m)] = std::polar(1.0, 2.0 * pi * static_cast<double>(m) * xi);
        return a;
    }

    inline CVector steering_vector_at(double theta, std::size_t n, double spacing_ratio = 0.5)
    {
        return steering_vector(spatial_frequency(theta, spacing_ratio), n);
    }

    // Attenuation in dB; the corresponding amplitude is 10^(-PL/20).
    inline double path_loss_db(PathKind kind, double distance_m, double carrier_freq_mhz, double shadow_db)
    {
        if (!(distance_m > 0.0))
            throw std::domain_error("path_loss_db: distance must be positive");
        if (kind == PathKind::Los)
            return -30.18 + 21.0 * std::log10(distance_m) + 20.0 * std::log10(carrier_freq_mhz) + shadow_db;
        return -34.53 + 34.0 * std::log10(distance_m) + 20.0 * std::log10(carrier_freq_mhz) + shadow_db;
    }

    inline double path_amplitude(double path_loss) { return std::pow(10.0, -path_loss / 20.0); }

    // Sum of gain * steering vector over all paths.
    inline CVector assemble_channel(const PathComponent &los, std::span<const PathComponent> nlos,
                                    std::size_t n, double spacing_ratio)
    {
        CVector h = los.gain * steering_vector_at(los.doa, n, spacing_ratio);
        for (const auto &p : nlos)
            h += p.gain * steering_vector_at(p.doa, n, spacing_ratio);
        return h;
    }

    inline UserChannel make_user_channel(PathComponent los, std::vector<PathComponent> nlos,
                                         std::size_t n, double spacing_ratio = 0.5)
    {
        UserChannel ch{los, std::move(nlos), {}};
        ch.vector = assemble_channel(ch.los, ch.nlos, n, spacing_ratio);
        return ch;
    }

    // Area-uniform drop inside the fan: azimuth uniform over the sector and
    // distance = R sqrt(u) with u in (0, 1].
    inline std::vector<UserGeometry> place_users(const SimParams &params, std::size_t k, Rng &rng)
    {
        if (k < 1)
            throw std::invalid_argument("place_users: need at least one user");
        std::uniform_real_distribution<double> azimuth(params.sector_min(), params.sector_max());
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<UserGeometry> users(k);
        for (auto &u : users)
        {
            u.theta = azimuth(rng);
            u.distance_m = params.cell_radius_m * std::sqrt(1.0 - unit(rng));
        }
        return users;
    }

    inline UserChannel draw_user_channel(const SimParams &params, const UserGeometry &geom, Rng &rng)
    {
        std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
        std::uniform_real_distribution<double> doa(params.sector_min(), params.sector_max());

        auto draw_gain = [&](PathKind kind, double shadow_var)
        {
            std::normal_distribution<double> shadow(0.0, std::sqrt(shadow_var));
            const double pl = path_loss_db(kind, geom.distance_m, params.carrier_freq_mhz, shadow(rng));
            return std::polar(path_amplitude(pl), phase(rng));
        };

        PathComponent los{geom.theta, draw_gain(PathKind::Los, params.los_shadow_var_db2)};
        std::vector<PathComponent> nlos(params.n_nlos_paths);
        for (auto &p : nlos)
        {
            p.doa = doa(rng);
            p.gain = draw_gain(PathKind::Nlos, params.nlos_shadow_var_db2);
        }
        return make_user_channel(los, std::move(nlos), params.n_antennas, params.antenna_spacing_ratio);
    }

    // K x N downlink channel, row k is h_k.
    class ChannelMatrix
    {
    public:
        ChannelMatrix() = default;
        explicit ChannelMatrix(CMatrix h) : h_(std::move(h))
        {
            if (h_.rows() < 1 || h_.cols() < 1)
                throw std::invalid_argument("ChannelMatrix: empty matrix");
        }

        std::size_t n_users() const { return static_cast<std::size_t>(h_.rows()); }
        std::size_t n_antennas() const { return static_cast<std::size_t>(h_.cols()); }
        const CMatrix &matrix() const { return h_; }

        // h_k as a column vector (unconjugated)
        CVector row(std::size_t k) const { return h_.row(static_cast<Eigen::Index>(k)).transpose(); }

        ChannelMatrix subset(std::span<const std::size_t> users) const
        {
            CMatrix h(static_cast<Eigen::Index>(users.size()), h_.cols());
            for (std::size_t i = 0; i < users.size(); ++i)
            {
                if (users[i] >= n_users())
                    throw std::out_of_range("ChannelMatrix::subset: user index out of range");
                h.row(static_cast<Eigen::Index>(i)) = h_.row(static_cast<Eigen::Index>(users[i]));
            }
            return ChannelMatrix(std::move(h));
        }

        CMatrix gram() const { return h_ * h_.adjoint(); }

    private:
        CMatrix h_;
    };

    inline ChannelMatrix channel_matrix(std::span<const UserChannel> users)
    {
        if (users.empty())
            throw std::invalid_argument("channel_matrix: no users");
        const auto n = users.front().vector.size();
        CMatrix h(static_cast<Eigen::Index>(users.size()), n);
        for (std::size_t k = 0; k < users.size(); ++k)
        {
            if (users[k].vector.size() != n)
                throw std::invalid_argument("channel_matrix: mixed channel vector lengths");
            h.row(static_cast<Eigen::Index>(k)) = users[k].vector.transpose();
        }
        return ChannelMatrix(std::move(h));
    }

    inline ChannelMatrix channel_matrix(std::span<const CVector> rows)
    {
        if (rows.empty())
            throw std::invalid_argument("channel_matrix: no users");
        const auto n = rows.front().size();
        CMatrix h(static_cast<Eigen::Index>(rows.size()), n);
        for (std::size_t k = 0; k < rows.size(); ++k)
        {
            if (rows[k].size() != n)
                throw std::invalid_argument("channel_matrix: mixed channel vector lengths");
            h.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
        }
        return ChannelMatrix(std::move(h));
    }

} // namespace adma

#endif
