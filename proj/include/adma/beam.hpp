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

#ifndef ADMA_BEAM_HPP
#define ADMA_BEAM_HPP

// Beam-domain analysis of a half-wavelength ULA: relative MRT amplitude,
// the interference-cancellation cost Omega(t) and its derivatives, beam
// patterns and free-space radiation-intensity maps.
//
// All spacing quantities are expressed in the cosine domain,
// t = cos(theta_j) - cos(theta_k), which is where the array factor is periodic.

#include "adma/channel.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace adma
{
    // Cosine-domain separation of two directions.
    struct AngularSpacing
    {
        double t = 0.0;

        static AngularSpacing between(double theta_j, double theta_k)
        {
            return {std::cos(theta_j) - std::cos(theta_k)};
        }

        // D_{j,k} = phi_j / phi_k, with phi_j = exp(i 2 pi (d/lambda) cos theta_j)
        cplx ratio(double spacing_ratio = 0.5) const { return std::polar(1.0, 2.0 * pi * spacing_ratio * t); }
    };

    // sum_{m=0}^{N-1} D^m with D = exp(i 2 pi (d/lambda) t), i.e. a_j a_k^H for
    // t = t_{j,k}. The 0/0 form at D = 1 evaluates to N.
    inline cplx array_sum(double t, std::size_t n, double spacing_ratio = 0.5)
    {
        // Dirichlet-kernel form stays accurate as the phase approaches 0
        const double nd = static_cast<double>(n);
        const double phase = std::remainder(2.0 * pi * spacing_ratio * t, 2.0 * pi);
        const double s1 = std::sin(phase / 2.0);
        if (s1 == 0.0)
            return {nd, 0.0};
        return std::polar(std::sin(nd * phase / 2.0) / s1, (nd - 1.0) * phase / 2.0);
    }

    // Relative amplitude received in direction theta_j from an MRT beam aimed at theta_k.
    inline cplx phi_relative(double theta_j, double theta_k, std::size_t n)
    {
        const double sqrt_n = std::sqrt(static_cast<double>(n));
        if (theta_j == theta_k)
            return {sqrt_n, 0.0};
        return array_sum(AngularSpacing::between(theta_j, theta_k).t, n) / sqrt_n;
    }

    // Omega(t) = (1 - cos(N pi t)) / (1 - cos(pi t)), evaluated in the
    // equivalent squared-sine form. Removable singularities return N^2.
    inline double omega(double t, std::size_t n)
    {
        const double nd = static_cast<double>(n);
        const double tr = std::remainder(t, 2.0);
        const double s1 = std::sin(pi * tr / 2.0);
        if (std::abs(s1) < 1e-12)
            return nd * nd;
        const double r = std::sin(nd * pi * tr / 2.0) / s1;
        return r * r;
    }

    namespace detail
    {
        inline double omega_slope(double t, std::size_t n)
        {
            const double nd = static_cast<double>(n);
            const double s1 = std::sin(pi * t / 2.0);
            const double c1 = std::cos(pi * t / 2.0);
            const double sn = std::sin(nd * pi * t / 2.0);
            const double cn = std::cos(nd * pi * t / 2.0);
            return pi * sn * (nd * cn * s1 - c1 * sn) / (s1 * s1 * s1);
        }
    } // namespace detail

    // Analytic dOmega/dt on the main-lobe flank (0, 2/N].
    inline double omega_prime(double t, std::size_t n)
    {
        const double upper = 2.0 / static_cast<double>(n);
        if (!(t > 0.0 && t <= upper))
            throw std::domain_error("omega_prime: t must lie in (0, 2/N]");
        return detail::omega_slope(t, n);
    }

    // Central second difference of Omega; only meaningful on (1/N, 2/N).
    inline double omega_second_numeric(double t, std::size_t n, double h)
    {
        const double lo = 1.0 / static_cast<double>(n);
        const double hi = 2.0 / static_cast<double>(n);
        if (!(h > 0.0) || h > (hi - lo) / 4.0)
            throw std::invalid_argument("omega_second_numeric: step must lie in (0, 1/(4N)]");
        if (!(t > lo + h && t < hi - h))
            throw std::invalid_argument("omega_second_numeric: t must lie in (1/N + h, 2/N - h)");
        return (omega(t + h, n) - 2.0 * omega(t, n) + omega(t - h, n)) / (h * h);
    }

    // |gain * a(theta) * p| for every sample direction.
    inline std::vector<double> beam_pattern(const CVector &p, std::span<const double> theta_samples, cplx gain,
                                            double spacing_ratio = 0.5)
    {
        if (theta_samples.empty())
            throw std::invalid_argument("beam_pattern: no sample directions");
        const auto n = static_cast<std::size_t>(p.size());
        std::vector<double> out;
        out.reserve(theta_samples.size());
        for (double theta : theta_samples)
            out.push_back(std::abs(gain * steering_vector_at(theta, n, spacing_ratio).dot(p.conjugate())));
        return out;
    }

    // Rectangular lattice of cell centres in metres. The array sits at the
    // origin with its axis along x.
    struct GridSpec
    {
        double x_min = -260.0;
        double x_max = 260.0;
        double y_min = 0.0;
        double y_max = 300.0;
        std::size_t nx = 256;
        std::size_t ny = 256;

        double x(std::size_t i) const { return x_min + (static_cast<double>(i) + 0.5) * (x_max - x_min) / static_cast<double>(nx); }
        double y(std::size_t j) const { return y_min + (static_cast<double>(j) + 0.5) * (y_max - y_min) / static_cast<double>(ny); }
        double cell_width() const { return std::max((x_max - x_min) / static_cast<double>(nx), (y_max - y_min) / static_cast<double>(ny)); }

        // Bounding box of the served fan.
        static GridSpec covering(const SimParams &params, std::size_t cells_per_axis = 256)
        {
            const double r = params.cell_radius_m;
            const double half_x = r * std::max(std::abs(std::cos(params.sector_min())), std::abs(std::cos(params.sector_max())));
            return {-half_x, half_x, 0.0, r, cells_per_axis, cells_per_axis};
        }
    };

    struct RadiationMap
    {
        GridSpec grid;
        std::vector<double> intensity; // row-major, index j * nx + i
        std::size_t skipped_cells = 0; // cells at the base station, left at zero

        double at(std::size_t i, std::size_t j) const { return intensity[j * grid.nx + i]; }
    };

    // Free-space received power at (x, y) summed over all beams: only LOS path
    // loss and the steering vector, no shadowing and no scattering.
    inline double radiation_intensity_at(double x, double y, const CMatrix &precoder, double carrier_freq_mhz,
                                         double spacing_ratio = 0.5)
    {
        const double dist = std::hypot(x, y);
        if (!(dist > 0.0))
            throw std::domain_error("radiation_intensity_at: position coincides with the base station");
        const double beta = path_amplitude(path_loss_db(PathKind::Los, dist, carrier_freq_mhz, 0.0));
        const auto n = static_cast<std::size_t>(precoder.rows());
        const Eigen::RowVectorXcd a = steering_vector_at(std::atan2(y, x), n, spacing_ratio).transpose();
        return beta * beta * (a * precoder).squaredNorm();
    }

    inline RadiationMap radiation_map(const CMatrix &precoder, const GridSpec &grid, double carrier_freq_mhz,
                                      double spacing_ratio = 0.5)
    {
        if (grid.nx == 0 || grid.ny == 0)
            throw std::invalid_argument("radiation_map: empty grid");
        RadiationMap map{grid, std::vector<double>(grid.nx * grid.ny, 0.0), 0};
        for (std::size_t j = 0; j < grid.ny; ++j)
            for (std::size_t i = 0; i < grid.nx; ++i)
            {
                const double x = grid.x(i), y = grid.y(j);
                if (std::hypot(x, y) < 1e-9)
                {
                    ++map.skipped_cells;
                    continue;
                }
                map.intensity[j * grid.nx + i] = radiation_intensity_at(x, y, precoder, carrier_freq_mhz, spacing_ratio);
            }
        return map;
    }

} // namespace adma

#endif
