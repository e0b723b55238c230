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

#ifndef ADMA_IO_HPP
#define ADMA_IO_HPP

// JSON debug dumps and the small CSV tables read by the plotting scripts.

#include "adma/beam.hpp"
#include "adma/grouping.hpp"
#include "adma/precoding.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

namespace adma
{
    using json = nlohmann::json;

    inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

    inline json path_to_json(const PathComponent &p)
    {
        return {{"doa", p.doa}, {"gain_re", p.gain.real()}, {"gain_im", p.gain.imag()}};
    }

    // Per user: distance, azimuth, LOS and NLOS paths.
    inline json channels_to_json(std::span<const UserGeometry> geometry, std::span<const UserChannel> channels)
    {
        if (geometry.size() != channels.size())
            throw std::invalid_argument("channels_to_json: geometry and channel counts differ");
        json users = json::array();
        for (std::size_t k = 0; k < channels.size(); ++k)
        {
            json nlos = json::array();
            for (const auto &p : channels[k].nlos)
                nlos.push_back(path_to_json(p));
            users.push_back({{"distance", geometry[k].distance_m},
                             {"theta", geometry[k].theta},
                             {"los", path_to_json(channels[k].los)},
                             {"nlos", std::move(nlos)}});
        }
        return {{"users", std::move(users)}};
    }

    // Column-major list of [re, im] pairs.
    inline json precoder_to_json(const PrecodingMatrix &p)
    {
        json data = json::array();
        for (Eigen::Index c = 0; c < p.columns.cols(); ++c)
            for (Eigen::Index r = 0; r < p.columns.rows(); ++r)
                data.push_back(to_json(p.columns(r, c)));
        return {{"method", std::string(to_string(p.method))},
                {"rows", p.columns.rows()},
                {"cols", p.columns.cols()},
                {"data", std::move(data)}};
    }

    // Groups as lists of 1-based user indices.
    inline json grouping_to_json(const Grouping &g)
    {
        json groups = json::array();
        for (const auto &members : g.groups)
        {
            json m = json::array();
            for (auto u : members)
                m.push_back(u + 1);
            groups.push_back(std::move(m));
        }
        return {{"origin", std::string(to_string(g.origin))}, {"groups", std::move(groups)}};
    }

    inline Grouping grouping_from_json(const json &j)
    {
        Grouping g;
        for (const auto &members : j.at("groups"))
        {
            std::vector<std::size_t> m;
            for (const auto &u : members)
            {
                const auto one_based = u.get<std::size_t>();
                if (one_based == 0)
                    throw std::invalid_argument("grouping_from_json: indices are 1-based");
                m.push_back(one_based - 1);
            }
            g.groups.push_back(std::move(m));
        }
        if (j.contains("origin"))
            if (auto o = parse_algorithm(j.at("origin").get<std::string>()))
                g.origin = *o;
        return g;
    }

    inline void write_json(const std::filesystem::path &path, const json &j)
    {
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << j.dump(2) << '\n';
        if (!out)
            throw std::runtime_error("write to " + path.string() + " failed");
    }

    // ---------------------------------------------------------------------
    // CSV tables. Floating point columns use %.17g so they round-trip.

    inline std::string format_double(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    inline void write_csv(std::ostream &out, const std::string &header, const std::vector<std::vector<double>> &rows)
    {
        out << header << '\n';
        for (const auto &row : rows)
        {
            for (std::size_t i = 0; i < row.size(); ++i)
                out << (i ? "," : "") << format_double(row[i]);
            out << '\n';
        }
    }

    // theta,amplitude
    inline void write_beam_pattern_csv(std::ostream &out, std::span<const double> thetas, std::span<const double> amplitude)
    {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < thetas.size(); ++i)
            rows.push_back({thetas[i], amplitude[i]});
        write_csv(out, "theta,amplitude", rows);
    }

    // x,y,intensity
    inline void write_radiation_map_csv(std::ostream &out, const RadiationMap &map)
    {
        out << "x,y,intensity\n";
        for (std::size_t j = 0; j < map.grid.ny; ++j)
            for (std::size_t i = 0; i < map.grid.nx; ++i)
                out << format_double(map.grid.x(i)) << ',' << format_double(map.grid.y(j)) << ','
                    << format_double(map.at(i, j)) << '\n';
    }

} // namespace adma

#endif
