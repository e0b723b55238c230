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

// Command line front end: campaigns and the CSV tables behind the plots.

#include "adma/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;

namespace
{
    std::ofstream open_out(const fs::path &path)
    {
        if (path.has_parent_path())
            fs::create_directories(path.parent_path());
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        return out;
    }

    std::vector<double> theta_grid(std::size_t samples)
    {
        std::vector<double> t(samples);
        for (std::size_t i = 0; i < samples; ++i)
            t[i] = adma::pi * static_cast<double>(i) / static_cast<double>(samples - 1);
        return t;
    }

    int run_campaign_cmd(adma::CampaignConfig config, std::optional<std::uint64_t> seed, std::optional<std::size_t> threads,
                         const std::string &output_override)
    {
        if (seed)
            config.master_seed = *seed;
        if (!output_override.empty())
            config.output_path = output_override;
        config.validate();

        const auto n_threads = adma::resolve_thread_count(threads);
        std::cerr << "campaign: seed=" << config.master_seed << " threads=" << n_threads << " trials="
                  << config.trials << '\n';
        const auto result = adma::run_campaign(config, n_threads);

        for (const auto &c : adma::summarize(result.records))
        {
            std::fprintf(stderr, "K=%-4zu G=%-3zu %-6s %-4s mean=%9.4f bps/Hz  median grouping=%10.1f us  failed=%zu/%zu\n",
                         c.k, c.g, std::string(adma::to_string(c.algorithm)).c_str(),
                         std::string(adma::to_string(c.precoder)).c_str(), c.mean_rate, c.median_grouping_us, c.failed,
                         c.trials);
        }
        std::cerr << "wrote " << result.records.size() << " rows to " << config.output_path << " (" << result.n_failed()
                  << " failed)\n";
        return 0;
    }

    // Relative MRT amplitude and the two-user ZF beam decompositions.
    void beam_pattern_cmd(std::size_t n, std::size_t samples, const fs::path &dir)
    {
        const auto thetas = theta_grid(samples);
        const double target = adma::pi / 2.0;

        {
            std::vector<double> amp;
            for (double th : thetas)
                amp.push_back(std::abs(adma::phi_relative(th, target, n)));
            auto out = open_out(dir / "mrt_amplitude.csv");
            adma::write_beam_pattern_csv(out, thetas, amp);
        }

        auto los_user = [n](double theta)
        { return adma::make_user_channel({theta, {1.0, 0.0}}, {}, n); };

        // close: inside the main lobe; far: several lobes away
        const double nd = static_cast<double>(n);
        for (auto [name, offset] : {std::pair{"close", 0.8 / nd}, std::pair{"far", 8.0 / nd}})
        {
            const auto dec = adma::pair_zf(los_user(target), los_user(std::acos(-offset)));
            const adma::CVector bracket = dec.signal_beam - dec.cancel_beam;
            const double scale = dec.column.norm() / bracket.norm();
            for (auto [part, v] : {std::pair{"signal", &dec.signal_beam}, std::pair{"cancel", &dec.cancel_beam},
                                   std::pair{"zf", &bracket}})
            {
                const auto amp = adma::beam_pattern(*v, thetas, scale);
                auto out = open_out(dir / (std::string("zf_") + name + "_" + part + ".csv"));
                adma::write_beam_pattern_csv(out, thetas, amp);
            }
        }

        {
            // target at pi/2, the other user sweeps the half plane
            std::vector<double> sweep, amp;
            for (double th : thetas)
            {
                if (std::abs(std::cos(th)) < 1e-12)
                    continue;
                sweep.push_back(th);
                amp.push_back(adma::pair_zf(los_user(target), los_user(th)).received_amplitude);
            }
            auto out = open_out(dir / "zf_target_amplitude.csv");
            adma::write_beam_pattern_csv(out, sweep, amp);
        }
    }

    // t, Omega, dOmega/dt, d2Omega/dt2 on (0, 2/N], including t = 2/N exactly.
    void omega_cmd(std::size_t n, std::size_t points, const fs::path &path)
    {
        const double nd = static_cast<double>(n);
        const double h = 1e-6 / nd;
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 1; i <= points; ++i)
        {
            const double t = (i == points) ? 2.0 / nd : static_cast<double>(i) * 2.0 / (nd * static_cast<double>(points));
            const double second =
                (adma::detail::omega_slope(t + h, n) - adma::detail::omega_slope(t - h, n)) / (2.0 * h);
            rows.push_back({t, adma::omega(t, n), adma::omega_prime(t, n), second});
        }
        auto out = open_out(path);
        adma::write_csv(out, "t,omega,omega_prime,omega_second", rows);
    }

    // Free-space intensity of K pure-LOS users under one precoder, plus the user positions.
    void radiation_map_cmd(const adma::SimParams &sim, std::size_t k, adma::PrecoderKind kind, std::size_t cells,
                           std::uint64_t seed, const fs::path &path)
    {
        adma::Rng rng(adma::derive_seed(seed, {k}));
        const auto users = adma::place_users(sim, k, rng);
        std::vector<adma::UserChannel> channels;
        for (const auto &u : users)
        {
            const double beta = adma::path_amplitude(adma::path_loss_db(adma::PathKind::Los, u.distance_m, sim.carrier_freq_mhz, 0.0));
            channels.push_back(adma::make_user_channel({u.theta, {beta, 0.0}}, {}, sim.n_antennas, sim.antenna_spacing_ratio));
        }
        const auto h = adma::channel_matrix(channels);
        const auto p = adma::make_precoder(kind, h, sim.noise_power_w());
        const auto map = adma::radiation_map(p.columns, adma::GridSpec::covering(sim, cells), sim.carrier_freq_mhz,
                                             sim.antenna_spacing_ratio);
        {
            auto out = open_out(path);
            adma::write_radiation_map_csv(out, map);
        }
        auto upath = path;
        upath.replace_extension();
        upath += "_users.csv";
        std::vector<std::vector<double>> rows;
        for (const auto &u : users)
            rows.push_back({u.distance_m * std::cos(u.theta), u.distance_m * std::sin(u.theta)});
        auto out = open_out(upath);
        adma::write_csv(out, "x,y", rows);
    }

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"adma-sim: angle-division multiple access link-level simulator"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    app.add_option("--seed", seed, "Override the master seed");
    app.add_option("--threads", threads, "Worker threads (default: ADMA_THREADS or core count)")->check(CLI::PositiveNumber);

    auto *campaign = app.add_subcommand("campaign", "Run a Monte-Carlo campaign from a JSON config");
    std::string config_path, campaign_out;
    campaign->add_option("config", config_path, "Config file")->required();
    campaign->add_option("-o,--out", campaign_out, "Override output_path");

    auto *demo = app.add_subcommand("demo", "Run the small built-in campaign");
    std::string demo_out = "demo.csv";
    demo->add_option("-o,--out", demo_out, "CSV output")->capture_default_str();

    auto *beam = app.add_subcommand("beam-pattern", "MRT and two-user ZF beam pattern CSVs");
    std::size_t beam_n = 128, beam_samples = 2001;
    std::string beam_dir = ".";
    beam->add_option("--n", beam_n, "Antennas")->check(CLI::Range(2, 1 << 16));
    beam->add_option("--samples", beam_samples, "Directions in [0, pi]")->check(CLI::Range(2, 1 << 20));
    beam->add_option("-o,--out-dir", beam_dir, "Output directory");

    auto *om = app.add_subcommand("omega", "Omega(t) and its derivatives on (0, 2/N]");
    std::size_t omega_n = 16, omega_points = 50;
    std::string omega_out = "omega.csv";
    om->add_option("--n", omega_n, "Antennas")->check(CLI::Range(2, 1 << 16));
    om->add_option("--points", omega_points, "Grid points")->check(CLI::Range(2, 1 << 20));
    om->add_option("-o,--out", omega_out, "CSV output");

    auto *rad = app.add_subcommand("radiation-map", "Free-space radiation intensity over the cell");
    std::size_t rad_k = 8, rad_cells = 256, rad_n = 128;
    std::string rad_precoder = "ZF", rad_out = "radiation_map.csv";
    rad->add_option("--k", rad_k, "Users")->check(CLI::PositiveNumber);
    rad->add_option("--n", rad_n, "Antennas")->check(CLI::Range(2, 1 << 16));
    rad->add_option("--cells", rad_cells, "Cells per axis")->check(CLI::PositiveNumber);
    rad->add_option("--precoder", rad_precoder, "MRT, ZF or MMSE")->check(CLI::IsMember({"MRT", "ZF", "MMSE"}));
    rad->add_option("-o,--out", rad_out, "CSV output");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try
    {
        if (*campaign)
        {
            if (!fs::exists(config_path))
            {
                std::cerr << "error: config file not found: " << config_path << "\n\n" << campaign->help();
                return 2;
            }
            return run_campaign_cmd(adma::load_config(config_path), seed, threads, campaign_out);
        }
        if (*demo)
            return run_campaign_cmd(adma::demo_config(), seed, threads, demo_out);
        if (*beam)
        {
            beam_pattern_cmd(beam_n, beam_samples, beam_dir);
            return 0;
        }
        if (*om)
        {
            omega_cmd(omega_n, omega_points, omega_out);
            return 0;
        }
        if (*rad)
        {
            adma::SimParams sim;
            sim.n_antennas = rad_n;
            radiation_map_cmd(sim, rad_k, *adma::parse_precoder(rad_precoder), rad_cells, seed.value_or(1), rad_out);
            return 0;
        }
    }
    catch (const std::invalid_argument &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
