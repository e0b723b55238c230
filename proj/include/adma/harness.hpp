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

#ifndef ADMA_HARNESS_HPP
#define ADMA_HARNESS_HPP

// Monte-Carlo campaigns: every (K, G, algorithm, precoder, trial) cell is an
// independent unit of work. Random streams are derived from the master seed
// and the cell coordinates, so results do not depend on scheduling.

#include "adma/grouping.hpp"
#include "adma/io.hpp"
#include "adma/rates.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace adma
{
    struct CampaignConfig
    {
        SimParams sim;
        std::vector<std::size_t> k_sweep{16};
        std::vector<std::size_t> g_sweep{1};
        std::vector<PrecoderKind> precoders{PrecoderKind::Zf};
        std::vector<GroupingOrigin> algorithms{GroupingOrigin::Aseg};
        std::size_t trials = 60;
        std::uint64_t master_seed = 1;
        std::string output_path = "campaign.csv";

        // optional extras
        double sus_alpha = 0.3;
        std::optional<SegaParams> sega; // unset: SegaParams::defaults_for(K)
        std::string debug_dump_dir;     // empty: no JSON dumps

        void validate() const
        {
            sim.validate();
            if (trials < 1)
                throw std::invalid_argument("trials must be at least 1");
            if (k_sweep.empty() || g_sweep.empty() || precoders.empty() || algorithms.empty())
                throw std::invalid_argument("k_sweep, g_sweep, precoders and algorithms must be nonempty");
            for (auto p : precoders)
                if (p == PrecoderKind::ZfNeighborApprox)
                    throw std::invalid_argument("precoders must be drawn from MRT, ZF, MMSE");
            for (auto a : algorithms)
                if (a == GroupingOrigin::Manual)
                    throw std::invalid_argument("algorithms must be drawn from ASEG, RANDOM, GREEDY, SUS, SEGA");
            for (auto k : k_sweep)
                for (auto g : g_sweep)
                {
                    if (g < 1 || k < g)
                        throw std::invalid_argument("every (K, G) pair needs K >= G >= 1; got K=" + std::to_string(k) +
                                                    ", G=" + std::to_string(g));
                    // SUS can still overfill its last group; run_trial flags that case
                    const std::size_t largest = (k + g - 1) / g;
                    if (largest > sim.n_antennas)
                        throw std::invalid_argument("groups of " + std::to_string(largest) + " users exceed the " +
                                                    std::to_string(sim.n_antennas) + " antennas");
                }
            if (!(sus_alpha > 0.0 && sus_alpha < 1.0))
                throw std::invalid_argument("sus_alpha must lie in (0, 1)");
            if (sega)
                sega->validate();
        }
    };

    // ---------------------------------------------------------------------
    // JSON configuration. Keys are the field names above; unknown keys are errors.

    namespace detail
    {
        template <class F>
        void for_each_key(const json &j, const std::set<std::string> &allowed, const char *where, F &&f)
        {
            if (!j.is_object())
                throw std::invalid_argument(std::string(where) + ": expected an object");
            for (auto it = j.begin(); it != j.end(); ++it)
            {
                if (!allowed.count(it.key()))
                    throw std::invalid_argument(std::string(where) + ": unknown key '" + it.key() + "'");
                f(it.key(), it.value());
            }
        }
    } // namespace detail

    inline SimParams sim_params_from_json(const json &j)
    {
        SimParams p;
        static const std::set<std::string> keys{"n_antennas", "antenna_spacing_ratio", "carrier_freq_mhz",
                                                "cell_radius_m", "sector_halfwidth", "n_nlos_paths",
                                                "tx_power_dbm", "noise_power_dbm", "los_shadow_var_db2",
                                                "nlos_shadow_var_db2"};
        detail::for_each_key(j, keys, "sim", [&](const std::string &k, const json &v)
                             {
                                 if (k == "n_antennas") p.n_antennas = v.get<std::size_t>();
                                 else if (k == "antenna_spacing_ratio") p.antenna_spacing_ratio = v.get<double>();
                                 else if (k == "carrier_freq_mhz") p.carrier_freq_mhz = v.get<double>();
                                 else if (k == "cell_radius_m") p.cell_radius_m = v.get<double>();
                                 else if (k == "sector_halfwidth") p.sector_halfwidth = v.get<double>();
                                 else if (k == "n_nlos_paths") p.n_nlos_paths = v.get<std::size_t>();
                                 else if (k == "tx_power_dbm") p.tx_power_dbm = v.get<double>();
                                 else if (k == "noise_power_dbm") p.noise_power_dbm = v.get<double>();
                                 else if (k == "los_shadow_var_db2") p.los_shadow_var_db2 = v.get<double>();
                                 else p.nlos_shadow_var_db2 = v.get<double>(); });
        return p;
    }

    inline json to_json(const SimParams &p)
    {
        return {{"n_antennas", p.n_antennas},
                {"antenna_spacing_ratio", p.antenna_spacing_ratio},
                {"carrier_freq_mhz", p.carrier_freq_mhz},
                {"cell_radius_m", p.cell_radius_m},
                {"sector_halfwidth", p.sector_halfwidth},
                {"n_nlos_paths", p.n_nlos_paths},
                {"tx_power_dbm", p.tx_power_dbm},
                {"noise_power_dbm", p.noise_power_dbm},
                {"los_shadow_var_db2", p.los_shadow_var_db2},
                {"nlos_shadow_var_db2", p.nlos_shadow_var_db2}};
    }

    inline CampaignConfig config_from_json(const json &j)
    {
        CampaignConfig c;
        static const std::set<std::string> keys{"sim", "k_sweep", "g_sweep", "precoders", "algorithms", "trials",
                                                "master_seed", "output_path", "sus_alpha", "sega", "debug_dump_dir"};
        detail::for_each_key(j, keys, "config", [&](const std::string &k, const json &v)
                             {
            if (k == "sim")
                c.sim = sim_params_from_json(v);
            else if (k == "k_sweep")
                c.k_sweep = v.get<std::vector<std::size_t>>();
            else if (k == "g_sweep")
                c.g_sweep = v.get<std::vector<std::size_t>>();
            else if (k == "precoders")
            {
                c.precoders.clear();
                for (const auto &name : v)
                {
                    const auto kind = parse_precoder(name.get<std::string>());
                    if (!kind)
                        throw std::invalid_argument("unknown precoder '" + name.get<std::string>() + "'");
                    c.precoders.push_back(*kind);
                }
            }
            else if (k == "algorithms")
            {
                c.algorithms.clear();
                for (const auto &name : v)
                {
                    const auto a = parse_algorithm(name.get<std::string>());
                    if (!a)
                        throw std::invalid_argument("unknown algorithm '" + name.get<std::string>() + "'");
                    c.algorithms.push_back(*a);
                }
            }
            else if (k == "trials")
                c.trials = v.get<std::size_t>();
            else if (k == "master_seed")
                c.master_seed = v.get<std::uint64_t>();
            else if (k == "output_path")
                c.output_path = v.get<std::string>();
            else if (k == "sus_alpha")
                c.sus_alpha = v.get<double>();
            else if (k == "debug_dump_dir")
                c.debug_dump_dir = v.get<std::string>();
            else
            {
                SegaParams s;
                static const std::set<std::string> sk{"population", "elites", "iterations", "crossover_swaps",
                                                      "mutation_rate"};
                detail::for_each_key(v, sk, "sega", [&](const std::string &sk2, const json &sv)
                                     {
                    if (sk2 == "population") s.population = sv.get<std::size_t>();
                    else if (sk2 == "elites") s.elites = sv.get<std::size_t>();
                    else if (sk2 == "iterations") s.iterations = sv.get<std::size_t>();
                    else if (sk2 == "crossover_swaps") s.crossover_swaps = sv.get<std::size_t>();
                    else s.mutation_rate = sv.get<double>(); });
                c.sega = s;
            } });
        c.validate();
        return c;
    }

    inline CampaignConfig load_config(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw std::runtime_error("cannot open config file " + path.string());
        json j;
        try
        {
            j = json::parse(in);
        }
        catch (const json::parse_error &e)
        {
            throw std::invalid_argument("malformed config " + path.string() + ": " + e.what());
        }
        return config_from_json(j);
    }

    // Small built-in campaign: every algorithm and precoder on a few K and G.
    inline CampaignConfig demo_config()
    {
        CampaignConfig c;
        c.k_sweep = {8, 16};
        c.g_sweep = {1, 2, 4};
        c.precoders = {PrecoderKind::Mrt, PrecoderKind::Zf, PrecoderKind::Mmse};
        c.algorithms = {GroupingOrigin::Aseg, GroupingOrigin::Random, GroupingOrigin::Greedy, GroupingOrigin::Sus,
                        GroupingOrigin::Sega};
        c.trials = 4;
        c.master_seed = 42;
        c.output_path = "demo.csv";
        return c;
    }

    // ---------------------------------------------------------------------

    struct TrialRecord
    {
        std::size_t trial_index = 0;
        std::size_t k = 0;
        std::size_t g = 0;
        GroupingOrigin algorithm = GroupingOrigin::Aseg;
        PrecoderKind precoder = PrecoderKind::Zf;
        double system_rate = 0.0;      // bits/s/Hz; 0 when failed
        double grouping_time_us = 0.0; // grouping call only
        double total_time_us = 0.0;    // channel draw through rate evaluation
        bool failed = false;           // singular Gram matrix somewhere in the trial

        // diagnostics, not written to the CSV
        double max_interference_to_noise = 0.0;
        std::string failure;

        auto key() const
        {
            return std::make_tuple(k, g, std::string(to_string(algorithm)), std::string(to_string(precoder)), trial_index);
        }
    };

    // Everything a trial produced, for JSON dumps and tests.
    struct TrialArtifacts
    {
        std::vector<UserGeometry> geometry;
        std::vector<UserChannel> channels;
        Grouping grouping;
        std::vector<PrecodingMatrix> precoders; // one per group
    };

    // Stream tags keep the channel and algorithm streams apart.
    inline constexpr std::uint64_t channel_stream_tag = 0x6368616e6e656cULL;
    inline constexpr std::uint64_t algorithm_stream_tag = 0x616c676fULL;

    // Channels depend only on (seed, K, trial) so that every algorithm and
    // precoder of a trial faces the same users; grouping randomness depends
    // on the full cell coordinates.
    inline std::uint64_t channel_seed(std::uint64_t master, std::size_t k, std::size_t trial)
    {
        return derive_seed(master, {channel_stream_tag, k, trial});
    }

    inline std::uint64_t algorithm_seed(std::uint64_t master, std::size_t k, std::size_t g, GroupingOrigin algorithm,
                                        PrecoderKind precoder, std::size_t trial)
    {
        return derive_seed(master, {algorithm_stream_tag, k, g, static_cast<std::uint64_t>(algorithm),
                                    static_cast<std::uint64_t>(precoder), trial});
    }

    inline std::vector<UserChannel> draw_channels(const SimParams &sim, std::size_t k, Rng &rng,
                                                  std::vector<UserGeometry> *geometry_out = nullptr)
    {
        auto geometry = place_users(sim, k, rng);
        std::vector<UserChannel> channels;
        channels.reserve(k);
        for (const auto &u : geometry)
            channels.push_back(draw_user_channel(sim, u, rng));
        if (geometry_out)
            *geometry_out = std::move(geometry);
        return channels;
    }

    inline Grouping run_grouping(const CampaignConfig &config, GroupingOrigin algorithm, PrecoderKind precoder,
                                 const ChannelMatrix &h, std::span<const double> angles, std::size_t g, Rng &rng)
    {
        const auto link = LinkBudget::from(config.sim);
        switch (algorithm)
        {
        case GroupingOrigin::Aseg:
            return aseg(angles, g);
        case GroupingOrigin::Random:
            return random_grouping(h.n_users(), g, rng);
        case GroupingOrigin::Greedy:
            return greedy(h, g, precoder, link);
        case GroupingOrigin::Sus:
            return sus(h, g, config.sus_alpha);
        case GroupingOrigin::Sega:
            return sega(h, g, config.sega.value_or(SegaParams::defaults_for(h.n_users())), rng, link, precoder);
        case GroupingOrigin::Manual:
            break;
        }
        throw std::invalid_argument("run_grouping: not a grouping algorithm");
    }

    inline TrialRecord run_trial(const CampaignConfig &config, std::size_t k, std::size_t g, GroupingOrigin algorithm,
                                 PrecoderKind precoder, std::size_t trial_index, TrialArtifacts *artifacts = nullptr)
    {
        using clock = std::chrono::steady_clock;
        auto micros = [](clock::duration d) { return std::chrono::duration<double, std::micro>(d).count(); };

        TrialRecord rec;
        rec.trial_index = trial_index;
        rec.k = k;
        rec.g = g;
        rec.algorithm = algorithm;
        rec.precoder = precoder;
        const auto t0 = clock::now();

        Rng channel_rng(channel_seed(config.master_seed, k, trial_index));
        std::vector<UserGeometry> geometry;
        auto channels = draw_channels(config.sim, k, channel_rng, &geometry);
        const auto h = channel_matrix(channels);
        std::vector<double> angles(k);
        for (std::size_t u = 0; u < k; ++u)
            angles[u] = channels[u].los.doa;

        Rng algo_rng(algorithm_seed(config.master_seed, k, g, algorithm, precoder, trial_index));
        const auto tg0 = clock::now();
        Grouping grouping = run_grouping(config, algorithm, precoder, h, angles, g, algo_rng);
        const auto tg1 = clock::now();
        grouping.sort_by(angles);

        const auto link = LinkBudget::from(config.sim);
        std::vector<PrecodingMatrix> precoders;
        try
        {
            double system = 0.0;
            for (const auto &members : grouping.groups)
            {
                if (members.empty())
                    continue;
                if (members.size() > config.sim.n_antennas && precoder == PrecoderKind::Zf)
                    throw SingularGramError(members.front(), members.back(), std::numeric_limits<double>::infinity());
                const auto hg = h.subset(members);
                auto pg = make_precoder(precoder, hg, link.noise_power);
                const auto budget = link.for_group(members.size());
                system += group_sum_rate(hg, pg, budget);
                rec.max_interference_to_noise =
                    std::max(rec.max_interference_to_noise, max_interference_to_noise(hg, pg, budget));
                if (artifacts)
                    precoders.push_back(std::move(pg));
            }
            rec.system_rate = system / static_cast<double>(grouping.n_groups());
        }
        catch (const SingularGramError &e)
        {
            rec.failed = true;
            rec.system_rate = 0.0;
            rec.failure = e.what();
        }
        const auto t1 = clock::now();
        rec.grouping_time_us = micros(tg1 - tg0);
        rec.total_time_us = micros(t1 - t0);

        if (artifacts)
            *artifacts = {std::move(geometry), std::move(channels), std::move(grouping), std::move(precoders)};
        return rec;
    }

    // ---------------------------------------------------------------------
    // Campaign execution.

    // Worker count: explicit cap if given, else ADMA_THREADS, else the core count.
    inline std::size_t resolve_thread_count(std::optional<std::size_t> cap = std::nullopt)
    {
        std::size_t n = std::max(1u, std::thread::hardware_concurrency());
        if (const char *env = std::getenv("ADMA_THREADS"))
        {
            try
            {
                const long v = std::stol(env);
                if (v > 0)
                    n = static_cast<std::size_t>(v);
            }
            catch (const std::exception &)
            {
            }
        }
        if (cap)
            n = std::max<std::size_t>(1, *cap);
        return n;
    }

    struct CellFailures
    {
        std::size_t k, g;
        GroupingOrigin algorithm;
        PrecoderKind precoder;
        std::size_t failed;
    };

    struct CampaignResult
    {
        std::vector<TrialRecord> records; // sorted by (k, g, algorithm, precoder, trial)
        std::vector<CellFailures> failures;

        std::size_t n_failed() const
        {
            return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto &r) { return r.failed; }));
        }
    };

    inline std::string dump_name(const TrialRecord &r)
    {
        return "trial_k" + std::to_string(r.k) + "_g" + std::to_string(r.g) + "_" + std::string(to_string(r.algorithm)) +
               "_" + std::string(to_string(r.precoder)) + "_" + std::to_string(r.trial_index) + ".json";
    }

    // Runs the full cross-product over a bounded worker pool.
    inline CampaignResult run_trials(const CampaignConfig &config, std::size_t threads)
    {
        config.validate();
        struct Job
        {
            std::size_t k, g;
            GroupingOrigin a;
            PrecoderKind p;
            std::size_t t;
        };
        std::vector<Job> jobs;
        for (auto k : config.k_sweep)
            for (auto g : config.g_sweep)
                for (auto a : config.algorithms)
                    for (auto p : config.precoders)
                        for (std::size_t t = 0; t < config.trials; ++t)
                            jobs.push_back({k, g, a, p, t});

        const bool dump = !config.debug_dump_dir.empty();
        if (dump)
            std::filesystem::create_directories(config.debug_dump_dir);

        std::vector<TrialRecord> records(jobs.size());
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;

        auto worker = [&]
        {
            for (std::size_t i = next++; i < jobs.size(); i = next++)
            {
                try
                {
                    const auto &j = jobs[i];
                    TrialArtifacts art;
                    records[i] = run_trial(config, j.k, j.g, j.a, j.p, j.t, dump ? &art : nullptr);
                    if (dump)
                    {
                        json out = channels_to_json(art.geometry, art.channels);
                        out["grouping"] = grouping_to_json(art.grouping);
                        out["precoders"] = json::array();
                        for (const auto &p : art.precoders)
                            out["precoders"].push_back(precoder_to_json(p));
                        write_json(std::filesystem::path(config.debug_dump_dir) / dump_name(records[i]), out);
                    }
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    next = jobs.size();
                }
            }
        };

        const std::size_t n_workers = std::min(threads, std::max<std::size_t>(1, jobs.size()));
        if (n_workers <= 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < n_workers; ++w)
                pool.emplace_back(worker);
        }
        if (error)
            std::rethrow_exception(error);

        std::sort(records.begin(), records.end(), [](const auto &a, const auto &b) { return a.key() < b.key(); });

        CampaignResult result{std::move(records), {}};
        std::map<std::tuple<std::size_t, std::size_t, std::string, std::string>, CellFailures> cells;
        for (const auto &r : result.records)
        {
            auto &c = cells.try_emplace({r.k, r.g, std::string(to_string(r.algorithm)), std::string(to_string(r.precoder))},
                                        CellFailures{r.k, r.g, r.algorithm, r.precoder, 0})
                          .first->second;
            c.failed += r.failed ? 1 : 0;
        }
        for (const auto &[key, c] : cells)
            result.failures.push_back(c);
        return result;
    }

    inline void write_campaign_csv(std::ostream &out, std::span<const TrialRecord> records, std::uint64_t seed)
    {
        out << "# seed=" << seed << '\n';
        out << "trial,k,g,algorithm,precoder,system_rate_bpshz,grouping_time_us,total_time_us,failed\n";
        char times[64];
        for (const auto &r : records)
        {
            std::snprintf(times, sizeof times, "%.3f,%.3f", r.grouping_time_us, r.total_time_us);
            out << r.trial_index << ',' << r.k << ',' << r.g << ',' << to_string(r.algorithm) << ','
                << to_string(r.precoder) << ',' << format_double(r.system_rate) << ',' << times << ','
                << (r.failed ? 1 : 0) << '\n';
        }
    }

    // Writes through a temporary next to the target; nothing is left behind on failure.
    inline void write_campaign_file(const std::filesystem::path &path, std::span<const TrialRecord> records,
                                    std::uint64_t seed)
    {
        auto tmp = path;
        tmp += ".tmp";
        try
        {
            {
                std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
                if (!out)
                    throw std::runtime_error("cannot open " + tmp.string() + " for writing");
                write_campaign_csv(out, records, seed);
                out.flush();
                if (!out)
                    throw std::runtime_error("write to " + tmp.string() + " failed");
            }
            std::filesystem::rename(tmp, path);
        }
        catch (...)
        {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            std::filesystem::remove(path, ec);
            throw;
        }
    }

    inline CampaignResult run_campaign(const CampaignConfig &config, std::size_t threads)
    {
        auto result = run_trials(config, threads);
        write_campaign_file(config.output_path, result.records, config.master_seed);
        return result;
    }

    // Mean system rate per cell over successful trials.
    struct CellSummary
    {
        std::size_t k, g;
        GroupingOrigin algorithm;
        PrecoderKind precoder;
        double mean_rate;
        double median_grouping_us;
        std::size_t trials, failed;
    };

    inline std::vector<CellSummary> summarize(std::span<const TrialRecord> records)
    {
        std::map<std::tuple<std::size_t, std::size_t, std::string, std::string>, std::vector<const TrialRecord *>> cells;
        for (const auto &r : records)
            cells[{r.k, r.g, std::string(to_string(r.algorithm)), std::string(to_string(r.precoder))}].push_back(&r);

        std::vector<CellSummary> out;
        for (const auto &[key, rs] : cells)
        {
            CellSummary s{rs.front()->k, rs.front()->g, rs.front()->algorithm, rs.front()->precoder, 0.0, 0.0, rs.size(), 0};
            std::vector<double> times;
            std::size_t ok = 0;
            for (const auto *r : rs)
            {
                times.push_back(r->grouping_time_us);
                if (r->failed)
                {
                    ++s.failed;
                    continue;
                }
                s.mean_rate += r->system_rate;
                ++ok;
            }
            s.mean_rate = ok ? s.mean_rate / static_cast<double>(ok) : 0.0;
            std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(times.size() / 2), times.end());
            s.median_grouping_us = times[times.size() / 2];
            out.push_back(s);
        }
        return out;
    }

} // namespace adma

#endif
