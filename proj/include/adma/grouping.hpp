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

#ifndef ADMA_GROUPING_HPP
#define ADMA_GROUPING_HPP

// User grouping: angular spacing equalization (ASEG) and the baselines it is
// compared against (random, greedy, semiorthogonal selection, genetic search),
// plus partition validation and the pairwise exchanges that improve a
// grouping under a concave spacing objective.

#include "adma/rates.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace adma
{
    enum class GroupingOrigin
    {
        Aseg,
        Random,
        Greedy,
        Sus,
        Sega,
        Manual
    };

    inline std::string_view to_string(GroupingOrigin origin)
    {
        switch (origin)
        {
        case GroupingOrigin::Aseg:
            return "ASEG";
        case GroupingOrigin::Random:
            return "RANDOM";
        case GroupingOrigin::Greedy:
            return "GREEDY";
        case GroupingOrigin::Sus:
            return "SUS";
        case GroupingOrigin::Sega:
            return "SEGA";
        case GroupingOrigin::Manual:
            return "MANUAL";
        }
        return "?";
    }

    inline std::optional<GroupingOrigin> parse_algorithm(std::string_view name)
    {
        for (auto o : {GroupingOrigin::Aseg, GroupingOrigin::Random, GroupingOrigin::Greedy, GroupingOrigin::Sus,
                       GroupingOrigin::Sega})
            if (to_string(o) == name)
                return o;
        if (name == "GREED")
            return GroupingOrigin::Greedy;
        return std::nullopt;
    }

    // Partition of user indices 0..K-1 into G groups.
    struct Grouping
    {
        std::vector<std::vector<std::size_t>> groups;
        GroupingOrigin origin = GroupingOrigin::Manual;

        std::size_t n_groups() const { return groups.size(); }

        std::size_t n_users() const
        {
            std::size_t k = 0;
            for (const auto &g : groups)
                k += g.size();
            return k;
        }

        // Reorders members of every group by angle, ties by index.
        void sort_by(std::span<const double> angles)
        {
            for (auto &g : groups)
                std::stable_sort(g.begin(), g.end(), [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });
        }
    };

    // Near-equal group sizes: the first K mod G groups get one extra member.
    inline std::vector<std::size_t> equal_group_sizes(std::size_t k, std::size_t g_count)
    {
        std::vector<std::size_t> sizes(g_count, k / g_count);
        for (std::size_t g = 0; g < k % g_count; ++g)
            ++sizes[g];
        return sizes;
    }

    namespace detail
    {
        inline void check_counts(std::size_t k, std::size_t g_count, const char *who)
        {
            if (g_count < 1 || k < g_count)
                throw std::invalid_argument(std::string(who) + ": need K >= G >= 1");
        }
    } // namespace detail

    // ---------------------------------------------------------------------
    // ASEG: sort by angle, then deal users out to the groups with stride G.

    inline Grouping aseg(std::span<const double> angles, std::size_t g_count)
    {
        detail::check_counts(angles.size(), g_count, "aseg");
        std::vector<std::size_t> order(angles.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });

        Grouping out{std::vector<std::vector<std::size_t>>(g_count), GroupingOrigin::Aseg};
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            out.groups[pos % g_count].push_back(order[pos]);
        return out;
    }

    // Uniform equal-member partition: shuffle, then chunk.
    inline Grouping random_grouping(std::size_t k, std::size_t g_count, Rng &rng)
    {
        detail::check_counts(k, g_count, "random_grouping");
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);

        Grouping out{{}, GroupingOrigin::Random};
        auto it = perm.begin();
        for (std::size_t size : equal_group_sizes(k, g_count))
        {
            std::vector<std::size_t> g(it, it + static_cast<std::ptrdiff_t>(size));
            std::sort(g.begin(), g.end());
            out.groups.push_back(std::move(g));
            it += static_cast<std::ptrdiff_t>(size);
        }
        return out;
    }

    // ---------------------------------------------------------------------
    // Greedy: groups are filled round-robin; each step tentatively adds every
    // unassigned user to the current group and keeps the one that maximises
    // the group's sum rate under the chosen precoder.

    inline Grouping greedy(const ChannelMatrix &h, std::size_t g_count, PrecoderKind kind, const LinkBudget &link)
    {
        const auto k = h.n_users();
        detail::check_counts(k, g_count, "greedy");
        const GramRateEvaluator eval(h, kind, link);

        Grouping out{std::vector<std::vector<std::size_t>>(g_count), GroupingOrigin::Greedy};
        std::vector<bool> taken(k, false);
        for (std::size_t step = 0; step < k; ++step)
        {
            auto &group = out.groups[step % g_count];
            double best_rate = -std::numeric_limits<double>::infinity();
            std::optional<std::size_t> best;
            for (std::size_t u = 0; u < k; ++u)
            {
                if (taken[u])
                    continue;
                if (!best)
                    best = u; // fallback when every candidate is singular
                group.push_back(u);
                double rate = -std::numeric_limits<double>::infinity();
                try
                {
                    rate = eval.group_sum_rate(group);
                }
                catch (const SingularGramError &)
                {
                }
                group.pop_back();
                if (rate > best_rate)
                {
                    best_rate = rate;
                    best = u;
                }
            }
            group.push_back(*best);
            taken[*best] = true;
        }
        for (auto &g : out.groups)
            std::sort(g.begin(), g.end());
        return out;
    }

    // ---------------------------------------------------------------------
    // Semiorthogonal user selection, repeated once per group. A group starts
    // from the strongest free user; each further pick is the candidate with
    // the largest component orthogonal to the span of the group, and after
    // every pick candidates whose normalised projection onto that span
    // reaches alpha are dropped. A group closes when no candidate is left or
    // it reaches its share of K/G users; leftovers join the last group.

    inline Grouping sus(const ChannelMatrix &h, std::size_t g_count, double alpha)
    {
        const auto k = h.n_users();
        detail::check_counts(k, g_count, "sus");
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("sus: alpha must lie in (0, 1)");

        std::vector<CVector> rows(k);
        std::vector<double> norm2(k);
        for (std::size_t u = 0; u < k; ++u)
        {
            rows[u] = h.row(u);
            norm2[u] = rows[u].squaredNorm();
        }

        const auto caps = equal_group_sizes(k, g_count);
        Grouping out{std::vector<std::vector<std::size_t>>(g_count), GroupingOrigin::Sus};
        std::vector<bool> taken(k, false);
        std::vector<double> proj2(k);

        for (std::size_t g = 0; g < g_count; ++g)
        {
            std::vector<std::size_t> candidates;
            for (std::size_t u = 0; u < k; ++u)
                if (!taken[u])
                    candidates.push_back(u);
            std::fill(proj2.begin(), proj2.end(), 0.0);
            std::vector<CVector> basis;

            while (out.groups[g].size() < caps[g] && !candidates.empty())
            {
                auto pick_it = std::max_element(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b)
                                                { return norm2[a] - proj2[a] < norm2[b] - proj2[b]; });
                const std::size_t pick = *pick_it;
                candidates.erase(pick_it);
                out.groups[g].push_back(pick);
                taken[pick] = true;

                CVector residual = rows[pick];
                for (const auto &b : basis)
                    residual -= b.dot(residual) * b;
                const double rn = residual.norm();
                if (!(rn > 0.0))
                    break;
                basis.push_back(residual / rn);

                std::erase_if(candidates, [&](std::size_t u)
                              {
                                  proj2[u] += std::norm(basis.back().dot(rows[u]));
                                  return !(norm2[u] > 0.0) || std::sqrt(proj2[u] / norm2[u]) >= alpha; });
            }
        }
        for (std::size_t u = 0; u < k; ++u)
            if (!taken[u])
                out.groups.back().push_back(u);
        for (auto &g : out.groups)
            std::sort(g.begin(), g.end());
        return out;
    }

    // ---------------------------------------------------------------------
    // Self-evolution genetic algorithm over equal-member partitions.

    struct SegaParams
    {
        std::size_t population = 2;
        std::size_t elites = 1;          // E
        std::size_t iterations = 1;      // I
        std::size_t crossover_swaps = 1; // users pulled from the second parent per child
        double mutation_rate = 0.05;

        // E = K/2, population = 2E, I = K
        static SegaParams defaults_for(std::size_t k)
        {
            const std::size_t e = std::max<std::size_t>(1, k / 2);
            return {2 * e, e, k, 1, 0.05};
        }

        void validate() const
        {
            if (population < 1 || elites < 1 || crossover_swaps < 1)
                throw std::invalid_argument("SegaParams: population, elites and crossover_swaps must be positive");
            if (elites > population)
                throw std::invalid_argument("SegaParams: more elites than population");
            if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0))
                throw std::invalid_argument("SegaParams: mutation_rate must lie in [0, 1]");
        }
    };

    namespace detail
    {
        struct Individual
        {
            std::vector<std::size_t> group_of;
            double fitness = 0.0;
        };

        inline std::vector<std::vector<std::size_t>> groups_of(const std::vector<std::size_t> &group_of, std::size_t g_count)
        {
            std::vector<std::vector<std::size_t>> groups(g_count);
            for (std::size_t u = 0; u < group_of.size(); ++u)
                groups[group_of[u]].push_back(u);
            return groups;
        }

        inline std::size_t pick(std::size_t n, Rng &rng)
        {
            return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        }
    } // namespace detail

    inline Grouping sega(const ChannelMatrix &h, std::size_t g_count, const SegaParams &params, Rng &rng,
                         const LinkBudget &link, PrecoderKind kind = PrecoderKind::Zf)
    {
        const auto k = h.n_users();
        detail::check_counts(k, g_count, "sega");
        params.validate();
        const GramRateEvaluator eval(h, kind, link);

        auto fitness = [&](const std::vector<std::size_t> &group_of)
        {
            try
            {
                return eval.system_rate(detail::groups_of(group_of, g_count));
            }
            catch (const SingularGramError &)
            {
                return -std::numeric_limits<double>::infinity();
            }
        };
        auto rank = [&](std::vector<detail::Individual> &pool)
        {
            std::stable_sort(pool.begin(), pool.end(), [](const auto &a, const auto &b) { return a.fitness > b.fitness; });
            if (pool.size() > params.elites)
                pool.resize(params.elites);
        };

        std::vector<detail::Individual> elites;
        for (std::size_t i = 0; i < params.population; ++i)
        {
            const auto g = random_grouping(k, g_count, rng);
            detail::Individual ind{std::vector<std::size_t>(k), 0.0};
            for (std::size_t gi = 0; gi < g_count; ++gi)
                for (auto u : g.groups[gi])
                    ind.group_of[u] = gi;
            ind.fitness = fitness(ind.group_of);
            elites.push_back(std::move(ind));
        }
        rank(elites);

        std::bernoulli_distribution mutate(params.mutation_rate);
        const std::size_t n_children = std::max<std::size_t>(1, params.population - params.elites);
        for (std::size_t it = 0; it < params.iterations; ++it)
        {
            std::vector<detail::Individual> pool = elites;
            for (std::size_t c = 0; c < n_children; ++c)
            {
                const auto &mother = elites[detail::pick(elites.size(), rng)];
                const auto &father = elites[detail::pick(elites.size(), rng)];
                auto child = mother.group_of;

                // pull users into the group they occupy in the other parent,
                // paying with a member that the other parent put elsewhere
                for (std::size_t s = 0; s < params.crossover_swaps; ++s)
                {
                    const std::size_t u = detail::pick(k, rng);
                    const std::size_t target = father.group_of[u];
                    const std::size_t source = child[u];
                    if (target == source)
                        continue;
                    std::vector<std::size_t> out_of_place, members;
                    for (std::size_t v = 0; v < k; ++v)
                        if (child[v] == target)
                        {
                            members.push_back(v);
                            if (father.group_of[v] != target)
                                out_of_place.push_back(v);
                        }
                    const auto &choices = out_of_place.empty() ? members : out_of_place;
                    const std::size_t v = choices[detail::pick(choices.size(), rng)];
                    child[u] = target;
                    child[v] = source;
                }

                if (g_count > 1 && mutate(rng))
                {
                    const std::size_t a = detail::pick(k, rng);
                    std::size_t b = detail::pick(k, rng);
                    while (child[b] == child[a])
                        b = detail::pick(k, rng);
                    std::swap(child[a], child[b]);
                }

                const double f = fitness(child);
                pool.push_back({std::move(child), f});
            }
            rank(pool);
            elites = std::move(pool);
        }

        return {detail::groups_of(elites.front().group_of, g_count), GroupingOrigin::Sega};
    }

    // ---------------------------------------------------------------------
    // Validation. Returns a description of the first violation, or nothing.

    inline std::optional<std::string> validate(const Grouping &grouping, std::size_t k,
                                               std::span<const double> angles = {}, bool equal_members = false)
    {
        std::vector<int> seen(k, 0);
        for (std::size_t g = 0; g < grouping.groups.size(); ++g)
            for (auto u : grouping.groups[g])
            {
                if (u >= k)
                    return "index " + std::to_string(u) + " out of range in group " + std::to_string(g);
                if (seen[u]++)
                    return "disjointness: user " + std::to_string(u) + " appears more than once";
            }
        for (std::size_t u = 0; u < k; ++u)
            if (!seen[u])
                return "coverage: user " + std::to_string(u) + " is not assigned";
        if (!angles.empty())
            for (std::size_t g = 0; g < grouping.groups.size(); ++g)
            {
                const auto &m = grouping.groups[g];
                for (std::size_t i = 1; i < m.size(); ++i)
                    if (angles[m[i]] < angles[m[i - 1]])
                        return "ordering: group " + std::to_string(g) + " is not sorted by angle";
            }
        if (equal_members && !grouping.groups.empty())
        {
            auto [lo, hi] = std::minmax_element(grouping.groups.begin(), grouping.groups.end(),
                                                [](const auto &a, const auto &b) { return a.size() < b.size(); });
            if (hi->size() - lo->size() > 1)
                return "sizes: group sizes differ by more than one";
        }
        return std::nullopt;
    }

    // ---------------------------------------------------------------------
    // Exchange moves. which == 1: two consecutive members of group j lie
    // strictly between consecutive members a < d of group i; swap the
    // prefixes up to those points. which == 2: two or more members of group
    // i lie beyond the outermost member of group j on one side; hand the
    // outermost of them to j. Each move strictly raises any strictly concave
    // increasing spacing objective.

    inline std::optional<Grouping> proposition_exchange(const Grouping &grouping, std::span<const double> angles, int which)
    {
        if (which != 1 && which != 2)
            throw std::invalid_argument("proposition_exchange: which must be 1 or 2");
        Grouping g = grouping;
        g.sort_by(angles);
        auto &groups = g.groups;

        for (std::size_t i = 0; i < groups.size(); ++i)
            for (std::size_t j = 0; j < groups.size(); ++j)
            {
                if (i == j || groups[j].empty())
                    continue;
                auto &gi = groups[i];
                auto &gj = groups[j];

                if (which == 1)
                {
                    for (std::size_t l = 0; l + 1 < gi.size(); ++l)
                    {
                        const double a = angles[gi[l]], d = angles[gi[l + 1]];
                        for (std::size_t k = 0; k + 1 < gj.size(); ++k)
                        {
                            if (angles[gj[k]] > a && angles[gj[k + 1]] < d)
                            {
                                std::vector<std::size_t> new_i(gj.begin(), gj.begin() + static_cast<std::ptrdiff_t>(k + 1));
                                new_i.insert(new_i.end(), gi.begin() + static_cast<std::ptrdiff_t>(l + 1), gi.end());
                                std::vector<std::size_t> new_j(gi.begin(), gi.begin() + static_cast<std::ptrdiff_t>(l + 1));
                                new_j.insert(new_j.end(), gj.begin() + static_cast<std::ptrdiff_t>(k + 1), gj.end());
                                gi = std::move(new_i);
                                gj = std::move(new_j);
                                return g;
                            }
                        }
                    }
                    continue;
                }

                const double top = angles[gj.back()], bottom = angles[gj.front()];
                const auto above = std::count_if(gi.begin(), gi.end(), [&](std::size_t u) { return angles[u] > top; });
                if (above >= 2)
                {
                    gj.push_back(gi.back());
                    gi.pop_back();
                    return g;
                }
                const auto below = std::count_if(gi.begin(), gi.end(), [&](std::size_t u) { return angles[u] < bottom; });
                if (below >= 2)
                {
                    gj.insert(gj.begin(), gi.front());
                    gi.erase(gi.begin());
                    return g;
                }
            }
        return std::nullopt;
    }

} // namespace adma

#endif
