/*
 * Copyright 2026 The lptslearn Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Seeded generators for random models, trees and distributions. Only the raw
// output of std::mt19937_64 is used (its sequence is fixed by the standard),
// so a seed reproduces the same instances on every platform.

#include "lpts/model.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace lpts {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }
    /// Uniform in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + below(hi - lo + 1); }
    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

    template <typename T>
    const T& pick(const std::vector<T>& v)
    {
        return v[below(v.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

private:
    std::mt19937_64 engine_;
};

struct RandomDistributionOptions {
    std::size_t max_support = 2;
    std::vector<long> denominators{2, 3, 4, 6};
};

/// Random distribution over distinct states drawn from `pool`.
inline Distribution random_distribution(Rng& rng, const std::vector<StateId>& pool,
                                        const RandomDistributionOptions& opts = {})
{
    const std::size_t k_max = std::min(opts.max_support, pool.size());
    std::size_t k = static_cast<std::size_t>(rng.between(1, k_max));
    std::vector<long> dens;
    for (long d : opts.denominators)
        if (d >= static_cast<long>(k)) dens.push_back(d);
    if (dens.empty()) dens.push_back(static_cast<long>(k));
    const long d = rng.pick(dens);
    std::vector<StateId> states = pool;
    rng.shuffle(states);
    states.resize(k);
    // k-1 distinct cut points in 1..d-1 split d into k positive parts.
    std::vector<long> cuts;
    std::vector<long> positions;
    for (long i = 1; i < d; ++i) positions.push_back(i);
    rng.shuffle(positions);
    cuts.assign(positions.begin(), positions.begin() + static_cast<long>(k - 1));
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(d);
    std::vector<Distribution::Entry> entries;
    long prev = 0;
    for (std::size_t i = 0; i < k; ++i) {
        entries.emplace_back(states[i], rational(cuts[i] - prev, d));
        prev = cuts[i];
    }
    return Distribution::from_entries(std::move(entries));
}

struct RandomModelOptions {
    std::size_t states = 3;
    std::size_t actions = 2;
    std::size_t max_transitions = 2;
    bool reactive = false;
    /// Percentage chance that a state gets no transitions at all.
    std::uint64_t deadlock_percent = 15;
    RandomDistributionOptions dist{};
    std::string state_prefix = "s";
};

inline std::string action_label(std::size_t i)
{
    return std::string(1, static_cast<char>('a' + i % 26)) + (i >= 26 ? std::to_string(i / 26) : "");
}

inline Lpts random_lpts(Rng& rng, const RandomModelOptions& opts, const std::string& name = "random")
{
    LptsBuilder b(name);
    std::vector<StateId> all;
    for (std::size_t i = 0; i < opts.states; ++i)
        all.push_back(b.add_state(opts.state_prefix + std::to_string(i)));
    std::vector<ActionId> acts;
    for (std::size_t i = 0; i < opts.actions; ++i) acts.push_back(b.action(action_label(i)));
    b.set_start(0);
    for (StateId s : all) {
        if (rng.chance(opts.deadlock_percent, 100)) continue;
        std::size_t count = static_cast<std::size_t>(rng.between(1, opts.max_transitions));
        std::vector<ActionId> pool = acts;
        rng.shuffle(pool);
        for (std::size_t i = 0; i < count; ++i) {
            ActionId a;
            if (opts.reactive) {
                if (i >= pool.size()) break;
                a = pool[i];
            } else {
                a = rng.pick(acts);
            }
            b.add_transition(s, a, random_distribution(rng, all, opts.dist));
        }
    }
    return std::move(b).build();
}

struct RandomTreeOptions {
    std::size_t max_states = 6;
    std::size_t actions = 2;
    std::size_t max_transitions = 2;
    RandomDistributionOptions dist{};
    /// Percentage chance that a non-root node is a leaf.
    std::uint64_t leaf_percent = 40;
    std::string state_prefix = "z";
};

inline Lpts random_tree(Rng& rng, const RandomTreeOptions& opts, const std::string& name = "tree")
{
    LptsBuilder b(name);
    std::vector<ActionId> acts;
    for (std::size_t i = 0; i < opts.actions; ++i) acts.push_back(b.action(action_label(i)));
    auto fresh = [&] { return b.add_state(opts.state_prefix + std::to_string(b.num_states())); };
    b.set_start(fresh());
    std::vector<StateId> frontier{0};
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        StateId s = frontier[head];
        if (head > 0 && rng.chance(opts.leaf_percent, 100)) continue;
        std::size_t count = static_cast<std::size_t>(rng.between(1, opts.max_transitions));
        for (std::size_t i = 0; i < count; ++i) {
            std::size_t room = opts.max_states - b.num_states();
            if (room == 0) break;
            std::size_t k = static_cast<std::size_t>(rng.between(1, std::min(opts.dist.max_support, room)));
            std::vector<StateId> children;
            for (std::size_t c = 0; c < k; ++c) children.push_back(fresh());
            RandomDistributionOptions dopts = opts.dist;
            dopts.max_support = k;
            // Force full use of the fresh children so every node gets a parent.
            Distribution d;
            do {
                d = random_distribution(rng, children, dopts);
            } while (d.support_size() != k);
            b.add_transition(s, rng.pick(acts), d);
            frontier.insert(frontier.end(), children.begin(), children.end());
        }
    }
    return std::move(b).build();
}

} // namespace lpts
