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

#include "lpts/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lpts {

/// Which composition clause produced a transition of L1 || L2.
enum class CompositionClause { BothMove, LeftOnly, RightOnly };

struct Provenance {
    CompositionClause clause = CompositionClause::BothMove;
    /// Index of the factor transition in L1 (absent for RightOnly).
    std::optional<std::size_t> left;
    /// Index of the factor transition in L2 (absent for LeftOnly).
    std::optional<std::size_t> right;
};

/// Parallel composition restricted to pair-states reachable from the start
/// pair, with the factor transitions of every composed transition.
struct ComposedLpts {
    Lpts system;
    /// components[s] = (s1, s2) for every state of `system`.
    std::vector<std::pair<StateId, StateId>> components;
    /// provenance[i] describes system.transitions()[i].
    std::vector<Provenance> provenance;
};

inline std::string pair_state_name(const std::string& a, const std::string& b)
{
    return "(" + a + "," + b + ")";
}

inline ComposedLpts compose(const Lpts& l1, const Lpts& l2, const std::string& name = "")
{
    LptsBuilder b(name.empty() ? l1.name() + "_" + l2.name() : name);
    std::vector<ActionId> left_action(l1.alphabet().size());
    std::vector<ActionId> right_action(l2.alphabet().size());
    for (std::size_t i = 0; i < l1.alphabet().size(); ++i) left_action[i] = b.action(l1.alphabet()[i]);
    for (std::size_t i = 0; i < l2.alphabet().size(); ++i) right_action[i] = b.action(l2.alphabet()[i]);
    const auto left_in_right = action_map(l1, l2);
    const auto right_in_left = action_map(l2, l1);

    ComposedLpts out;
    std::map<std::pair<StateId, StateId>, StateId> index;
    std::vector<std::pair<StateId, StateId>> queue;
    auto intern = [&](StateId s1, StateId s2) {
        auto key = std::make_pair(s1, s2);
        auto it = index.find(key);
        if (it != index.end()) return it->second;
        StateId id = b.add_state(pair_state_name(l1.state_name(s1), l2.state_name(s2)));
        index.emplace(key, id);
        queue.push_back(key);
        return id;
    };
    struct Pending {
        StateId source;
        ActionId action;
        Distribution target;
        Provenance prov;
    };
    std::vector<Pending> pending;

    b.set_start(intern(l1.start(), l2.start()));
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [s1, s2] = queue[head];
        const StateId src = index.at({s1, s2});
        for (auto i1 : l1.outgoing(s1)) {
            const auto& t1 = l1.transition(i1);
            auto shared = left_in_right[t1.action];
            if (!shared) {
                std::vector<Distribution::Entry> entries;
                for (auto& [x, p] : t1.target.entries()) entries.emplace_back(intern(x, s2), p);
                pending.push_back({src, left_action[t1.action], Distribution::from_entries(std::move(entries)),
                                   {CompositionClause::LeftOnly, i1, std::nullopt}});
                continue;
            }
            for (auto i2 : l2.outgoing(s2)) {
                const auto& t2 = l2.transition(i2);
                if (t2.action != *shared) continue;
                std::vector<Distribution::Entry> entries;
                for (auto& [x, p] : t1.target.entries())
                    for (auto& [y, q] : t2.target.entries()) entries.emplace_back(intern(x, y), p * q);
                pending.push_back({src, left_action[t1.action], Distribution::from_entries(std::move(entries)),
                                   {CompositionClause::BothMove, i1, i2}});
            }
        }
        for (auto i2 : l2.outgoing(s2)) {
            const auto& t2 = l2.transition(i2);
            if (right_in_left[t2.action]) continue;
            std::vector<Distribution::Entry> entries;
            for (auto& [y, q] : t2.target.entries()) entries.emplace_back(intern(s1, y), q);
            pending.push_back({src, right_action[t2.action], Distribution::from_entries(std::move(entries)),
                               {CompositionClause::RightOnly, std::nullopt, i2}});
        }
    }
    for (auto& p : pending) b.add_transition(p.source, p.action, p.target);
    out.system = std::move(b).build();
    out.components.resize(out.system.num_states());
    for (auto& [key, id] : index) out.components[id] = key;
    out.provenance.resize(out.system.transitions().size());
    for (auto& p : pending) {
        auto idx = out.system.find_transition(p.source, p.action, p.target);
        out.provenance[*idx] = p.prov;
    }
    return out;
}

} // namespace lpts
