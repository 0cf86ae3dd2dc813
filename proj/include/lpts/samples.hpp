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

#include "lpts/error.hpp"
#include "lpts/format.hpp"
#include "lpts/model.hpp"
#include "lpts/simulation.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace lpts {

/// Positive and negative stochastic trees.
class SampleSet {
public:
    SampleSet() = default;
    SampleSet(std::vector<Lpts> positives, std::vector<Lpts> negatives)
    {
        for (auto& p : positives) add_positive(std::move(p));
        for (auto& n : negatives) add_negative(std::move(n));
    }

    void add_positive(Lpts t)
    {
        require_tree(t, "positive");
        positives_.push_back(std::move(t));
    }
    void add_negative(Lpts t)
    {
        require_tree(t, "negative");
        negatives_.push_back(std::move(t));
    }

    const std::vector<Lpts>& positives() const { return positives_; }
    const std::vector<Lpts>& negatives() const { return negatives_; }

private:
    static void require_tree(const Lpts& t, const char* kind)
    {
        if (!classify(t).is_tree)
            throw PreconditionError(std::string(kind) + " sample '" + t.name() + "' is not a tree");
    }

    std::vector<Lpts> positives_;
    std::vector<Lpts> negatives_;
};

/// The positive samples laid side by side in one forest with qualified state
/// names `p<i>.<state>`, plus the bookkeeping the learners need.
struct SampleSpace {
    Lpts forest;
    std::vector<StateId> roots;
    /// Per forest state: parent transition index, absent for roots.
    std::vector<std::optional<std::size_t>> parent_transition;
    /// Per forest state: sample index and state id within that sample.
    std::vector<std::pair<std::size_t, StateId>> origin;
    /// Roots first, then by depth, then by sample and breadth-first position.
    std::vector<StateId> order;

    std::size_t size() const { return forest.num_states(); }
    bool is_root(StateId s) const { return !parent_transition[s]; }
    std::optional<StateId> parent(StateId s) const
    {
        if (!parent_transition[s]) return std::nullopt;
        return forest.transition(*parent_transition[s]).source;
    }
};

inline std::string qualified_name(const std::string& prefix, std::size_t i, const std::string& state)
{
    return prefix + std::to_string(i) + "." + state;
}

inline SampleSpace sample_space(const SampleSet& samples)
{
    if (samples.positives().empty()) throw PreconditionError("no positive samples");
    LptsBuilder b("forest");
    SampleSpace sp{trivial_lpts(), {}, {}, {}, {}};
    std::vector<std::vector<StateId>> ids;
    std::vector<std::pair<std::size_t, StateId>> origin;
    std::vector<std::pair<std::size_t, std::size_t>> rank; // (depth, bfs index)
    for (std::size_t i = 0; i < samples.positives().size(); ++i) {
        const auto& p = samples.positives()[i];
        TreeView view(p);
        ids.emplace_back(p.num_states());
        for (StateId s = 0; s < p.num_states(); ++s) {
            ids.back()[s] = b.add_state(qualified_name("p", i, p.state_name(s)));
            origin.emplace_back(i, s);
        }
        rank.resize(origin.size());
        const auto& order = view.top_down();
        for (std::size_t k = 0; k < order.size(); ++k) rank[ids.back()[order[k]]] = {view.depth(order[k]), k};
        for (auto& a : p.alphabet()) b.action(a);
    }
    for (std::size_t i = 0; i < samples.positives().size(); ++i) {
        const auto& p = samples.positives()[i];
        for (const auto& t : p.transitions()) {
            std::vector<Distribution::Entry> e;
            for (auto& [s, q] : t.target.entries()) e.emplace_back(ids[i][s], q);
            b.add_transition(ids[i][t.source], *b.find_action(p.action_name(t.action)),
                             Distribution::from_entries(std::move(e)));
        }
    }
    b.set_start(ids[0][samples.positives()[0].start()]);
    sp.forest = std::move(b).build();
    sp.origin = std::move(origin);
    sp.parent_transition.assign(sp.forest.num_states(), std::nullopt);
    for (std::size_t ti = 0; ti < sp.forest.transitions().size(); ++ti)
        for (auto& [s, q] : sp.forest.transition(ti).target.entries()) sp.parent_transition[s] = ti;
    for (std::size_t i = 0; i < samples.positives().size(); ++i)
        sp.roots.push_back(ids[i][samples.positives()[i].start()]);
    sp.order.resize(sp.forest.num_states());
    for (StateId s = 0; s < sp.order.size(); ++s) sp.order[s] = s;
    std::stable_sort(sp.order.begin(), sp.order.end(), [&](StateId a, StateId b) {
        if (rank[a].first != rank[b].first) return rank[a].first < rank[b].first;
        if (sp.origin[a].first != sp.origin[b].first) return sp.origin[a].first < sp.origin[b].first;
        return rank[a].second < rank[b].second;
    });
    return sp;
}

/// Union of the positive sample alphabets, in first-seen order.
inline std::vector<std::string> positive_alphabet(const SampleSet& samples)
{
    std::vector<std::string> out;
    for (auto& p : samples.positives())
        for (auto& a : p.alphabet())
            if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    return out;
}

/// All positive trees glued at a single shared root.
inline Lpts merged_positive_tree(const SampleSet& samples)
{
    if (samples.positives().empty()) throw PreconditionError("no positive samples");
    LptsBuilder b("merged");
    const StateId root = b.add_state("root");
    b.set_start(root);
    for (auto& a : positive_alphabet(samples)) b.action(a);
    for (std::size_t i = 0; i < samples.positives().size(); ++i) {
        const auto& p = samples.positives()[i];
        std::vector<StateId> ids(p.num_states());
        for (StateId s = 0; s < p.num_states(); ++s)
            ids[s] = s == p.start() ? root : b.add_state(qualified_name("p", i, p.state_name(s)));
        for (const auto& t : p.transitions()) {
            std::vector<Distribution::Entry> e;
            for (auto& [s, q] : t.target.entries()) e.emplace_back(ids[s], q);
            b.add_transition(ids[t.source], *b.find_action(p.action_name(t.action)),
                             Distribution::from_entries(std::move(e)));
        }
    }
    return std::move(b).build();
}

struct ConsistencyCheck {
    bool exists = false;
    Lpts merged;
};

/// A consistent LPTS exists iff no negative is simulated by the merged tree.
inline ConsistencyCheck consistency_exists(const SampleSet& samples)
{
    ConsistencyCheck c{false, merged_positive_tree(samples)};
    c.exists = true;
    for (auto& n : samples.negatives())
        if (tree_simulated_by(n, c.merged)) {
            c.exists = false;
            break;
        }
    return c;
}

/// Every positive is simulated by q and no negative is.
inline bool is_consistent(const SampleSet& samples, const Lpts& q)
{
    for (auto& p : samples.positives())
        if (!tree_simulated_by(p, q)) return false;
    for (auto& n : samples.negatives())
        if (tree_simulated_by(n, q)) return false;
    return true;
}

/// Naming-independent canonical form of a tree: equal iff isomorphic.
inline std::string canonical_tree(const Lpts& tree)
{
    TreeView view(tree);
    std::vector<std::string> form(tree.num_states());
    const auto& order = view.top_down();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        std::vector<std::string> edges;
        for (auto ti : tree.outgoing(*it)) {
            const auto& t = tree.transition(ti);
            std::vector<std::string> parts;
            for (auto& [c, q] : t.target.entries()) parts.push_back(to_string(q) + ":" + form[c]);
            std::sort(parts.begin(), parts.end());
            std::string e = tree.action_name(t.action) + "{";
            for (auto& p : parts) e += p + ",";
            edges.push_back(e + "}");
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
        std::string f = "(";
        for (auto& e : edges) f += e;
        form[*it] = f + ")";
    }
    return form[tree.start()];
}

} // namespace lpts
