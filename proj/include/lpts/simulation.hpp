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

#include "lpts/dist_leq.hpp"
#include "lpts/error.hpp"
#include "lpts/model.hpp"
#include "lpts/relation.hpp"

#include <algorithm>
#include <map>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace lpts {

/// Total map from the states of a counterexample tree to model states.
struct ExecutionMapping {
    std::vector<StateId> image;

    friend bool operator==(const ExecutionMapping&, const ExecutionMapping&) = default;
};

/// A stochastic tree together with its execution mapping into the model it
/// was extracted from.
struct Counterexample {
    Lpts tree;
    ExecutionMapping mapping;
};

struct SimulationResult {
    bool holds = false;
    /// Present iff !holds: a tree C with C <= l1, C not<= l2, mapped into l1.
    std::optional<Counterexample> cex;
};

struct EquivalenceResult {
    bool equal = false;
    /// Counterexample to l1 <= l2 (mapped into l1), when that direction fails.
    std::optional<Counterexample> left_cex;
    /// Counterexample to l2 <= l1 (mapped into l2), when that direction fails.
    std::optional<Counterexample> right_cex;
};

namespace detail {

/// Transitions of a model indexed by (state, action).
class ActionIndex {
public:
    explicit ActionIndex(const Lpts& l)
        : actions_(l.alphabet().size()), table_(l.num_states() * l.alphabet().size())
    {
        for (std::size_t i = 0; i < l.transitions().size(); ++i) {
            const auto& t = l.transition(i);
            table_[t.source * actions_ + t.action].push_back(i);
        }
    }

    const std::vector<std::size_t>& at(StateId s, ActionId a) const { return table_[s * actions_ + a]; }

private:
    std::size_t actions_;
    std::vector<std::vector<std::size_t>> table_;
};

/// Greatest-fixed-point computation of the coarsest strong simulation, with
/// optional bookkeeping of one counterexample per removed pair.
///
/// Counterexamples are kept as a DAG of nodes. Each node is labelled with a
/// left-model state and carries edges, each edge copying one left transition
/// with one child node per support state. When (s1, s2) is removed because
/// s1 -a-> mu1 is unmatched, every a-successor mu2 of s2 yields a witness S;
/// the child for s' in S must refute every t in Supp(mu2) \ R(S), so it
/// merges the root edges of the counterexamples already stored for (s', t).
class SimulationEngine {
public:
    struct Edge {
        std::size_t transition;
        std::vector<std::size_t> children;

        friend bool operator==(const Edge&, const Edge&) = default;
    };
    struct Node {
        StateId state;
        std::vector<Edge> edges;
    };

    SimulationEngine(const Lpts& l1, const Lpts& l2, bool record)
        : l1_(l1), l2_(l2), index2_(l2), amap_(action_map(l1, l2)), record_(record),
          relation_(Relation::full(l1.num_states(), l2.num_states())),
          cex_of_(record ? l1.num_states() * l2.num_states() : 0, npos),
          leaf_of_(record ? l1.num_states() : 0, npos)
    {
    }

    /// Runs to the fixed point, or until `stop` has been removed.
    void run(std::optional<std::pair<StateId, StateId>> stop = std::nullopt)
    {
        bool changed = true;
        while (changed) {
            changed = false;
            for (StateId s1 = 0; s1 < l1_.num_states(); ++s1)
                for (StateId s2 = 0; s2 < l2_.num_states(); ++s2) {
                    if (!relation_.contains(s1, s2)) continue;
                    auto bad = violating_transition(s1, s2);
                    if (!bad) continue;
                    // Built before the erase so witnesses never refer back to this pair.
                    if (record_) cex_of_[s1 * l2_.num_states() + s2] = build_node(s1, s2, *bad);
                    relation_.erase(s1, s2);
                    changed = true;
                    if (stop && stop->first == s1 && stop->second == s2) return;
                }
        }
    }

    const Relation& relation() const { return relation_; }

    /// Expands the stored DAG for a removed pair into a tree with fresh
    /// state names n0, n1, ... in breadth-first order.
    Counterexample counterexample(StateId s1, StateId s2, std::size_t max_states = 1u << 20) const
    {
        const std::size_t root = cex_of_.at(s1 * l2_.num_states() + s2);
        if (root == npos) throw PreconditionError("pair is in the simulation; no counterexample");
        std::vector<std::size_t> instance_node{root};
        std::vector<bool> used_action(l1_.alphabet().size(), false);
        struct Pending {
            StateId source;
            ActionId action;
            std::vector<Distribution::Entry> entries;
        };
        std::vector<Pending> pending;
        for (std::size_t head = 0; head < instance_node.size(); ++head) {
            const Node& node = nodes_[instance_node[head]];
            for (const Edge& e : node.edges) {
                const auto& t = l1_.transition(e.transition);
                used_action[t.action] = true;
                Pending p{static_cast<StateId>(head), t.action, {}};
                const auto entries = t.target.entries();
                for (std::size_t i = 0; i < entries.size(); ++i) {
                    const auto child = static_cast<StateId>(instance_node.size());
                    instance_node.push_back(e.children[i]);
                    p.entries.emplace_back(child, entries[i].second);
                }
                if (instance_node.size() > max_states)
                    throw BoundExceeded("counterexample tree exceeds " + std::to_string(max_states) + " states");
                pending.push_back(std::move(p));
            }
        }
        LptsBuilder b("cex");
        for (std::size_t i = 0; i < instance_node.size(); ++i) b.add_state("n" + std::to_string(i));
        std::vector<ActionId> action_id(l1_.alphabet().size());
        for (std::size_t a = 0; a < used_action.size(); ++a)
            if (used_action[a]) action_id[a] = b.action(l1_.alphabet()[a]);
        b.set_start(0);
        for (auto& p : pending)
            b.add_transition(p.source, action_id[p.action], Distribution::from_entries(std::move(p.entries)));
        Counterexample c{std::move(b).build(), {}};
        c.mapping.image.reserve(instance_node.size());
        for (auto n : instance_node) c.mapping.image.push_back(nodes_[n].state);
        return c;
    }

private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    const std::vector<std::size_t>& candidates(StateId s2, ActionId a1) const
    {
        static const std::vector<std::size_t> none;
        auto a2 = amap_[a1];
        if (!a2) return none;
        return index2_.at(s2, *a2);
    }

    std::optional<std::size_t> violating_transition(StateId s1, StateId s2) const
    {
        for (auto i1 : l1_.outgoing(s1)) {
            const auto& t1 = l1_.transition(i1);
            bool matched = false;
            for (auto i2 : candidates(s2, t1.action))
                if (dist_related(t1.target, l2_.transition(i2).target, relation_)) {
                    matched = true;
                    break;
                }
            if (!matched) return i1;
        }
        return std::nullopt;
    }

    std::size_t leaf(StateId s)
    {
        if (leaf_of_[s] == npos) {
            leaf_of_[s] = nodes_.size();
            nodes_.push_back(Node{s, {}});
        }
        return leaf_of_[s];
    }

    std::size_t build_node(StateId s1, StateId s2, std::size_t i1)
    {
        const auto& mu1 = l1_.transition(i1).target;
        std::map<StateId, std::set<StateId>> needed;
        for (auto i2 : candidates(s2, l1_.transition(i1).action)) {
            const auto& mu2 = l2_.transition(i2).target;
            auto result = dist_leq(mu1, mu2, relation_);
            const auto& witness = std::get<WitnessSubset>(result).subset;
            const auto image = relation_.image(std::span<const StateId>(witness));
            for (auto& [t, q] : mu2.entries()) {
                if (std::binary_search(image.begin(), image.end(), t)) continue;
                for (StateId s : witness) needed[s].insert(t);
            }
        }
        Edge edge{i1, {}};
        for (auto& [s, p] : mu1.entries()) {
            auto it = needed.find(s);
            if (it == needed.end()) {
                edge.children.push_back(leaf(s));
                continue;
            }
            if (it->second.size() == 1) {
                edge.children.push_back(cex_of_[s * l2_.num_states() + *it->second.begin()]);
                continue;
            }
            Node merged{s, {}};
            for (StateId t : it->second)
                for (const Edge& e : nodes_[cex_of_[s * l2_.num_states() + t]].edges)
                    if (std::find(merged.edges.begin(), merged.edges.end(), e) == merged.edges.end())
                        merged.edges.push_back(e);
            edge.children.push_back(nodes_.size());
            nodes_.push_back(std::move(merged));
        }
        nodes_.push_back(Node{s1, {std::move(edge)}});
        return nodes_.size() - 1;
    }

    const Lpts& l1_;
    const Lpts& l2_;
    ActionIndex index2_;
    std::vector<std::optional<ActionId>> amap_;
    bool record_;
    Relation relation_;
    std::vector<Node> nodes_;
    std::vector<std::size_t> cex_of_;
    std::vector<std::size_t> leaf_of_;
};

} // namespace detail

/// The coarsest strong simulation between the states of l1 and l2.
inline Relation coarsest_simulation(const Lpts& l1, const Lpts& l2)
{
    detail::SimulationEngine engine(l1, l2, false);
    engine.run();
    return engine.relation();
}

/// Decides l1 <= l2; on failure returns a tree counterexample with an
/// execution mapping into l1.
inline SimulationResult simulates(const Lpts& l1, const Lpts& l2)
{
    detail::SimulationEngine engine(l1, l2, true);
    const auto start = std::make_pair(l1.start(), l2.start());
    engine.run(start);
    SimulationResult r;
    r.holds = engine.relation().contains(start.first, start.second);
    if (!r.holds) r.cex = engine.counterexample(start.first, start.second);
    return r;
}

inline EquivalenceResult equivalent(const Lpts& l1, const Lpts& l2)
{
    EquivalenceResult r;
    auto forward = simulates(l1, l2);
    auto backward = simulates(l2, l1);
    r.equal = forward.holds && backward.holds;
    r.left_cex = std::move(forward.cex);
    r.right_cex = std::move(backward.cex);
    return r;
}

/// For a tree: the relation computed bottom-up by height where s1 R s2 iff
/// every s1 -a-> mu1 is matched by some s2 -a-> mu2 with mu1 [=_R mu2.
/// On trees this coincides with the coarsest simulation.
inline Relation characterization_relation(const Lpts& tree, const Lpts& l2)
{
    TreeView view(tree);
    detail::ActionIndex index2(l2);
    const auto amap = action_map(tree, l2);
    Relation r(tree.num_states(), l2.num_states());
    const auto& order = view.top_down();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const StateId s1 = *it;
        for (StateId s2 = 0; s2 < l2.num_states(); ++s2) {
            bool ok = true;
            for (auto i1 : tree.outgoing(s1)) {
                const auto& t1 = tree.transition(i1);
                bool matched = false;
                if (auto a2 = amap[t1.action])
                    for (auto i2 : index2.at(s2, *a2))
                        if (dist_related(t1.target, l2.transition(i2).target, r)) {
                            matched = true;
                            break;
                        }
                if (!matched) {
                    ok = false;
                    break;
                }
            }
            if (ok) r.insert(s1, s2);
        }
    }
    return r;
}

/// tree <= l by the same characterization, evaluated on demand from the
/// root pair so only pairs below it are ever decided.
inline bool tree_simulated_by(const Lpts& tree, const Lpts& l)
{
    if (!classify(tree).is_tree) throw PreconditionError("'" + tree.name() + "' is not a tree");
    detail::ActionIndex index(l);
    const auto amap = action_map(tree, l);
    const std::size_t n2 = l.num_states();
    // 0 undecided, 1 related, 2 unrelated; `known` mirrors the 1 entries.
    std::vector<char> memo(tree.num_states() * n2, 0);
    Relation known(tree.num_states(), n2);
    std::function<bool(StateId, StateId)> related = [&](StateId s1, StateId s2) -> bool {
        char& m = memo[s1 * n2 + s2];
        if (m != 0) return m == 1;
        bool ok = true;
        for (auto i1 : tree.outgoing(s1)) {
            const auto& t1 = tree.transition(i1);
            bool matched = false;
            if (auto a2 = amap[t1.action])
                for (auto i2 : index.at(s2, *a2)) {
                    const auto& mu2 = l.transition(i2).target;
                    for (auto& [c, p] : t1.target.entries())
                        for (auto& [u, q] : mu2.entries()) related(c, u);
                    if (dist_related(t1.target, mu2, known)) {
                        matched = true;
                        break;
                    }
                }
            if (!matched) {
                ok = false;
                break;
            }
        }
        m = ok ? 1 : 2;
        if (ok) known.insert(s1, s2);
        return ok;
    };
    return related(tree.start(), l.start());
}

/// For every c -a-> mu_c there is m(c) -a-> mu in `target` such that m is
/// injective on Supp(mu_c) and mu_c(c') = mu(m(c')) for every c' in it.
inline bool verify_execution_mapping(const Lpts& tree, const ExecutionMapping& m, const Lpts& target)
{
    if (m.image.size() != tree.num_states()) return false;
    for (StateId img : m.image)
        if (img >= target.num_states()) return false;
    detail::ActionIndex index(target);
    const auto amap = action_map(tree, target);
    for (const auto& t : tree.transitions()) {
        auto a = amap[t.action];
        if (!a) return false;
        std::vector<StateId> images;
        for (auto& [c, p] : t.target.entries()) images.push_back(m.image[c]);
        auto sorted = images;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
        bool found = false;
        for (auto i : index.at(m.image[t.source], *a)) {
            const auto& mu = target.transition(i).target;
            bool ok = true;
            std::size_t k = 0;
            for (auto& [c, p] : t.target.entries())
                if (mu(images[k++]) != p) {
                    ok = false;
                    break;
                }
            if (ok) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

} // namespace lpts
