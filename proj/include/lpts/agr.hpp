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

#include "lpts/active.hpp"
#include "lpts/compose.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lpts {

/// Projects a counterexample of L1 || A onto A. Steps in which A idles are
/// contracted; every other step carries A's factor distribution, with one
/// child per A-state, and counterexample children sharing an A-state are
/// merged into that child. The result comes with its mapping into A.
inline Counterexample project_onto_A(const Counterexample& cex, const ComposedLpts& composed, const Lpts& a)
{
    const auto& sys = composed.system;
    if (!verify_execution_mapping(cex.tree, cex.mapping, sys))
        throw PreconditionError("counterexample mapping into the composition is invalid");
    if (composed.provenance.size() != sys.transitions().size()) throw PreconditionError("provenance missing");
    const auto& tree = cex.tree;
    const auto amap = action_map(tree, sys);

    struct Edge {
        std::size_t a_transition;
        std::vector<std::size_t> children;
    };
    struct Node {
        StateId a_state;
        std::vector<Edge> edges;
    };
    std::vector<Node> nodes;

    std::function<void(StateId, std::vector<Edge>&)> collect = [&](StateId c, std::vector<Edge>& out) {
        const StateId img = cex.mapping.image[c];
        for (auto ti : tree.outgoing(c)) {
            const auto& t = tree.transition(ti);
            std::vector<Distribution::Entry> e;
            for (auto& [child, q] : t.target.entries()) e.emplace_back(cex.mapping.image[child], q);
            auto idx = sys.find_transition(img, *amap[t.action], Distribution::from_entries(e));
            if (!idx) throw PreconditionError("counterexample step has no matching composed transition");
            const auto& prov = composed.provenance[*idx];
            if (prov.clause == CompositionClause::LeftOnly) {
                for (auto& [child, q] : t.target.entries()) collect(child, out);
                continue;
            }
            if (!prov.right) throw PreconditionError("provenance lacks the A-side transition");
            const auto& nu = a.transition(*prov.right).target;
            Edge edge{*prov.right, {}};
            for (auto& [as, q] : nu.entries()) {
                std::vector<Edge> merged;
                for (auto& [child, p] : t.target.entries())
                    if (composed.components[cex.mapping.image[child]].second == as) collect(child, merged);
                nodes.push_back(Node{as, std::move(merged)});
                edge.children.push_back(nodes.size() - 1);
            }
            out.push_back(std::move(edge));
        }
    };

    std::vector<Edge> root_edges;
    collect(tree.start(), root_edges);
    nodes.push_back(Node{composed.components[cex.mapping.image[tree.start()]].second, std::move(root_edges)});
    const std::size_t root = nodes.size() - 1;

    // Breadth-first renumbering from the root.
    std::vector<std::size_t> order{root};
    for (std::size_t h = 0; h < order.size(); ++h)
        for (auto& e : nodes[order[h]].edges)
            for (auto c : e.children) order.push_back(c);
    std::vector<StateId> id(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) id[order[i]] = static_cast<StateId>(i);
    LptsBuilder b("projection");
    for (std::size_t i = 0; i < order.size(); ++i) b.add_state("n" + std::to_string(i));
    b.set_start(0);
    Counterexample out{trivial_lpts(), {}};
    for (auto n : order) {
        out.mapping.image.push_back(nodes[n].a_state);
        for (auto& e : nodes[n].edges) {
            const auto& at = a.transition(e.a_transition);
            std::vector<Distribution::Entry> entries;
            std::size_t k = 0;
            for (auto& [as, q] : at.target.entries()) entries.emplace_back(id[e.children[k++]], q);
            b.add_transition(id[n], b.action(a.action_name(at.action)), Distribution::from_entries(entries));
        }
    }
    out.tree = std::move(b).build();
    return out;
}

enum class Spuriousness { Real, Spurious };

/// A projected negative is real iff L2 simulates it.
inline Spuriousness spuriousness(const Lpts& n, const Lpts& l2)
{
    return simulates(n, l2).holds ? Spuriousness::Real : Spuriousness::Spurious;
}

struct AgrTask {
    Lpts l1, l2, spec;
    LearnMode mode = LearnMode::Partition;
    LearningBounds bounds;
    /// Also run the monolithic check and a direct counterexample on violation.
    bool confirm = false;
    /// Called after every assumption-learning round.
    RoundObserver observer;
};

struct AgrStats {
    std::size_t rounds = 0;
    std::size_t premise1_checks = 0;
    std::size_t premise2_checks = 0;
    std::size_t spurious = 0;
    std::vector<std::size_t> assumption_sizes;
    std::size_t max_assumption_states = 0;
};

struct AgrOutcome {
    bool holds = false;
    std::optional<Lpts> assumption;
    /// Premise-1 counterexample, mapped into L1 || A.
    std::optional<Counterexample> real_cex;
    std::optional<Lpts> cex_system;
    std::optional<Counterexample> monolithic_cex;
    std::optional<bool> monolithic_holds;
    AgrStats stats;
    std::vector<std::string> warnings;
    LearningTranscript transcript;
};

namespace detail {
struct AgrStop {};
} // namespace detail

/// Checks L1 || L2 <= P with rule ASym, learning the assumption A over L2's
/// alphabet from the two premises L1 || A <= P and L2 <= A.
inline AgrOutcome check_asym(const AgrTask& task)
{
    AgrOutcome out;
    for (auto& x : task.spec.alphabet())
        if (!task.l1.find_action(x) && !task.l2.find_action(x))
            out.warnings.push_back("spec action '" + x + "' is in neither component alphabet");
    LearningBounds bounds = task.bounds;
    bounds.learn.extra_alphabet = task.l2.alphabet();
    bounds.learn.name = "assumption";
    Teacher teacher = [&](const Lpts& a) -> TeacherResponse {
        ++out.stats.rounds;
        out.stats.assumption_sizes.push_back(a.num_states());
        out.stats.max_assumption_states = std::max(out.stats.max_assumption_states, a.num_states());
        ++out.stats.premise2_checks;
        auto p2 = simulates(task.l2, a);
        if (!p2.holds) return TeacherResponse::make(TeacherResponse::Kind::Positive, std::move(p2.cex), task.l2);
        ++out.stats.premise1_checks;
        auto composed = compose(task.l1, a);
        auto p1 = simulates(composed.system, task.spec);
        if (p1.holds) {
            out.holds = true;
            out.assumption = a;
            throw detail::AgrStop{};
        }
        auto n = project_onto_A(*p1.cex, composed, a);
        if (!verify_execution_mapping(n.tree, n.mapping, a) || n.mapping.image[n.tree.start()] != a.start())
            throw Error("internal: projected counterexample does not map into the assumption");
        if (spuriousness(n.tree, task.l2) == Spuriousness::Real) {
            out.real_cex = std::move(p1.cex);
            out.cex_system = composed.system;
            throw detail::AgrStop{};
        }
        ++out.stats.spurious;
        return TeacherResponse::make(TeacherResponse::Kind::Negative, std::move(n), a);
    };
    try {
        out.transcript = learn(teacher, task.mode, bounds, task.observer);
        if (out.transcript.final) throw Error("internal: assume-guarantee teacher declared equivalence");
        throw BoundExceeded(out.transcript.bound_message);
    } catch (const detail::AgrStop&) {
    }
    const auto system = compose(task.l1, task.l2).system;
    if (out.holds) {
        if (!simulates(task.l2, *out.assumption).holds || !simulates(compose(task.l1, *out.assumption).system, task.spec).holds)
            throw Error("internal: returned assumption fails a premise");
    } else {
        if (!tree_simulated_by(out.real_cex->tree, system) || tree_simulated_by(out.real_cex->tree, task.spec))
            throw Error("internal: reported counterexample is not a real counterexample");
    }
    if (task.confirm) {
        auto mono = simulates(system, task.spec);
        out.monolithic_holds = mono.holds;
        out.monolithic_cex = std::move(mono.cex);
    }
    return out;
}

inline nlohmann::ordered_json agr_to_json(const AgrOutcome& o)
{
    nlohmann::ordered_json j;
    j["verdict"] = o.holds ? "holds" : "violated";
    if (o.assumption) j["assumption"] = serialize_lpts(*o.assumption);
    if (o.real_cex) j["counterexample"] = serialize_cex(*o.real_cex, *o.cex_system);
    if (o.monolithic_holds) j["monolithic_holds"] = *o.monolithic_holds;
    j["stats"] = {{"rounds", o.stats.rounds},
                  {"premise1_checks", o.stats.premise1_checks},
                  {"premise2_checks", o.stats.premise2_checks},
                  {"spurious", o.stats.spurious},
                  {"assumption_sizes", o.stats.assumption_sizes},
                  {"max_assumption_states", o.stats.max_assumption_states}};
    j["warnings"] = o.warnings;
    return j;
}

} // namespace lpts
