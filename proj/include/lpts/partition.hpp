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
#include "lpts/format.hpp"
#include "lpts/samples.hpp"
#include "lpts/simulation.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace lpts {

/// Classical partition of the positive sample states. Class 0 holds the
/// roots; classes are numbered by first occurrence in SampleSpace::order.
struct Partition {
    std::vector<std::size_t> class_of;
    std::size_t num_classes = 0;

    std::vector<std::vector<StateId>> classes() const
    {
        std::vector<std::vector<StateId>> out(num_classes);
        for (StateId s = 0; s < class_of.size(); ++s) out[class_of[s]].push_back(s);
        return out;
    }

    friend bool operator==(const Partition&, const Partition&) = default;
};

/// Renumbers an arbitrary labelling into canonical form, dropping unused
/// labels. Throws if the roots do not share a label.
inline Partition normalize_partition(const SampleSpace& sp, const std::vector<std::size_t>& labels)
{
    if (labels.size() != sp.size()) throw InvalidModel("partition does not cover the sample states");
    for (auto r : sp.roots)
        if (labels[r] != labels[sp.roots[0]]) throw InvalidModel("positive roots lie in different classes");
    std::map<std::size_t, std::size_t> renumber;
    Partition p;
    p.class_of.resize(sp.size());
    for (auto s : sp.order) {
        auto [it, fresh] = renumber.emplace(labels[s], renumber.size());
        p.class_of[s] = it->second;
    }
    p.num_classes = renumber.size();
    return p;
}

inline void validate_partition(const SampleSpace& sp, const Partition& p)
{
    if (normalize_partition(sp, p.class_of) != p) throw InvalidModel("partition is not in canonical form");
}

inline std::string class_name(std::size_t i) { return "q" + std::to_string(i); }

/// Quotient of the positive forest: one state per class, every sample
/// transition lifted to class masses.
inline Lpts quotient(const SampleSpace& sp, const Partition& p, const std::string& name = "hypothesis",
                     const std::vector<std::string>& extra_alphabet = {})
{
    LptsBuilder b(name);
    for (std::size_t i = 0; i < p.num_classes; ++i) b.add_state(class_name(i));
    b.set_start(static_cast<StateId>(p.class_of[sp.roots[0]]));
    for (auto& a : sp.forest.alphabet()) b.action(a);
    for (auto& a : extra_alphabet) b.action(a);
    for (const auto& t : sp.forest.transitions()) {
        std::vector<Distribution::Entry> e;
        for (auto& [s, q] : t.target.entries()) e.emplace_back(static_cast<StateId>(p.class_of[s]), q);
        b.add_transition(static_cast<StateId>(p.class_of[t.source]), t.action, Distribution::accumulate(std::move(e)));
    }
    return std::move(b).build();
}

namespace detail {

/// `l`'s transitions from `t` labelled `action`, ordered by serialized
/// distribution.
inline std::vector<std::size_t> ordered_candidates(const Lpts& l, StateId t, const std::string& action)
{
    std::vector<std::pair<std::string, std::size_t>> c;
    auto a = l.find_action(action);
    if (!a) return {};
    for (auto i : l.outgoing(t))
        if (l.transition(i).action == *a) c.emplace_back(serialize_distribution(l, l.transition(i).target), i);
    std::sort(c.begin(), c.end());
    std::vector<std::size_t> out;
    for (auto& [text, i] : c) out.push_back(i);
    return out;
}

/// Per forest state, the simulation image into l (roots forced to {s0}).
inline std::vector<Relation> per_sample_simulation(const SampleSet& samples, const Lpts& l)
{
    std::vector<Relation> rel;
    for (auto& p : samples.positives()) {
        rel.push_back(characterization_relation(p, l));
        if (!rel.back().contains(p.start(), l.start()))
            throw PreconditionError("positive sample '" + p.name() + "' is not simulated by '" + l.name() + "'");
    }
    return rel;
}

inline bool all_dirac(const Lpts& l)
{
    for (auto& t : l.transitions())
        if (t.target.support_size() != 1) return false;
    return true;
}

} // namespace detail

/// A partition whose quotient is simulated by l; states are grouped by their
/// simulation image. When l is all-Dirac the image is chosen as a function,
/// giving at most |S_l| classes.
inline Partition partition_from_simulation(const SampleSet& samples, const SampleSpace& sp, const Lpts& l)
{
    const auto rel = detail::per_sample_simulation(samples, l);
    std::vector<std::size_t> labels(sp.size());
    if (detail::all_dirac(l)) {
        std::vector<StateId> f(sp.size());
        for (auto r : sp.roots) f[r] = l.start();
        for (auto s : sp.order) {
            const auto& rs = rel[sp.origin[s].first];
            for (auto ti : sp.forest.outgoing(s)) {
                const auto& t = sp.forest.transition(ti);
                bool placed = false;
                for (auto i : detail::ordered_candidates(l, f[s], sp.forest.action_name(t.action))) {
                    const StateId u = l.transition(i).target.entries()[0].first;
                    bool ok = true;
                    for (auto& [c, q] : t.target.entries())
                        if (!rs.contains(sp.origin[c].second, u)) ok = false;
                    if (!ok) continue;
                    for (auto& [c, q] : t.target.entries()) f[c] = u;
                    placed = true;
                    break;
                }
                if (!placed) throw Error("internal: simulation image lost a transition");
            }
        }
        for (StateId s = 0; s < sp.size(); ++s) labels[s] = f[s];
        return normalize_partition(sp, labels);
    }
    std::map<std::vector<StateId>, std::size_t> by_image;
    for (auto s : sp.order) {
        std::vector<StateId> image;
        if (sp.is_root(s))
            image = {l.start()};
        else
            image = rel[sp.origin[s].first].image(sp.origin[s].second);
        labels[s] = by_image.emplace(image, by_image.size()).first->second;
    }
    return normalize_partition(sp, labels);
}

/// One `class` line per class, listing qualified state names.
inline std::string serialize_partition(const SampleSpace& sp, const Partition& p)
{
    std::string out = "partition\n";
    for (auto& c : p.classes()) {
        out += "class";
        for (auto s : c) out += " " + sp.forest.state_name(s);
        out += "\n";
    }
    return out;
}

inline Partition parse_partition(const SampleSpace& sp, std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    std::vector<std::optional<std::size_t>> labels(sp.size());
    std::size_t next = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto tokens = detail::tokenize_line(line, line_no);
        if (tokens.empty()) continue;
        if (!header) {
            if (tokens[0].text != "partition" || tokens.size() != 1)
                throw ParseError(line_no, tokens[0].column, "expected 'partition'");
            header = true;
            continue;
        }
        if (tokens[0].text != "class") throw ParseError(line_no, tokens[0].column, "expected 'class'");
        for (std::size_t i = 1; i < tokens.size(); ++i) {
            auto s = sp.forest.find_state(tokens[i].text);
            if (!s) throw ParseError(line_no, tokens[i].column, "unknown sample state '" + tokens[i].text + "'");
            if (labels[*s]) throw ParseError(line_no, tokens[i].column, "state listed twice");
            labels[*s] = next;
        }
        ++next;
    }
    if (!header) throw ParseError(line_no, 1, "missing 'partition' header");
    std::vector<std::size_t> plain(sp.size());
    for (StateId s = 0; s < sp.size(); ++s) {
        if (!labels[s]) throw InvalidModel("state '" + sp.forest.state_name(s) + "' is in no class");
        plain[s] = *labels[s];
    }
    return normalize_partition(sp, plain);
}

} // namespace lpts
