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
#include "lpts/partition.hpp"
#include "lpts/samples.hpp"

#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace lpts {

/// Stochastic partition: rows[s][g] is the grouping distribution [s](g) over
/// groups, present only where defined. Group 0 is the start group.
struct StochasticPartition {
    std::size_t num_groups = 0;
    std::vector<std::map<std::size_t, std::vector<Rational>>> rows;

    bool member(StateId s, std::size_t g) const
    {
        for (auto& [ctx, row] : rows[s])
            if (row[g] > 0) return true;
        return false;
    }

    /// Sample states in each group.
    std::vector<std::vector<StateId>> groups() const
    {
        std::vector<std::vector<StateId>> out(num_groups);
        for (StateId s = 0; s < rows.size(); ++s)
            for (std::size_t g = 0; g < num_groups; ++g)
                if (member(s, g)) out[g].push_back(s);
        return out;
    }

    friend bool operator==(const StochasticPartition&, const StochasticPartition&) = default;
};

inline std::vector<Rational> dirac_row(std::size_t n, std::size_t g)
{
    std::vector<Rational> r(n, Rational(0));
    r[g] = 1;
    return r;
}

/// Throws InvalidModel unless every structural condition holds: roots map
/// to the start group in every context, a non-root row is defined exactly in
/// the groups containing its parent, defined rows are distributions, and no
/// group is empty.
inline void validate_stochastic_partition(const SampleSpace& sp, const StochasticPartition& p)
{
    const auto n = p.num_groups;
    if (n == 0) throw InvalidModel("stochastic partition has no groups");
    if (p.rows.size() != sp.size()) throw InvalidModel("stochastic partition does not cover the sample states");
    for (StateId s = 0; s < sp.size(); ++s) {
        const auto& name = sp.forest.state_name(s);
        for (auto& [g, row] : p.rows[s]) {
            if (g >= n) throw InvalidModel("row context out of range at '" + name + "'");
            if (row.size() != n) throw InvalidModel("row of wrong width at '" + name + "'");
            Rational sum = 0;
            for (auto& q : row) {
                if (q < 0) throw InvalidModel("negative grouping probability at '" + name + "'");
                sum += q;
            }
            if (sum != 1) throw InvalidModel("grouping row of '" + name + "' sums to " + to_string(sum));
        }
        if (sp.is_root(s)) {
            if (p.rows[s].size() != n) throw InvalidModel("root '" + name + "' lacks a row for some group");
            for (auto& [g, row] : p.rows[s])
                if (row != dirac_row(n, 0)) throw InvalidModel("root '" + name + "' not placed in the start group");
        } else {
            const StateId parent = *sp.parent(s);
            for (std::size_t g = 0; g < n; ++g)
                if (p.member(parent, g) != (p.rows[s].count(g) != 0))
                    throw InvalidModel("row of '" + name + "' defined in the wrong groups");
        }
    }
    for (std::size_t g = 0; g < n; ++g) {
        bool any = false;
        for (StateId s = 0; s < sp.size() && !any; ++s) any = p.member(s, g);
        if (!any) throw InvalidModel("group " + std::to_string(g) + " is empty");
    }
}

/// Drops empty groups (keeping group 0 first) and reindexes rows, contexts
/// and root rows accordingly.
inline StochasticPartition compact_groups(const SampleSpace& sp, const StochasticPartition& raw)
{
    std::vector<char> used(raw.num_groups, 0);
    for (StateId s = 0; s < raw.rows.size(); ++s)
        for (std::size_t g = 0; g < raw.num_groups; ++g)
            if (raw.member(s, g)) used[g] = 1;
    std::vector<std::size_t> index(raw.num_groups, 0);
    std::size_t n = 0;
    for (std::size_t g = 0; g < raw.num_groups; ++g)
        if (used[g]) index[g] = n++;
    StochasticPartition p;
    p.num_groups = n;
    p.rows.resize(raw.rows.size());
    for (StateId s = 0; s < raw.rows.size(); ++s)
        for (auto& [g, row] : raw.rows[s]) {
            if (!used[g]) continue;
            std::vector<Rational> r(n, Rational(0));
            for (std::size_t j = 0; j < raw.num_groups; ++j)
                if (row[j] != 0) r[index[j]] = row[j];
            p.rows[s][index[g]] = std::move(r);
        }
    for (auto r : sp.roots) {
        p.rows[r].clear();
        for (std::size_t g = 0; g < n; ++g) p.rows[r][g] = dirac_row(n, 0);
    }
    return p;
}

inline std::string group_name(std::size_t i) { return "g" + std::to_string(i); }

/// Quotient over groups: for every sample transition s -a-> mu and group g
/// containing s, g -a-> lift(mu, g) with
/// lift(mu, g)(g') = sum over s' of [s'](g)(g') * mu(s').
inline Lpts stochastic_quotient(const SampleSpace& sp, const StochasticPartition& p,
                                const std::string& name = "hypothesis",
                                const std::vector<std::string>& extra_alphabet = {})
{
    validate_stochastic_partition(sp, p);
    LptsBuilder b(name);
    for (std::size_t g = 0; g < p.num_groups; ++g) b.add_state(group_name(g));
    b.set_start(0);
    for (auto& a : sp.forest.alphabet()) b.action(a);
    for (auto& a : extra_alphabet) b.action(a);
    for (const auto& t : sp.forest.transitions())
        for (std::size_t g = 0; g < p.num_groups; ++g) {
            if (!p.member(t.source, g)) continue;
            std::vector<Distribution::Entry> e;
            for (auto& [c, q] : t.target.entries()) {
                const auto& row = p.rows[c].at(g);
                for (std::size_t j = 0; j < p.num_groups; ++j)
                    if (row[j] != 0) e.emplace_back(static_cast<StateId>(j), row[j] * q);
            }
            b.add_transition(static_cast<StateId>(g), t.action, Distribution::accumulate(e));
        }
    return std::move(b).build();
}

/// Every classical partition is a stochastic one with Dirac rows.
inline StochasticPartition to_stochastic(const SampleSpace& sp, const Partition& c)
{
    StochasticPartition p;
    p.num_groups = c.num_classes;
    p.rows.resize(sp.size());
    for (auto s : sp.order) {
        if (sp.is_root(s)) {
            for (std::size_t g = 0; g < p.num_groups; ++g) p.rows[s][g] = dirac_row(p.num_groups, 0);
            continue;
        }
        p.rows[s][c.class_of[*sp.parent(s)]] = dirac_row(p.num_groups, c.class_of[s]);
    }
    return p;
}

/// One group per state of l: a sample state is put in the group of t with
/// probability w(s, t) / mu(s), w being the weight function of the first
/// matching transition of l (in serialized order).
inline StochasticPartition stochastic_partition_from_simulation(const SampleSet& samples, const SampleSpace& sp,
                                                                const Lpts& l)
{
    const auto per_sample = detail::per_sample_simulation(samples, l);
    Relation rel(sp.size(), l.num_states());
    for (StateId s = 0; s < sp.size(); ++s)
        for (auto u : per_sample[sp.origin[s].first].image(sp.origin[s].second)) rel.insert(s, u);
    // Groups are indexed by l's states with the start state moved to index 0.
    const std::size_t n = l.num_states();
    std::vector<std::size_t> group_of(n);
    std::vector<StateId> state_of;
    state_of.push_back(l.start());
    for (StateId u = 0; u < n; ++u)
        if (u != l.start()) state_of.push_back(u);
    for (std::size_t g = 0; g < n; ++g) group_of[state_of[g]] = g;

    StochasticPartition p;
    p.num_groups = n;
    p.rows.resize(sp.size());
    for (auto r : sp.roots)
        for (std::size_t g = 0; g < n; ++g) p.rows[r][g] = dirac_row(n, 0);
    for (auto s : sp.order)
        for (std::size_t g = 0; g < n; ++g) {
            if (!p.member(s, g)) continue;
            for (auto ti : sp.forest.outgoing(s)) {
                const auto& t = sp.forest.transition(ti);
                std::optional<WeightFunction> w;
                for (auto i : detail::ordered_candidates(l, state_of[g], sp.forest.action_name(t.action))) {
                    auto res = dist_leq(t.target, l.transition(i).target, rel);
                    if (auto* wf = std::get_if<WeightFunction>(&res)) {
                        w = std::move(*wf);
                        break;
                    }
                }
                if (!w) throw Error("internal: simulation image lost a transition");
                for (auto& [c, q] : t.target.entries()) {
                    std::vector<Rational> row(n, Rational(0));
                    for (auto& [a, u, x] : w->weights)
                        if (a == c) row[group_of[u]] = x / q;
                    p.rows[c][g] = std::move(row);
                }
            }
        }
    return compact_groups(sp, p);
}

/// `groups <n>` followed by one `row <state> <context> { <group>: <p>, ... }`
/// line per defined row (zero entries omitted).
inline std::string serialize_stochastic_partition(const SampleSpace& sp, const StochasticPartition& p)
{
    std::string out = "stochastic-partition\ngroups " + std::to_string(p.num_groups) + "\n";
    for (auto s : sp.order)
        for (auto& [g, row] : p.rows[s]) {
            out += "row " + sp.forest.state_name(s) + " " + std::to_string(g) + " {";
            bool first = true;
            for (std::size_t j = 0; j < row.size(); ++j) {
                if (row[j] == 0) continue;
                out += first ? " " : ", ";
                first = false;
                out += std::to_string(j) + ": " + to_string(row[j]);
            }
            out += " }\n";
        }
    return out;
}

inline StochasticPartition parse_stochastic_partition(const SampleSpace& sp, std::string_view text)
{
    using detail::Token;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    int stage = 0;
    StochasticPartition p;
    p.rows.resize(sp.size());
    auto index = [&](const Token& t, std::size_t limit) {
        std::size_t v = 0;
        if (t.kind != Token::Kind::Ident || t.text.empty() ||
            t.text.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError(line_no, t.column, "expected a group index");
        v = std::stoul(t.text);
        if (v >= limit) throw ParseError(line_no, t.column, "group index out of range");
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        auto tk = detail::tokenize_line(line, line_no);
        if (tk.empty()) continue;
        if (stage == 0) {
            if (tk.size() != 1 || tk[0].text != "stochastic-partition")
                throw ParseError(line_no, tk[0].column, "expected 'stochastic-partition'");
            stage = 1;
        } else if (stage == 1) {
            if (tk.size() != 2 || tk[0].text != "groups") throw ParseError(line_no, tk[0].column, "expected 'groups <n>'");
            p.num_groups = index(tk[1], static_cast<std::size_t>(-1));
            stage = 2;
        } else {
            if (tk.size() < 5 || tk[0].text != "row" || tk[3].kind != Token::Kind::LBrace ||
                tk.back().kind != Token::Kind::RBrace)
                throw ParseError(line_no, tk[0].column, "expected 'row <state> <group> { ... }'");
            auto s = sp.forest.find_state(tk[1].text);
            if (!s) throw ParseError(line_no, tk[1].column, "unknown sample state '" + tk[1].text + "'");
            auto g = index(tk[2], p.num_groups);
            if (p.rows[*s].count(g)) throw ParseError(line_no, tk[2].column, "duplicate row");
            std::vector<Rational> row(p.num_groups, Rational(0));
            for (std::size_t i = 4; i + 1 < tk.size();) {
                if (i + 2 >= tk.size() || tk[i + 1].kind != Token::Kind::Colon)
                    throw ParseError(line_no, tk[i].column, "expected '<group>: <probability>'");
                auto j = index(tk[i], p.num_groups);
                auto q = parse_rational(tk[i + 2].text);
                if (!q) throw ParseError(line_no, tk[i + 2].column, "malformed probability");
                row[j] = *q;
                i += 3;
                if (i + 1 < tk.size()) {
                    if (tk[i].kind != Token::Kind::Comma) throw ParseError(line_no, tk[i].column, "expected ','");
                    ++i;
                }
            }
            p.rows[*s][g] = std::move(row);
        }
    }
    if (stage < 2) throw ParseError(line_no, 1, "incomplete stochastic-partition header");
    validate_stochastic_partition(sp, p);
    return p;
}

} // namespace lpts
