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

#include "lpts/samples.hpp"
#include "lpts/smt/script.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lpts::smt {

namespace detail {

using Index = std::vector<std::size_t>;

inline Index extend(Index base, std::initializer_list<std::size_t> more)
{
    base.insert(base.end(), more);
    return base;
}

/// Constrains `d` to mean mu_n [=_R lift: under d a weight function over
/// (child, column) exists, under not d a witness subset with its R-image
/// has more mass on the left than the image carries on the right.
inline void encode_dist_leq(ScriptBuilder& sb, const std::string& d, const Index& base, const Lpts& tree,
                            const Distribution& mu_n, const std::vector<std::string>& lift,
                            const std::function<std::string(StateId, std::size_t)>& related,
                            const std::string& where)
{
    const auto cols = lift.size();
    std::vector<std::string> weight_block;
    std::vector<std::vector<std::string>> col_terms(cols);
    for (auto& [c, q] : mu_n.entries()) {
        std::vector<std::string> row;
        for (std::size_t j = 0; j < cols; ++j) {
            auto w = sb.declare("w", extend(base, {c, j}), Sort::Real,
                                "weight of (" + tree.state_name(c) + ", " + std::to_string(j) + ") in " + where);
            weight_block.push_back(op2(">=", w, "0.0"));
            weight_block.push_back(implies(op2(">", w, "0.0"), related(c, j)));
            row.push_back(w);
            col_terms[j].push_back(w);
        }
        weight_block.push_back(eq(sum(row), real_literal(q)));
    }
    for (std::size_t j = 0; j < cols; ++j) weight_block.push_back(eq(sum(col_terms[j]), lift[j]));
    sb.assert_(implies(d, and_(weight_block)));

    std::vector<std::string> witness_block, left_mass, right_mass;
    std::vector<std::string> xs;
    for (auto& [c, q] : mu_n.entries()) {
        auto x = sb.declare("x", extend(base, {c}), Sort::Bool,
                            tree.state_name(c) + " in witness subset of " + where);
        xs.push_back(x);
        left_mass.push_back(ite(x, real_literal(q), "0.0"));
    }
    for (std::size_t j = 0; j < cols; ++j) {
        auto y = sb.declare("y", extend(base, {j}), Sort::Bool,
                            "column " + std::to_string(j) + " in witness image of " + where);
        std::vector<std::string> reach;
        std::size_t k = 0;
        for (auto& [c, q] : mu_n.entries()) reach.push_back(and_({xs[k++], related(c, j)}));
        witness_block.push_back(eq(y, or_(reach)));
        right_mass.push_back(ite(y, lift[j], "0.0"));
    }
    witness_block.push_back(op2(">", sum(left_mass), sum(right_mass)));
    sb.assert_(implies(not_(d), and_(witness_block)));
}

/// Positive transitions grouped by action name.
inline std::vector<std::size_t> matching_positive(const SampleSpace& sp, const std::string& action)
{
    std::vector<std::size_t> out;
    auto a = sp.forest.find_action(action);
    if (!a) return out;
    for (std::size_t tp = 0; tp < sp.forest.transitions().size(); ++tp)
        if (sp.forest.transition(tp).action == *a) out.push_back(tp);
    return out;
}

} // namespace detail

/// Satisfiable iff a partition with at most k classes has a quotient
/// consistent with the samples. Classes may be left empty.
inline ConstraintScript encode_partition(const SampleSet& samples, std::size_t k)
{
    using detail::Index;
    if (k == 0) throw PreconditionError("k must be at least 1");
    const auto sp = sample_space(samples);
    ScriptBuilder sb("classical partition, k = " + std::to_string(k));
    const auto& f = sp.forest;

    sb.comment("class membership: exactly one class per sample state, roots in class 0");
    std::vector<std::vector<std::string>> v(sp.size());
    for (auto s : sp.order)
        for (std::size_t i = 0; i < k; ++i)
            v[s].push_back(sb.declare("v", {s, i}, Sort::Bool, "[" + f.state_name(s) + "] = " + std::to_string(i)));
    for (auto s : sp.order) {
        sb.assert_(or_(v[s]));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) sb.assert_(not_(and_({v[s][i], v[s][j]})));
    }
    for (auto r : sp.roots) sb.assert_(v[r][0]);

    sb.comment("l: contribution of each support state to the lifted class mass");
    std::vector<std::vector<std::string>> lift(f.transitions().size());
    for (std::size_t tp = 0; tp < f.transitions().size(); ++tp) {
        const auto& mu = f.transition(tp).target;
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<std::string> parts;
            for (auto& [c, q] : mu.entries()) {
                auto l = sb.declare("l", {tp, i, c}, Sort::Real,
                                    "mass of " + f.state_name(c) + " in class " + std::to_string(i) +
                                        " for positive transition " + std::to_string(tp));
                sb.assert_(eq(l, ite(v[c][i], real_literal(q), "0.0")));
                parts.push_back(l);
            }
            lift[tp].push_back(sum(parts));
        }
    }

    for (std::size_t j = 0; j < samples.negatives().size(); ++j) {
        const auto& n = samples.negatives()[j];
        sb.comment("negative sample " + std::to_string(j) + " (" + n.name() + ")");
        std::vector<std::vector<std::string>> R(n.num_states());
        for (StateId s = 0; s < n.num_states(); ++s)
            for (std::size_t i = 0; i < k; ++i)
                R[s].push_back(sb.declare("R", {j, s, i}, Sort::Bool,
                                          n.state_name(s) + " simulated by class " + std::to_string(i)));
        std::vector<std::vector<std::vector<std::string>>> matched(n.num_states(),
                                                                   std::vector<std::vector<std::string>>(k));
        for (std::size_t tn = 0; tn < n.transitions().size(); ++tn) {
            const auto& t = n.transition(tn);
            std::vector<std::vector<std::string>> options(k);
            for (auto tp : detail::matching_positive(sp, n.action_name(t.action))) {
                const Index base{j, tn, tp};
                auto d = sb.declare("d", base, Sort::Bool,
                                    "negative transition " + std::to_string(tn) + " of sample " +
                                        std::to_string(j) + " lifted-related to positive transition " +
                                        std::to_string(tp));
                detail::encode_dist_leq(sb, d, base, n, t.target, lift[tp],
                                        [&](StateId c, std::size_t i) { return R[c][i]; }, ConstraintScript::key("d", base));
                const auto src = f.transition(tp).source;
                for (std::size_t i = 0; i < k; ++i) options[i].push_back(and_({d, v[src][i]}));
            }
            for (std::size_t i = 0; i < k; ++i) matched[t.source][i].push_back(or_(options[i]));
        }
        for (StateId s = 0; s < n.num_states(); ++s)
            for (std::size_t i = 0; i < k; ++i) sb.assert_(eq(R[s][i], and_(matched[s][i])));
        sb.assert_(not_(R[n.start()][0]));
    }
    return std::move(sb).finish();
}

/// Satisfiable iff a stochastic partition with at most k groups has a
/// quotient consistent with the samples. Groups may be left empty.
inline ConstraintScript encode_stochastic(const SampleSet& samples, std::size_t k)
{
    using detail::Index;
    if (k == 0) throw PreconditionError("k must be at least 1");
    const auto sp = sample_space(samples);
    ScriptBuilder sb("stochastic partition, k = " + std::to_string(k));
    const auto& f = sp.forest;

    sb.comment("g: grouping probabilities [s](i)(j); m: group membership");
    std::vector<std::vector<std::vector<std::string>>> g(sp.size(), std::vector<std::vector<std::string>>(k));
    std::vector<std::vector<std::string>> m(sp.size());
    for (auto s : sp.order) {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t jj = 0; jj < k; ++jj)
                g[s][i].push_back(sb.declare("g", {s, i, jj}, Sort::Real,
                                             "[" + f.state_name(s) + "](" + std::to_string(i) + ")(" +
                                                 std::to_string(jj) + ")"));
        for (std::size_t jj = 0; jj < k; ++jj)
            m[s].push_back(sb.declare("m", {s, jj}, Sort::Bool, f.state_name(s) + " in group " + std::to_string(jj)));
    }
    for (auto s : sp.order) {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t jj = 0; jj < k; ++jj) sb.assert_(op2(">=", g[s][i][jj], "0.0"));
        for (std::size_t jj = 0; jj < k; ++jj) {
            std::vector<std::string> col;
            for (std::size_t i = 0; i < k; ++i) col.push_back(g[s][i][jj]);
            sb.assert_(eq(m[s][jj], op2(">", sum(col), "0.0")));
        }
        if (sp.is_root(s)) {
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t jj = 0; jj < k; ++jj) sb.assert_(eq(g[s][i][jj], jj == 0 ? "1.0" : "0.0"));
            continue;
        }
        const StateId parent = *sp.parent(s);
        for (std::size_t i = 0; i < k; ++i)
            sb.assert_(ite(m[parent][i], eq(sum(g[s][i]), "1.0"), eq(sum(g[s][i]), "0.0")));
    }

    // lift(mu_p, i)(j) = sum over c of mu_p(c) * [c](i)(j): constant times variable.
    std::vector<std::vector<std::vector<std::string>>> lift(f.transitions().size());
    for (std::size_t tp = 0; tp < f.transitions().size(); ++tp) {
        const auto& mu = f.transition(tp).target;
        lift[tp].resize(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t jj = 0; jj < k; ++jj) {
                std::vector<std::string> parts;
                for (auto& [c, q] : mu.entries()) parts.push_back(op2("*", real_literal(q), g[c][i][jj]));
                lift[tp][i].push_back(sum(parts));
            }
    }

    for (std::size_t j = 0; j < samples.negatives().size(); ++j) {
        const auto& n = samples.negatives()[j];
        sb.comment("negative sample " + std::to_string(j) + " (" + n.name() + ")");
        std::vector<std::vector<std::string>> R(n.num_states());
        for (StateId s = 0; s < n.num_states(); ++s)
            for (std::size_t i = 0; i < k; ++i)
                R[s].push_back(sb.declare("R", {j, s, i}, Sort::Bool,
                                          n.state_name(s) + " simulated by group " + std::to_string(i)));
        std::vector<std::vector<std::vector<std::string>>> matched(n.num_states(),
                                                                   std::vector<std::vector<std::string>>(k));
        for (std::size_t tn = 0; tn < n.transitions().size(); ++tn) {
            const auto& t = n.transition(tn);
            std::vector<std::vector<std::string>> options(k);
            for (auto tp : detail::matching_positive(sp, n.action_name(t.action))) {
                const auto src = f.transition(tp).source;
                for (std::size_t i = 0; i < k; ++i) {
                    const Index base{j, tn, tp, i};
                    auto d = sb.declare("d", base, Sort::Bool,
                                        "negative transition " + std::to_string(tn) + " of sample " +
                                            std::to_string(j) + " related to lift of positive transition " +
                                            std::to_string(tp) + " in group " + std::to_string(i));
                    detail::encode_dist_leq(sb, d, base, n, t.target, lift[tp][i],
                                            [&](StateId c, std::size_t jj) { return R[c][jj]; },
                                            ConstraintScript::key("d", base));
                    options[i].push_back(and_({d, m[src][i]}));
                }
            }
            for (std::size_t i = 0; i < k; ++i) matched[t.source][i].push_back(or_(options[i]));
        }
        for (StateId s = 0; s < n.num_states(); ++s)
            for (std::size_t i = 0; i < k; ++i) sb.assert_(eq(R[s][i], and_(matched[s][i])));
        sb.assert_(not_(R[n.start()][0]));
    }
    return std::move(sb).finish();
}

} // namespace lpts::smt
