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

#include "lpts/maxflow.hpp"
#include "lpts/model.hpp"
#include "lpts/relation.hpp"

#include <cstdint>
#include <optional>
#include <tuple>
#include <variant>
#include <vector>

namespace lpts {

/// Coupling of two distributions along a relation: rows sum to the left
/// marginal, columns to the right marginal, positive weights only on
/// related pairs. Stored sparse, positive entries only, sorted.
struct WeightFunction {
    std::vector<std::tuple<StateId, StateId, Rational>> weights;

    Rational at(StateId l, StateId r) const
    {
        for (auto& [a, b, w] : weights)
            if (a == l && b == r) return w;
        return Rational(0);
    }
};

/// Subset S of the left support with mu1(S) > mu2(R(S)).
struct WitnessSubset {
    std::vector<StateId> subset;
};

using DistLeqResult = std::variant<WeightFunction, WitnessSubset>;

namespace detail {

inline Integer denominator_lcm(const Distribution& a, const Distribution& b)
{
    Integer l = 1;
    for (auto& [s, p] : a.entries()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), p.get_den_mpz_t());
    for (auto& [s, p] : b.entries()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), p.get_den_mpz_t());
    return l;
}

template <typename Cap>
Cap to_cap(const Integer& v)
{
    if constexpr (std::is_same_v<Cap, Integer>)
        return v;
    else
        return static_cast<Cap>(v.get_si());
}

template <typename Cap>
Integer from_cap(const Cap& v)
{
    if constexpr (std::is_same_v<Cap, Integer>)
        return v;
    else
        return Integer(static_cast<long>(v));
}

template <typename Cap>
DistLeqResult dist_leq_scaled(const Distribution& mu1, const Distribution& mu2, const Relation& r,
                              const Integer& scale, bool want_certificate)
{
    const auto left = mu1.entries();
    const auto right = mu2.entries();
    const std::size_t n1 = left.size(), n2 = right.size();
    const std::size_t source = 0, sink = n1 + n2 + 1;
    MaxFlow<Cap> net(n1 + n2 + 2);
    const Cap unit = to_cap<Cap>(scale);
    for (std::size_t i = 0; i < n1; ++i) {
        Integer c = left[i].second.get_num() * (scale / left[i].second.get_den());
        net.add_edge(source, 1 + i, to_cap<Cap>(c));
    }
    std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> middle;
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 0; j < n2; ++j)
            if (r.contains(left[i].first, right[j].first))
                middle.emplace_back(i, j, net.add_edge(1 + i, 1 + n1 + j, unit));
    for (std::size_t j = 0; j < n2; ++j) {
        Integer c = right[j].second.get_num() * (scale / right[j].second.get_den());
        net.add_edge(1 + n1 + j, sink, to_cap<Cap>(c));
    }
    const Cap value = net.run(source, sink);
    if (value == unit) {
        WeightFunction w;
        if (want_certificate)
            for (auto& [i, j, arc] : middle) {
                Cap f = net.flow(arc);
                if (f > 0) {
                    Rational q(from_cap<Cap>(f), scale);
                    q.canonicalize();
                    w.weights.emplace_back(left[i].first, right[j].first, q);
                }
            }
        return w;
    }
    WitnessSubset ws;
    if (want_certificate) {
        auto seen = net.residual_reachable(source);
        for (std::size_t i = 0; i < n1; ++i)
            if (seen[1 + i]) ws.subset.push_back(left[i].first);
    }
    return ws;
}

/// A Dirac side admits only one coupling, so no flow is needed.
inline std::optional<DistLeqResult> dirac_shortcut(const Distribution& mu1, const Distribution& mu2,
                                                   const Relation& r)
{
    const auto left = mu1.entries();
    const auto right = mu2.entries();
    if (left.size() == 1) {
        const StateId s = left[0].first;
        WeightFunction w;
        for (auto& [t, q] : right) {
            if (!r.contains(s, t)) return DistLeqResult(WitnessSubset{{s}});
            w.weights.emplace_back(s, t, q);
        }
        return DistLeqResult(std::move(w));
    }
    if (right.size() == 1) {
        const StateId t = right[0].first;
        WeightFunction w;
        for (auto& [s, q] : left) {
            if (!r.contains(s, t)) return DistLeqResult(WitnessSubset{{s}});
            w.weights.emplace_back(s, t, q);
        }
        return DistLeqResult(std::move(w));
    }
    // A left state with no related partner is a witness on its own.
    for (auto& [s, q] : left) {
        bool any = false;
        for (auto& [t, p] : right) any = any || r.contains(s, t);
        if (!any) return DistLeqResult(WitnessSubset{{s}});
    }
    return std::nullopt;
}

inline DistLeqResult dist_leq_impl(const Distribution& mu1, const Distribution& mu2, const Relation& r,
                                   bool want_certificate)
{
    if (auto quick = dirac_shortcut(mu1, mu2, r)) return std::move(*quick);
    const Integer scale = denominator_lcm(mu1, mu2);
    // Total flow is at most `scale` and each path carries at most `scale`,
    // so 64-bit capacities are exact well below this threshold.
    if (scale < Integer(1) << 40)
        return dist_leq_scaled<std::int64_t>(mu1, mu2, r, scale, want_certificate);
    return dist_leq_scaled<Integer>(mu1, mu2, r, scale, want_certificate);
}

} // namespace detail

/// Decides mu1 [=_R mu2 by maximum flow over integer-scaled capacities.
/// Returns a weight function when it holds and a witness subset otherwise.
inline DistLeqResult dist_leq(const Distribution& mu1, const Distribution& mu2, const Relation& r)
{
    return detail::dist_leq_impl(mu1, mu2, r, true);
}

inline bool dist_related(const Distribution& mu1, const Distribution& mu2, const Relation& r)
{
    return std::holds_alternative<WeightFunction>(detail::dist_leq_impl(mu1, mu2, r, false));
}

/// Checks the three weight-function conditions exactly.
inline bool is_weight_function(const Distribution& mu1, const Distribution& mu2, const Relation& r,
                               const WeightFunction& w)
{
    std::vector<std::pair<StateId, Rational>> rows, cols;
    auto add = [](std::vector<std::pair<StateId, Rational>>& v, StateId s, const Rational& q) {
        for (auto& [k, x] : v)
            if (k == s) {
                x += q;
                return;
            }
        v.emplace_back(s, q);
    };
    for (auto& [l, rr, q] : w.weights) {
        if (q <= 0 || q > 1) return false;
        if (!r.contains(l, rr)) return false;
        add(rows, l, q);
        add(cols, rr, q);
    }
    for (auto& [s, q] : rows)
        if (mu1(s) != q) return false;
    for (auto& [s, q] : cols)
        if (mu2(s) != q) return false;
    for (auto& [s, p] : mu1.entries()) {
        bool found = false;
        for (auto& [k, x] : rows) found |= k == s;
        if (!found) return false;
    }
    for (auto& [s, p] : mu2.entries()) {
        bool found = false;
        for (auto& [k, x] : cols) found |= k == s;
        if (!found) return false;
    }
    return true;
}

/// Checks S within Supp(mu1) and mu1(S) > mu2(R(S)) exactly.
inline bool is_witness_subset(const Distribution& mu1, const Distribution& mu2, const Relation& r,
                              const WitnessSubset& ws)
{
    Rational lhs, rhs;
    for (StateId s : ws.subset) {
        if (!mu1.in_support(s)) return false;
        lhs += mu1(s);
    }
    for (StateId t : r.image(std::span<const StateId>(ws.subset))) rhs += mu2(t);
    return lhs > rhs;
}

} // namespace lpts
