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

#include "lpts/partition.hpp"
#include "lpts/smt/script.hpp"
#include "lpts/smt/solver.hpp"
#include "lpts/stochastic_partition.hpp"

#include <string>
#include <vector>

namespace lpts::smt {

namespace detail {

inline const Symbol& require(const ConstraintScript& s, const std::string& role, const std::vector<std::size_t>& idx)
{
    const Symbol* sym = s.find(role, idx);
    if (!sym) throw Error("decode: symbol table lacks " + ConstraintScript::key(role, idx));
    return *sym;
}

inline void require_sat(const SolverVerdict& v)
{
    if (v.status != Status::Sat) throw PreconditionError(std::string("decode needs a sat verdict, got ") + status_name(v.status));
}

} // namespace detail

/// Class assignment of a sat model of encode_partition. Exactly one class
/// must be true per state; anything else is an encoding fault and throws.
inline Partition decode_partition(const SolverVerdict& v, const ConstraintScript& script, const SampleSpace& sp,
                                  std::size_t k)
{
    detail::require_sat(v);
    std::vector<std::size_t> labels(sp.size());
    for (StateId s = 0; s < sp.size(); ++s) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (v.boolean(detail::require(script, "v", {s, i}).id)) {
                labels[s] = i;
                ++count;
            }
        if (count != 1)
            throw Error("decode: state '" + sp.forest.state_name(s) + "' is in " + std::to_string(count) + " classes");
    }
    for (auto r : sp.roots)
        if (labels[r] != 0) throw Error("decode: a root is outside class 0");
    return normalize_partition(sp, labels);
}

/// Grouping distributions of a sat model of encode_stochastic. Each row
/// must sum to exactly 0 (undefined) or 1; empty groups are dropped.
inline StochasticPartition decode_stochastic(const SolverVerdict& v, const ConstraintScript& script,
                                             const SampleSpace& sp, std::size_t k)
{
    detail::require_sat(v);
    StochasticPartition raw;
    raw.num_groups = k;
    raw.rows.resize(sp.size());
    for (StateId s = 0; s < sp.size(); ++s)
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<Rational> row(k);
            Rational total = 0;
            for (std::size_t j = 0; j < k; ++j) {
                row[j] = v.real(detail::require(script, "g", {s, i, j}).id);
                if (row[j] < 0) throw Error("decode: negative grouping probability");
                total += row[j];
            }
            if (total == 1)
                raw.rows[s][i] = std::move(row);
            else if (total != 0)
                throw Error("decode: grouping row of '" + sp.forest.state_name(s) + "' sums to " + to_string(total));
        }
    auto p = compact_groups(sp, raw);
    validate_stochastic_partition(sp, p);
    return p;
}

/// Decoded R variables for negative j: rows are tree states, columns the
/// raw class (or group) indices of the encoding.
inline Relation decode_relation(const SolverVerdict& v, const ConstraintScript& script, std::size_t j,
                                const Lpts& negative, std::size_t k)
{
    detail::require_sat(v);
    Relation r(negative.num_states(), k);
    for (StateId s = 0; s < negative.num_states(); ++s)
        for (std::size_t i = 0; i < k; ++i)
            if (v.boolean(detail::require(script, "R", {j, s, i}).id)) r.insert(s, static_cast<StateId>(i));
    return r;
}

} // namespace lpts::smt
