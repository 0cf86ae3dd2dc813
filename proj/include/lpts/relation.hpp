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

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace lpts {

/// Finite binary relation between the states of a left and a right model.
class Relation {
public:
    Relation() = default;
    Relation(std::size_t left, std::size_t right, bool full = false)
        : left_(left), right_(right), bits_(left * right, full ? 1 : 0)
    {
    }

    static Relation full(std::size_t left, std::size_t right) { return Relation(left, right, true); }

    std::size_t left_size() const { return left_; }
    std::size_t right_size() const { return right_; }

    bool contains(StateId l, StateId r) const { return bits_[l * right_ + r] != 0; }
    void insert(StateId l, StateId r) { bits_[l * right_ + r] = 1; }
    void erase(StateId l, StateId r) { bits_[l * right_ + r] = 0; }

    std::size_t size() const
    {
        std::size_t n = 0;
        for (auto b : bits_) n += b;
        return n;
    }

    /// Pairs in lexicographic order.
    std::vector<std::pair<StateId, StateId>> pairs() const
    {
        std::vector<std::pair<StateId, StateId>> out;
        for (StateId l = 0; l < left_; ++l)
            for (StateId r = 0; r < right_; ++r)
                if (contains(l, r)) out.emplace_back(l, r);
        return out;
    }

    std::vector<StateId> image(StateId l) const
    {
        std::vector<StateId> out;
        for (StateId r = 0; r < right_; ++r)
            if (contains(l, r)) out.push_back(r);
        return out;
    }

    /// R(S) for a set of left states.
    std::vector<StateId> image(std::span<const StateId> ls) const
    {
        std::vector<StateId> out;
        for (StateId r = 0; r < right_; ++r)
            for (StateId l : ls)
                if (contains(l, r)) {
                    out.push_back(r);
                    break;
                }
        return out;
    }

    bool subset_of(const Relation& other) const
    {
        for (std::size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] && !other.bits_[i]) return false;
        return true;
    }

    friend bool operator==(const Relation&, const Relation&) = default;

private:
    std::size_t left_ = 0;
    std::size_t right_ = 0;
    std::vector<unsigned char> bits_;
};

} // namespace lpts
