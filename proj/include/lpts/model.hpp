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
#include "lpts/rational.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lpts {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

/// Finite probability distribution over state ids. Only strictly positive
/// entries are stored, sorted by state id, and they sum to exactly one.
class Distribution {
public:
    using Entry = std::pair<StateId, Rational>;

    Distribution() = default;

    static Distribution dirac(StateId s)
    {
        Distribution d;
        d.entries_.emplace_back(s, Rational(1));
        return d;
    }

    /// Validating constructor. Entries may come in any order; zero entries
    /// are rejected, not dropped.
    static Distribution from_entries(std::vector<Entry> entries)
    {
        Distribution d = from_entries_unchecked(std::move(entries));
        Rational sum;
        for (std::size_t i = 0; i < d.entries_.size(); ++i) {
            if (!is_probability(d.entries_[i].second))
                throw InvalidModel("probability " + to_string(d.entries_[i].second) +
                                   " outside (0,1]");
            if (i > 0 && d.entries_[i - 1].first == d.entries_[i].first)
                throw InvalidModel("state listed twice in one distribution");
            sum += d.entries_[i].second;
        }
        if (sum != 1) throw InvalidModel("distribution sums to " + to_string(sum) + ", not 1");
        return d;
    }

    /// Sums duplicate keys and drops zero entries, then validates.
    static Distribution accumulate(const std::vector<Entry>& raw)
    {
        std::vector<Entry> sorted = raw;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Entry& a, const Entry& b) { return a.first < b.first; });
        std::vector<Entry> merged;
        for (auto& [s, p] : sorted) {
            if (!merged.empty() && merged.back().first == s)
                merged.back().second += p;
            else
                merged.emplace_back(s, p);
        }
        std::erase_if(merged, [](const Entry& e) { return e.second == 0; });
        return from_entries(std::move(merged));
    }

    std::span<const Entry> entries() const { return entries_; }
    std::size_t support_size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    Rational operator()(StateId s) const
    {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), s,
                                   [](const Entry& e, StateId key) { return e.first < key; });
        if (it != entries_.end() && it->first == s) return it->second;
        return Rational(0);
    }

    bool in_support(StateId s) const { return (*this)(s) != 0; }

    std::vector<StateId> support() const
    {
        std::vector<StateId> out;
        out.reserve(entries_.size());
        for (auto& e : entries_) out.push_back(e.first);
        return out;
    }

    friend bool operator==(const Distribution& a, const Distribution& b)
    {
        return a.entries_ == b.entries_;
    }

    /// Lexicographic on (state, probability) entries.
    friend bool operator<(const Distribution& a, const Distribution& b)
    {
        return std::lexicographical_compare(
            a.entries_.begin(), a.entries_.end(), b.entries_.begin(), b.entries_.end(),
            [](const Entry& x, const Entry& y) {
                if (x.first != y.first) return x.first < y.first;
                return x.second < y.second;
            });
    }

private:
    static Distribution from_entries_unchecked(std::vector<Entry> entries)
    {
        Distribution d;
        d.entries_ = std::move(entries);
        std::sort(d.entries_.begin(), d.entries_.end(),
                  [](const Entry& a, const Entry& b) { return a.first < b.first; });
        return d;
    }

    std::vector<Entry> entries_;
};

struct Transition {
    StateId source = 0;
    ActionId action = 0;
    Distribution target;

    friend bool operator==(const Transition&, const Transition&) = default;
    friend bool operator<(const Transition& a, const Transition& b)
    {
        if (a.source != b.source) return a.source < b.source;
        if (a.action != b.action) return a.action < b.action;
        return a.target < b.target;
    }
};

/// A finite labeled probabilistic transition system. Immutable once built;
/// use LptsBuilder to construct one.
class Lpts {
public:
    const std::string& name() const { return name_; }

    std::size_t num_states() const { return states_.size(); }
    const std::string& state_name(StateId s) const { return states_.at(s); }
    const std::vector<std::string>& state_names() const { return states_; }
    std::optional<StateId> find_state(std::string_view name) const
    {
        auto it = state_index_.find(std::string(name));
        if (it == state_index_.end()) return std::nullopt;
        return it->second;
    }
    StateId start() const { return start_; }

    const std::vector<std::string>& alphabet() const { return alphabet_; }
    const std::string& action_name(ActionId a) const { return alphabet_.at(a); }
    std::optional<ActionId> find_action(std::string_view name) const
    {
        for (std::size_t i = 0; i < alphabet_.size(); ++i)
            if (alphabet_[i] == name) return static_cast<ActionId>(i);
        return std::nullopt;
    }

    /// Sorted by (source, action, target); no duplicates.
    std::span<const Transition> transitions() const { return transitions_; }
    const Transition& transition(std::size_t i) const { return transitions_.at(i); }

    /// Indices into transitions() leaving `s`, in transition order.
    std::span<const std::size_t> outgoing(StateId s) const { return outgoing_.at(s); }

    std::optional<std::size_t> find_transition(StateId source, ActionId action,
                                               const Distribution& target) const
    {
        Transition key{source, action, target};
        auto it = std::lower_bound(transitions_.begin(), transitions_.end(), key);
        if (it != transitions_.end() && *it == key)
            return static_cast<std::size_t>(it - transitions_.begin());
        return std::nullopt;
    }

    /// Structural equality: same name, state and action declaration order,
    /// start state and transition set.
    friend bool operator==(const Lpts& a, const Lpts& b)
    {
        return a.name_ == b.name_ && a.states_ == b.states_ && a.start_ == b.start_ &&
               a.alphabet_ == b.alphabet_ && a.transitions_ == b.transitions_;
    }

private:
    friend class LptsBuilder;

    std::string name_;
    std::vector<std::string> states_;
    std::unordered_map<std::string, StateId> state_index_;
    StateId start_ = 0;
    std::vector<std::string> alphabet_;
    std::vector<Transition> transitions_;
    std::vector<std::vector<std::size_t>> outgoing_;
};

class LptsBuilder {
public:
    explicit LptsBuilder(std::string name = "lpts") { model_.name_ = std::move(name); }

    /// Declares a new state; throws on a duplicate name.
    StateId add_state(const std::string& name)
    {
        if (name.empty()) throw InvalidModel("empty state name");
        auto [it, inserted] =
            model_.state_index_.emplace(name, static_cast<StateId>(model_.states_.size()));
        if (!inserted) throw InvalidModel("duplicate state '" + name + "'");
        model_.states_.push_back(name);
        return it->second;
    }

    /// Returns the existing state or declares it.
    StateId state(const std::string& name)
    {
        auto it = model_.state_index_.find(name);
        if (it != model_.state_index_.end()) return it->second;
        return add_state(name);
    }

    std::optional<StateId> find_state(std::string_view name) const
    {
        auto it = model_.state_index_.find(std::string(name));
        if (it == model_.state_index_.end()) return std::nullopt;
        return it->second;
    }

    /// Returns the existing action or appends it to the alphabet.
    ActionId action(const std::string& name)
    {
        if (name.empty()) throw InvalidModel("empty action name");
        for (std::size_t i = 0; i < model_.alphabet_.size(); ++i)
            if (model_.alphabet_[i] == name) return static_cast<ActionId>(i);
        model_.alphabet_.push_back(name);
        return static_cast<ActionId>(model_.alphabet_.size() - 1);
    }

    std::optional<ActionId> find_action(std::string_view name) const
    {
        for (std::size_t i = 0; i < model_.alphabet_.size(); ++i)
            if (model_.alphabet_[i] == name) return static_cast<ActionId>(i);
        return std::nullopt;
    }

    std::size_t num_states() const { return model_.states_.size(); }

    void set_start(StateId s)
    {
        start_ = s;
    }

    void add_transition(StateId source, ActionId action, Distribution target)
    {
        pending_.push_back(Transition{source, action, std::move(target)});
    }

    /// Validates all references and sorts/deduplicates the transitions.
    Lpts build() &&
    {
        const auto n = model_.states_.size();
        if (n == 0) throw InvalidModel("model has no states");
        if (!start_) throw InvalidModel("start state not set");
        if (*start_ >= n) throw InvalidModel("start state out of range");
        model_.start_ = *start_;
        for (const auto& t : pending_) {
            if (t.source >= n) throw InvalidModel("transition source out of range");
            if (t.action >= model_.alphabet_.size())
                throw InvalidModel("transition action out of range");
            if (t.target.empty()) throw InvalidModel("transition with empty distribution");
            for (auto& [s, p] : t.target.entries())
                if (s >= n) throw InvalidModel("distribution support state out of range");
        }
        std::sort(pending_.begin(), pending_.end());
        pending_.erase(std::unique(pending_.begin(), pending_.end()), pending_.end());
        model_.transitions_ = std::move(pending_);
        model_.outgoing_.assign(n, {});
        for (std::size_t i = 0; i < model_.transitions_.size(); ++i)
            model_.outgoing_[model_.transitions_[i].source].push_back(i);
        return std::move(model_);
    }

private:
    Lpts model_;
    std::optional<StateId> start_;
    std::vector<Transition> pending_;
};

struct Classification {
    bool is_tree = false;
    bool is_reactive = false;
};

/// Tree: the start state lies in no support, every other state lies in the
/// support of exactly one transition, and every state is reachable from the
/// start (this last clause excludes detached cycles). Reactive: at most one
/// transition per (state, action).
inline Classification classify(const Lpts& l)
{
    Classification c;
    c.is_reactive = true;
    for (StateId s = 0; s < l.num_states(); ++s) {
        auto out = l.outgoing(s);
        for (std::size_t i = 1; i < out.size(); ++i)
            if (l.transition(out[i]).action == l.transition(out[i - 1]).action)
                c.is_reactive = false;
    }
    std::vector<std::size_t> parents(l.num_states(), 0);
    for (const auto& t : l.transitions())
        for (auto& [s, p] : t.target.entries()) ++parents[s];
    bool tree = parents[l.start()] == 0;
    for (StateId s = 0; s < l.num_states() && tree; ++s)
        if (s != l.start() && parents[s] != 1) tree = false;
    if (tree) {
        std::vector<char> seen(l.num_states(), 0);
        std::vector<StateId> stack{l.start()};
        seen[l.start()] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            StateId s = stack.back();
            stack.pop_back();
            for (auto ti : l.outgoing(s))
                for (auto& [child, p] : l.transition(ti).target.entries())
                    if (!seen[child]) {
                        seen[child] = 1;
                        ++count;
                        stack.push_back(child);
                    }
        }
        tree = count == l.num_states();
    }
    c.is_tree = tree;
    return c;
}

/// Parent links, depths and a top-down order of a stochastic tree.
class TreeView {
public:
    explicit TreeView(const Lpts& tree) : tree_(&tree)
    {
        if (!classify(tree).is_tree) throw PreconditionError("'" + tree.name() + "' is not a tree");
        const auto n = tree.num_states();
        parent_.assign(n, std::nullopt);
        parent_transition_.assign(n, std::nullopt);
        depth_.assign(n, 0);
        order_.reserve(n);
        order_.push_back(tree.start());
        for (std::size_t head = 0; head < order_.size(); ++head) {
            StateId s = order_[head];
            for (auto ti : tree.outgoing(s))
                for (auto& [child, p] : tree.transition(ti).target.entries()) {
                    parent_[child] = s;
                    parent_transition_[child] = ti;
                    depth_[child] = depth_[s] + 1;
                    order_.push_back(child);
                }
        }
    }

    const Lpts& tree() const { return *tree_; }
    std::optional<StateId> parent(StateId s) const { return parent_.at(s); }
    std::optional<std::size_t> parent_transition(StateId s) const { return parent_transition_.at(s); }
    std::size_t depth(StateId s) const { return depth_.at(s); }
    /// Breadth-first from the root; reverse it for a bottom-up pass.
    const std::vector<StateId>& top_down() const { return order_; }

private:
    const Lpts* tree_;
    std::vector<std::optional<StateId>> parent_;
    std::vector<std::optional<std::size_t>> parent_transition_;
    std::vector<std::size_t> depth_;
    std::vector<StateId> order_;
};

/// Single state `name`, empty alphabet, no transitions.
inline Lpts trivial_lpts(const std::string& model_name = "trivial", const std::string& state = "e0")
{
    LptsBuilder b(model_name);
    b.set_start(b.add_state(state));
    return std::move(b).build();
}

/// Maps every action of `from` to the id of the same-named action of `to`.
inline std::vector<std::optional<ActionId>> action_map(const Lpts& from, const Lpts& to)
{
    std::vector<std::optional<ActionId>> map(from.alphabet().size());
    for (std::size_t i = 0; i < map.size(); ++i) map[i] = to.find_action(from.alphabet()[i]);
    return map;
}

/// Same model with a different name.
inline Lpts renamed(const Lpts& l, const std::string& name)
{
    LptsBuilder b(name);
    for (auto& s : l.state_names()) b.add_state(s);
    for (auto& a : l.alphabet()) b.action(a);
    b.set_start(l.start());
    for (auto& t : l.transitions()) b.add_transition(t.source, t.action, t.target);
    return std::move(b).build();
}

} // namespace lpts
