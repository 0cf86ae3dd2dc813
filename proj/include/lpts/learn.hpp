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
#include "lpts/partition.hpp"
#include "lpts/samples.hpp"
#include "lpts/smt/decode.hpp"
#include "lpts/smt/encode.hpp"
#include "lpts/smt/solver.hpp"
#include "lpts/stochastic_partition.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace lpts {

enum class Backend { Enumerate, Solver };
enum class LearnMode { Partition, Stochastic };

inline const char* backend_name(Backend b) { return b == Backend::Enumerate ? "enumerate" : "solver"; }
inline const char* mode_name(LearnMode m) { return m == LearnMode::Partition ? "partition" : "stochastic"; }

struct SearchStep {
    std::size_t k = 0;
    bool sat = false;
    double seconds = 0;
};

struct LearnOptions {
    Backend backend = Backend::Enumerate;
    std::size_t max_k = 8;
    /// The search starts here. Only sound when no consistent partition with
    /// fewer classes exists, e.g. because a subset of the samples already
    /// needed min_k.
    std::size_t min_k = 1;
    /// Labels for a prefix of the sample states (e.g. the previous round's
    /// partition). The enumerator first tries extensions of it at the first
    /// size; the full search still runs before a larger size is tried.
    std::vector<std::size_t> hint;
    smt::SolverConfig solver = smt::SolverConfig::resolve();
    /// Declared in the hypothesis on top of the positive sample actions.
    std::vector<std::string> extra_alphabet;
    std::string name = "hypothesis";
    /// Sees every script before it goes to the solver.
    std::function<void(std::size_t k, const smt::ConstraintScript&)> on_script;
};

struct LearnResult {
    Lpts quotient;
    std::variant<Partition, StochasticPartition> witness;
    std::size_t size = 0;
    std::vector<SearchStep> search_trace;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline bool rejects_negatives(const SampleSet& samples, const Lpts& q)
{
    for (auto& n : samples.negatives())
        if (tree_simulated_by(n, q)) return false;
    return true;
}

/// Backtracking search for a labelling with at most k classes. A partial
/// labelling is kept only while its quotient, with unlabelled states left as
/// singletons, still rejects every negative: coarsening a partition only
/// enlarges what its quotient simulates, so no completion of a rejected
/// labelling can be consistent. The same argument lets each unlabelled state
/// keep a shrinking set of classes it may still join; the state with the
/// fewest options is branched on first, and a fresh class is only ever
/// opened once (fresh classes are interchangeable).
class PartitionSearch {
public:
    PartitionSearch(const SampleSet& samples, const SampleSpace& sp) : samples_(samples), sp_(sp)
    {
        const auto n = sp.size();
        for (std::size_t i = 0; i < samples.negatives().size(); ++i) neg_order_.push_back(i);
        // Pairs that cannot share a class even when everything else is split.
        clash_.assign(n * n, 0);
        std::vector<std::size_t> base(n);
        for (StateId s = 0; s < n; ++s) base[s] = sp.is_root(s) ? 0 : 1 + s;
        for (StateId a = 0; a < n; ++a)
            for (StateId b = a + 1; b < n; ++b) {
                if (base[a] == base[b]) continue;
                auto l = base;
                const auto target = l[a], moved = l[b];
                for (auto& x : l)
                    if (x == moved) x = target;
                if (!consistent(l)) clash_[a * n + b] = clash_[b * n + a] = 1;
            }
    }

    std::optional<Partition> find(std::size_t k, const std::vector<std::size_t>& fixed = {})
    {
        const auto n = sp_.size();
        labels_.assign(n, unassigned);
        std::size_t used = 1;
        for (StateId s = 0; s < fixed.size() && s < n; ++s) {
            if (fixed[s] >= k) return std::nullopt;
            labels_[s] = fixed[s];
            used = std::max(used, fixed[s] + 1);
        }
        for (auto r : sp_.roots) {
            if (labels_[r] != unassigned && labels_[r] != 0) return std::nullopt;
            labels_[r] = 0;
        }
        if (!fixed.empty() && !consistent(completion(labels_))) return std::nullopt;
        std::vector<std::vector<char>> allowed(n, std::vector<char>(k, 1));
        for (StateId s = 0; s < n; ++s) {
            if (labels_[s] != unassigned) continue;
            for (auto r : sp_.roots)
                if (clash_[s * n + r]) allowed[s][0] = 0;
        }
        k_ = k;
        // Plain backtracking finds most answers quickly; when it runs long
        // the search restarts with full lookahead, which refutes faster.
        const auto preset = labels_;
        checks_ = 0;
        try {
            if (plain(used, 0, allowed)) return normalize_partition(sp_, labels_);
            return std::nullopt;
        } catch (const OutOfBudget&) {
            labels_ = preset;
        }
        if (!lookahead(used, allowed)) return std::nullopt;
        return normalize_partition(sp_, labels_);
    }

private:
    static constexpr std::size_t unassigned = static_cast<std::size_t>(-1);

    /// Unlabelled states become singletons numbered past every real class.
    std::vector<std::size_t> completion(const std::vector<std::size_t>& labels) const
    {
        auto l = labels;
        std::size_t fresh = sp_.size() + 1;
        for (auto& x : l)
            if (x == unassigned) x = fresh++;
        return l;
    }

    /// The negative that last refuted a labelling is tried first.
    bool consistent(const std::vector<std::size_t>& labels)
    {
        const auto q = quotient(sp_, normalize_partition(sp_, labels));
        for (std::size_t i = 0; i < neg_order_.size(); ++i)
            if (tree_simulated_by(samples_.negatives()[neg_order_[i]], q)) {
                std::rotate(neg_order_.begin(), neg_order_.begin() + static_cast<std::ptrdiff_t>(i),
                            neg_order_.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                return false;
            }
        return true;
    }

    struct OutOfBudget {};

    /// Breadth-first order, checking only the value being tried.
    bool plain(std::size_t used, std::size_t at, const std::vector<std::vector<char>>& allowed)
    {
        const auto n = sp_.size();
        while (at < n && labels_[sp_.order[at]] != unassigned) ++at;
        if (at == n) return true;
        const StateId s = sp_.order[at];
        for (std::size_t c = 0; c < std::min(used + 1, k_); ++c) {
            if (c < used && !allowed[s][c]) continue;
            labels_[s] = c;
            if (c < used) {
                if (++checks_ > budget_) throw OutOfBudget{};
                if (!consistent(completion(labels_))) {
                    labels_[s] = unassigned;
                    continue;
                }
            }
            auto child = allowed;
            for (StateId t = 0; t < n; ++t)
                if (labels_[t] == unassigned && clash_[s * n + t]) child[t][c] = 0;
            if (plain(std::max(used, c + 1), at + 1, child)) return true;
            labels_[s] = unassigned;
        }
        return false;
    }

    bool lookahead(std::size_t used, std::vector<std::vector<char>>& allowed)
    {
        const auto n = sp_.size();
        // Refresh the options of every open state against the current labels.
        std::optional<StateId> pick;
        std::size_t best = 0;
        for (StateId s = 0; s < n; ++s) {
            if (labels_[s] != unassigned) continue;
            std::size_t options = used < k_ ? 1 : 0;
            for (std::size_t c = 0; c < used; ++c) {
                if (!allowed[s][c]) continue;
                labels_[s] = c;
                if (consistent(completion(labels_)))
                    ++options;
                else
                    allowed[s][c] = 0;
                labels_[s] = unassigned;
            }
            if (options == 0) return false;
            if (!pick || options < best) {
                pick = s;
                best = options;
            }
        }
        if (!pick) return true;
        const StateId s = *pick;
        for (std::size_t c = 0; c < std::min(used + 1, k_); ++c) {
            if (c < used && !allowed[s][c]) continue;
            labels_[s] = c;
            auto child = allowed;
            for (StateId t = 0; t < n; ++t)
                if (labels_[t] == unassigned && clash_[s * n + t]) child[t][c] = 0;
            if (lookahead(std::max(used, c + 1), child)) return true;
            labels_[s] = unassigned;
        }
        return false;
    }

    const SampleSet& samples_;
    const SampleSpace& sp_;
    std::vector<std::size_t> labels_;
    std::vector<char> clash_;
    std::vector<std::size_t> neg_order_;
    std::size_t k_ = 1;
    std::size_t checks_ = 0;
    std::size_t budget_ = 200;
};

inline LearnResult trivial_result(const SampleSet& samples, const LearnOptions& opts, LearnMode mode)
{
    for (auto& n : samples.negatives())
        if (n.transitions().empty()) throw PreconditionError("no consistent LPTS exists: a negative sample is a single state");
    LptsBuilder b(opts.name);
    b.set_start(b.add_state(class_name(0)));
    for (auto& a : opts.extra_alphabet) b.action(a);
    LearnResult r{std::move(b).build(), Partition{{}, 1}, 1, {{1, true, 0}}};
    if (mode == LearnMode::Stochastic) r.witness = StochasticPartition{1, {}};
    return r;
}

inline void require_consistency(const SampleSet& samples)
{
    if (!consistency_exists(samples).exists)
        throw PreconditionError("no consistent LPTS exists: a negative sample is simulated by the merged positives");
}

inline void revalidate(const SampleSet& samples, const Lpts& q)
{
    if (!is_consistent(samples, q)) throw Error("decoded witness yields an inconsistent quotient");
}

} // namespace detail

/// Least k admitting a partition whose quotient is consistent with the
/// samples, together with that partition and quotient.
inline LearnResult learn_min_partition(const SampleSet& samples, const LearnOptions& opts = {})
{
    if (samples.positives().empty()) return detail::trivial_result(samples, opts, LearnMode::Partition);
    detail::require_consistency(samples);
    const auto sp = sample_space(samples);
    std::vector<SearchStep> trace;
    std::optional<detail::PartitionSearch> search;
    for (std::size_t k = std::max<std::size_t>(1, opts.min_k); k <= opts.max_k; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        std::optional<Partition> found;
        if (opts.backend == Backend::Enumerate) {
            if (!search) search.emplace(samples, sp);
            if (k == opts.min_k && !opts.hint.empty()) found = search->find(k, opts.hint);
            if (!found) found = search->find(k);
        } else {
            auto script = smt::encode_partition(samples, k);
            if (opts.on_script) opts.on_script(k, script);
            auto verdict = smt::solve(script, opts.solver);
            if (verdict.status == smt::Status::Sat)
                found = smt::decode_partition(verdict, script, sp, k);
            else if (verdict.status != smt::Status::Unsat)
                throw SolverError(std::string("solver answered ") + smt::status_name(verdict.status) +
                                  (verdict.message.empty() ? "" : ": " + verdict.message));
        }
        trace.push_back({k, found.has_value(), detail::seconds_since(t0)});
        if (found) {
            auto q = quotient(sp, *found, opts.name, opts.extra_alphabet);
            detail::revalidate(samples, q);
            const auto size = found->num_classes;
            return LearnResult{std::move(q), std::move(*found), size, std::move(trace)};
        }
    }
    throw BoundExceeded("no consistent partition with at most " + std::to_string(opts.max_k) + " classes");
}

/// Least group count admitting a consistent stochastic partition (solver only).
inline LearnResult learn_min_stochastic(const SampleSet& samples, const LearnOptions& opts = {})
{
    if (samples.positives().empty()) return detail::trivial_result(samples, opts, LearnMode::Stochastic);
    detail::require_consistency(samples);
    const auto sp = sample_space(samples);
    std::vector<SearchStep> trace;
    for (std::size_t k = std::max<std::size_t>(1, opts.min_k); k <= opts.max_k; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        std::optional<StochasticPartition> found;
        if (samples.negatives().empty()) {
            // Every quotient is consistent; the one-group partition is minimal.
            found = to_stochastic(sp, normalize_partition(sp, std::vector<std::size_t>(sp.size(), 0)));
        } else {
            auto script = smt::encode_stochastic(samples, k);
            if (opts.on_script) opts.on_script(k, script);
            auto verdict = smt::solve(script, opts.solver);
            if (verdict.status == smt::Status::Sat)
                found = smt::decode_stochastic(verdict, script, sp, k);
            else if (verdict.status != smt::Status::Unsat)
                throw SolverError(std::string("solver answered ") + smt::status_name(verdict.status) +
                                  (verdict.message.empty() ? "" : ": " + verdict.message));
        }
        trace.push_back({k, found.has_value(), detail::seconds_since(t0)});
        if (found) {
            auto q = stochastic_quotient(sp, *found, opts.name, opts.extra_alphabet);
            detail::revalidate(samples, q);
            const auto size = found->num_groups;
            return LearnResult{std::move(q), std::move(*found), size, std::move(trace)};
        }
    }
    throw BoundExceeded("no consistent stochastic partition with at most " + std::to_string(opts.max_k) + " groups");
}

inline LearnResult learn_least(const SampleSet& samples, LearnMode mode, const LearnOptions& opts = {})
{
    return mode == LearnMode::Partition ? learn_min_partition(samples, opts) : learn_min_stochastic(samples, opts);
}

} // namespace lpts
