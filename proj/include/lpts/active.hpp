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

#include "lpts/cex_format.hpp"
#include "lpts/learn.hpp"
#include "lpts/samples.hpp"
#include "lpts/simulation.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace lpts {

struct TeacherResponse {
    enum class Kind { Equivalent, Positive, Negative };
    Kind kind = Kind::Equivalent;
    /// Positive: mapped into the target. Negative: mapped into the hypothesis.
    std::optional<Counterexample> cex;
    /// Per tree state, the name of the model state it is mapped to.
    std::vector<std::string> image_names;

    static TeacherResponse make(Kind kind, std::optional<Counterexample> cex, const Lpts& mapped_into)
    {
        TeacherResponse r{kind, std::move(cex), {}};
        if (r.cex)
            for (auto s : r.cex->mapping.image) r.image_names.push_back(mapped_into.state_name(s));
        return r;
    }
};

inline const char* response_name(TeacherResponse::Kind k)
{
    switch (k) {
    case TeacherResponse::Kind::Equivalent: return "equivalent";
    case TeacherResponse::Kind::Positive: return "positive";
    case TeacherResponse::Kind::Negative: return "negative";
    }
    return "?";
}

using Teacher = std::function<TeacherResponse(const Lpts& hypothesis)>;

/// Answers with a negative counterexample while H is not simulated by the
/// target, then with a positive one while the target is not simulated by H.
inline TeacherResponse friendly_teacher(const Lpts& target, const Lpts& hypothesis)
{
    auto down = simulates(hypothesis, target);
    if (!down.holds) return TeacherResponse::make(TeacherResponse::Kind::Negative, std::move(down.cex), hypothesis);
    auto up = simulates(target, hypothesis);
    if (!up.holds) return TeacherResponse::make(TeacherResponse::Kind::Positive, std::move(up.cex), target);
    return {};
}

struct LearningBounds {
    std::size_t max_rounds = 200;
    LearnOptions learn;
};

struct LearningRound {
    Lpts hypothesis;
    TeacherResponse response;
    /// The counterexample was already in the sample set.
    bool duplicate = false;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    double seconds = 0;
};

struct LearningTranscript {
    std::vector<LearningRound> rounds;
    std::optional<Lpts> final;
    bool bound_exceeded = false;
    std::string bound_message;
    SampleSet samples;
};

/// Called after every round with the round record and the updated samples.
using RoundObserver = std::function<void(const LearningRound&, const SampleSet&)>;

inline Lpts initial_hypothesis(const LearnOptions& opts)
{
    LptsBuilder b(opts.name);
    b.set_start(b.add_state(class_name(0)));
    for (auto& a : opts.extra_alphabet) b.action(a);
    return std::move(b).build();
}

/// The conjecture / counterexample loop: start from the one-state hypothesis
/// without transitions and, after every counterexample, conjecture the
/// quotient of a least-size consistent (stochastic) partition. Samples only
/// accumulate and a consistent partition of a sample set restricts to one of
/// any subset, so each search resumes at the previous least size, trying
/// extensions of the previous partition first.
inline LearningTranscript learn(const Teacher& teacher, LearnMode mode, const LearningBounds& bounds,
                                const RoundObserver& observer = {})
{
    LearningTranscript tr;
    Lpts h = initial_hypothesis(bounds.learn);
    std::set<std::string> seen_positive, seen_negative;
    LearnOptions opts = bounds.learn;
    for (std::size_t round = 0; round < bounds.max_rounds; ++round) {
        const auto t0 = std::chrono::steady_clock::now();
        LearningRound rec{h, teacher(h), false, 0, 0, 0};
        const auto kind = rec.response.kind;
        if (kind == TeacherResponse::Kind::Equivalent) {
            rec.positives = tr.samples.positives().size();
            rec.negatives = tr.samples.negatives().size();
            rec.seconds = detail::seconds_since(t0);
            tr.rounds.push_back(rec);
            if (observer) observer(tr.rounds.back(), tr.samples);
            tr.final = h;
            return tr;
        }
        if (!rec.response.cex) throw Error("teacher returned a counterexample kind without a tree");
        const auto& tree = rec.response.cex->tree;
        const auto key = canonical_tree(tree);
        auto& seen = kind == TeacherResponse::Kind::Positive ? seen_positive : seen_negative;
        if (seen.insert(key).second) {
            Lpts named = renamed(tree, std::string(kind == TeacherResponse::Kind::Positive ? "pos" : "neg") +
                                           std::to_string(seen.size() - 1));
            if (kind == TeacherResponse::Kind::Positive)
                tr.samples.add_positive(std::move(named));
            else
                tr.samples.add_negative(std::move(named));
        } else {
            rec.duplicate = true;
        }
        rec.positives = tr.samples.positives().size();
        rec.negatives = tr.samples.negatives().size();
        std::optional<Lpts> next;
        try {
            auto res = learn_least(tr.samples, mode, opts);
            opts.min_k = res.size;
            if (auto* p = std::get_if<Partition>(&res.witness)) opts.hint = p->class_of;
            next = std::move(res.quotient);
        } catch (const BoundExceeded& e) {
            tr.bound_exceeded = true;
            tr.bound_message = e.what();
        } catch (const PreconditionError& e) {
            throw Error(std::string("teacher contract violated: ") + e.what());
        }
        rec.seconds = detail::seconds_since(t0);
        tr.rounds.push_back(std::move(rec));
        if (observer) observer(tr.rounds.back(), tr.samples);
        if (!next) return tr;
        h = std::move(*next);
    }
    tr.bound_exceeded = true;
    tr.bound_message = "no equivalent hypothesis within " + std::to_string(bounds.max_rounds) + " rounds";
    return tr;
}

/// Transcript as JSON. Timing is included only on request so that default
/// output is reproducible byte for byte.
inline nlohmann::ordered_json response_to_json(const TeacherResponse& r)
{
    nlohmann::ordered_json j;
    j["kind"] = response_name(r.kind);
    if (r.cex) {
        j["tree"] = serialize_lpts(r.cex->tree);
        auto& m = j["mapping"] = nlohmann::ordered_json::array();
        for (StateId s = 0; s < r.cex->tree.num_states(); ++s)
            m.push_back({{"tree_state", r.cex->tree.state_name(s)},
                         {"model_state", s < r.image_names.size() ? r.image_names[s] : ""}});
    }
    return j;
}

inline nlohmann::ordered_json transcript_to_json(const LearningTranscript& tr, bool timing = false)
{
    nlohmann::ordered_json j;
    j["rounds"] = nlohmann::ordered_json::array();
    std::size_t i = 0;
    for (auto& r : tr.rounds) {
        nlohmann::ordered_json jr;
        jr["round"] = ++i;
        jr["hypothesis"] = serialize_lpts(r.hypothesis);
        jr["hypothesis_states"] = r.hypothesis.num_states();
        jr["response"] = response_to_json(r.response);
        jr["duplicate"] = r.duplicate;
        jr["positives"] = r.positives;
        jr["negatives"] = r.negatives;
        if (timing) jr["seconds"] = r.seconds;
        j["rounds"].push_back(std::move(jr));
    }
    j["converged"] = tr.final.has_value();
    if (tr.final) j["final"] = serialize_lpts(*tr.final);
    if (tr.bound_exceeded) j["bound_exceeded"] = tr.bound_message;
    return j;
}

} // namespace lpts
