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

#include <memory>

#include <string>
#include <vector>

namespace lpts {

/// u0 -a-> {u1: lambda, u2: 1 - lambda}, u1 -b-> u1, u2 deadlocks.
inline Lpts u_lambda_model(const Rational& lambda)
{
    if (lambda <= 0 || lambda >= 1) throw PreconditionError("lambda must lie strictly between 0 and 1");
    LptsBuilder b("u_" + to_string(lambda));
    auto u0 = b.add_state("u0"), u1 = b.add_state("u1"), u2 = b.add_state("u2");
    auto a = b.action("a"), bb = b.action("b");
    b.set_start(u0);
    b.add_transition(u0, a, Distribution::from_entries({{u1, lambda}, {u2, 1 - lambda}}));
    b.add_transition(u1, bb, Distribution::dirac(u1));
    return std::move(b).build();
}

/// Mass that mu puts on states of `tree` with an outgoing b-transition.
inline Rational b_mass(const Lpts& tree, const Distribution& mu)
{
    Rational m = 0;
    auto b = tree.find_action("b");
    for (auto& [s, q] : mu.entries()) {
        bool capable = false;
        if (b)
            for (auto ti : tree.outgoing(s))
                if (tree.transition(ti).action == *b) capable = true;
        if (capable) m += q;
    }
    return m;
}

/// Smallest b-mass above lambda among the a-distributions of the negatives,
/// or 1 when there is none.
inline Rational lambda_plus(const Rational& lambda, const std::vector<Lpts>& negatives)
{
    Rational best = 1;
    for (auto& n : negatives) {
        auto a = n.find_action("a");
        if (!a) continue;
        for (auto& t : n.transitions()) {
            if (t.action != *a) continue;
            Rational p = b_mass(n, t.target);
            if (p > lambda && p < best) best = p;
        }
    }
    return best;
}

inline Rational bumped_lambda(const Rational& lambda, const std::vector<Lpts>& negatives)
{
    return (lambda_plus(lambda, negatives) + lambda) / 2;
}

struct LambdaEvent {
    Rational before;
    Rational after;
    bool bumped = false;
};

/// Teacher over the U_lambda family that never lets the learner converge:
/// on an equivalent conjecture it raises lambda above every b-mass the
/// negatives have shown so far and answers with a fresh positive.
class AdversarialTeacher {
public:
    explicit AdversarialTeacher(Rational lambda) : lambda_(std::move(lambda)) { u_lambda_model(lambda_); }

    TeacherResponse operator()(const Lpts& h)
    {
        LambdaEvent ev{lambda_, lambda_, false};
        auto u = u_lambda_model(lambda_);
        TeacherResponse r;
        auto down = simulates(h, u);
        if (!down.holds) {
            r = TeacherResponse::make(TeacherResponse::Kind::Negative, std::move(down.cex), h);
            negatives_.push_back(r.cex->tree);
        } else {
            auto up = simulates(u, h);
            if (up.holds) {
                lambda_ = bumped_lambda(lambda_, negatives_);
                ev.after = lambda_;
                ev.bumped = true;
                u = u_lambda_model(lambda_);
                up = simulates(u, h);
                if (up.holds) throw Error("internal: raised lambda is still simulated by the hypothesis");
            }
            r = TeacherResponse::make(TeacherResponse::Kind::Positive, std::move(up.cex), u);
        }
        history_.push_back(ev);
        return r;
    }

    const Rational& lambda() const { return lambda_; }
    const std::vector<LambdaEvent>& history() const { return history_; }

private:
    Rational lambda_;
    std::vector<Lpts> negatives_;
    std::vector<LambdaEvent> history_;
};

struct AdversarialRound {
    LambdaEvent lambda;
    std::string response;
    std::size_t hypothesis_states = 0;
    /// U_lambda (current lambda) simulates every positive and no negative.
    bool target_consistent = false;
};

struct AdversarialOutcome {
    LearningTranscript transcript;
    std::vector<AdversarialRound> rounds;
    Rational final_lambda;
};

inline AdversarialOutcome adversarial_demo(const Rational& initial_lambda, std::size_t rounds,
                                           const LearningBounds& learner = {})
{
    if (rounds == 0) throw PreconditionError("rounds must be at least 1");
    auto teacher = std::make_shared<AdversarialTeacher>(initial_lambda);
    AdversarialOutcome out;
    LearningBounds b = learner;
    b.max_rounds = rounds;
    out.transcript = learn([teacher](const Lpts& h) { return (*teacher)(h); }, LearnMode::Partition, b,
                           [&](const LearningRound& r, const SampleSet& samples) {
                               AdversarialRound ar;
                               ar.lambda = teacher->history().back();
                               ar.response = response_name(r.response.kind);
                               ar.hypothesis_states = r.hypothesis.num_states();
                               ar.target_consistent = is_consistent(samples, u_lambda_model(teacher->lambda()));
                               out.rounds.push_back(ar);
                           });
    out.final_lambda = teacher->lambda();
    return out;
}

inline nlohmann::ordered_json adversarial_to_json(const AdversarialOutcome& o, bool timing = false)
{
    auto j = transcript_to_json(o.transcript, timing);
    auto& h = j["lambda_history"] = nlohmann::ordered_json::array();
    for (auto& r : o.rounds)
        h.push_back({{"before", to_string(r.lambda.before)},
                     {"after", to_string(r.lambda.after)},
                     {"bumped", r.lambda.bumped},
                     {"response", r.response},
                     {"target_consistent", r.target_consistent}});
    j["final_lambda"] = to_string(o.final_lambda);
    return j;
}

} // namespace lpts
