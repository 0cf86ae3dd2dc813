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

#include "generators.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include "lpts/learn.hpp"
#include "lpts/simulation.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <tuple>

namespace lpts {
namespace {

using testing::load_samples;

using LiftedSet = std::set<std::tuple<StateId, std::string, std::map<StateId, Rational>>>;

LiftedSet lifted_set(const Lpts& l)
{
    LiftedSet out;
    for (auto& t : l.transitions()) {
        std::map<StateId, Rational> m;
        for (auto& [s, q] : t.target.entries()) m[s] = q;
        out.emplace(t.source, l.action_name(t.action), m);
    }
    return out;
}

SampleSet random_positive_set(Rng& rng, std::size_t max_states)
{
    SampleSet s;
    const auto n = 1 + rng.below(2);
    for (std::size_t i = 0; i < n; ++i) {
        RandomTreeOptions o;
        o.max_states = 1 + rng.below(max_states);
        o.dist.max_support = 3;
        s.add_positive(random_tree(rng, o, "p" + std::to_string(i)));
    }
    return s;
}

Lpts random_target(Rng& rng, std::size_t max_states, bool lts_only = false)
{
    RandomModelOptions o;
    o.states = 1 + rng.below(max_states);
    o.actions = 2;
    o.deadlock_percent = 20;
    o.dist.max_support = lts_only ? 1 : 2;
    return random_lpts(rng, o, "target");
}

// Sample sets with a known consistent model, kept small for the brute force.
struct Instance {
    Lpts target;
    SampleSet samples;
};

Instance random_instance(Rng& rng, std::size_t max_target, std::size_t max_tree)
{
    for (;;) {
        auto l = random_target(rng, max_target);
        gen::SampleOptions so;
        so.positives = 1 + rng.below(2);
        so.negatives = rng.below(3);
        so.max_tree_states = max_tree;
        auto s = gen::random_samples(rng, l, so);
        if (sample_space(s).size() <= 8) return {std::move(l), std::move(s)};
    }
}

TEST(SampleSpace, RootsFirstAndParents)
{
    auto s = load_samples("positives_only");
    auto sp = sample_space(s);
    ASSERT_EQ(sp.size(), 6u);
    ASSERT_EQ(sp.roots.size(), 2u);
    EXPECT_TRUE(sp.is_root(sp.order[0]));
    EXPECT_TRUE(sp.is_root(sp.order[1]));
    for (auto st : sp.order)
        if (!sp.is_root(st)) {
            auto p = sp.parent(st);
            ASSERT_TRUE(p.has_value());
            auto pos_p = std::find(sp.order.begin(), sp.order.end(), *p);
            auto pos_s = std::find(sp.order.begin(), sp.order.end(), st);
            EXPECT_LT(pos_p, pos_s);
        }
    EXPECT_EQ(sp.forest.state_name(sp.roots[0]), "p0.t0");
}

TEST(SampleSet, RejectsNonTrees)
{
    SampleSet s;
    EXPECT_THROW(s.add_positive(testing::load("models/coin.lpts")), PreconditionError);
    EXPECT_THROW(s.add_negative(testing::u_lambda(Rational(1, 2))), PreconditionError);
}

TEST(SampleSet, CanonicalTreeIgnoresNames)
{
    auto a = load_samples("two_classes").positives()[0];
    LptsBuilder b("other");
    auto z = b.add_state("r"), x = b.add_state("m"), y = b.add_state("k"), w = b.add_state("leaf");
    b.set_start(z);
    b.add_transition(z, b.action("a"), Distribution::from_entries({{y, Rational(1, 2)}, {x, Rational(1, 2)}}));
    b.add_transition(y, b.action("b"), Distribution::dirac(w));
    auto c = std::move(b).build();
    EXPECT_EQ(canonical_tree(a), canonical_tree(c));
    EXPECT_NE(canonical_tree(a), canonical_tree(load_samples("two_classes").negatives()[0]));
}

TEST(Partition, NormalizeAndRoundTrip)
{
    auto s = load_samples("positives_only");
    auto sp = sample_space(s);
    std::vector<std::size_t> labels(sp.size(), 7);
    for (auto r : sp.roots) labels[r] = 3;
    auto p = normalize_partition(sp, labels);
    EXPECT_EQ(p.num_classes, 2u);
    EXPECT_EQ(p.class_of[sp.roots[0]], 0u);
    EXPECT_NO_THROW(validate_partition(sp, p));
    EXPECT_EQ(parse_partition(sp, serialize_partition(sp, p)), p);

    labels[sp.roots[1]] = 9;
    EXPECT_THROW(normalize_partition(sp, labels), InvalidModel);
    EXPECT_THROW(parse_partition(sp, "partition\nclass p0.t0 p1.t0\n"), InvalidModel);
    EXPECT_THROW(parse_partition(sp, "partition\nclass p0.t0 p1.t0 nowhere\n"), ParseError);
}

TEST(Partition, QuotientMatchesAccumulationOracle)
{
    Rng rng(11);
    for (int round = 0; round < 500; ++round) {
        auto s = random_positive_set(rng, 7);
        auto sp = sample_space(s);
        auto p = gen::random_partition(rng, sp, 1 + rng.below(4));
        auto q = quotient(sp, p);
        auto f = oracle::raw_forest(s.positives());
        std::vector<std::size_t> block(f.states.size());
        for (StateId st = 0; st < sp.size(); ++st) block[f.index.at(sp.origin[st])] = p.class_of[st];
        auto ref = oracle::block_quotient(s.positives(), f, block, p.num_classes);
        ASSERT_EQ(lifted_set(q), lifted_set(ref)) << serialize_partition(sp, p);
        for (auto& t : q.transitions()) {
            Rational total;
            for (auto& [u, x] : t.target.entries()) total += x;
            ASSERT_EQ(total, 1);
        }
        for (auto& pos : s.positives()) ASSERT_TRUE(tree_simulated_by(pos, q));
    }
}

TEST(StochasticPartition, RandomQuotientsSimulatePositives)
{
    Rng rng(12);
    for (int round = 0; round < 500; ++round) {
        auto s = random_positive_set(rng, 7);
        auto sp = sample_space(s);
        auto p = gen::random_stochastic_partition(rng, sp, 1 + rng.below(4));
        ASSERT_NO_THROW(validate_stochastic_partition(sp, p));
        auto q = stochastic_quotient(sp, p);
        for (auto& t : q.transitions()) {
            Rational total;
            for (auto& [u, x] : t.target.entries()) total += x;
            ASSERT_EQ(total, 1);
        }
        for (auto& pos : s.positives()) ASSERT_TRUE(oracle::simulated(pos, q)) << serialize_stochastic_partition(sp, p);
        ASSERT_EQ(parse_stochastic_partition(sp, serialize_stochastic_partition(sp, p)), p);
    }
}

TEST(StochasticPartition, DiracRowsGiveTheClassicalQuotient)
{
    Rng rng(13);
    for (int round = 0; round < 200; ++round) {
        auto s = random_positive_set(rng, 6);
        auto sp = sample_space(s);
        auto p = gen::random_partition(rng, sp, 3);
        auto sq = stochastic_quotient(sp, to_stochastic(sp, p));
        ASSERT_EQ(lifted_set(sq), lifted_set(quotient(sp, p)));
    }
}

TEST(StochasticPartition, ValidationCatchesBrokenRows)
{
    auto s = load_samples("two_classes");
    auto sp = sample_space(s);
    auto good = to_stochastic(sp, normalize_partition(sp, {0, 1, 0, 1}));
    ASSERT_NO_THROW(validate_stochastic_partition(sp, good));

    auto bad_sum = good;
    bad_sum.rows[sp.order[1]].begin()->second[1] = Rational(1, 2);
    EXPECT_THROW(validate_stochastic_partition(sp, bad_sum), InvalidModel);

    auto root_moved = good;
    root_moved.rows[sp.roots[0]][0] = dirac_row(2, 1);
    EXPECT_THROW(validate_stochastic_partition(sp, root_moved), InvalidModel);

    auto missing = good;
    missing.rows[sp.order[1]].clear();
    EXPECT_THROW(validate_stochastic_partition(sp, missing), InvalidModel);

    auto empty_group = good;
    empty_group.num_groups = 3;
    for (auto& ctx : empty_group.rows)
        for (auto& [g, row] : ctx) row.push_back(Rational(0));
    EXPECT_THROW(validate_stochastic_partition(sp, empty_group), InvalidModel);
    auto compacted = compact_groups(sp, empty_group);
    EXPECT_EQ(compacted.num_groups, 2u);
    EXPECT_NO_THROW(validate_stochastic_partition(sp, compacted));
}

// Quotients built from a consistent model stay below that model and within
// the class-count bounds.
TEST(FromSimulation, BoundsAndConsistency)
{
    Rng rng(14);
    int lts_cases = 0;
    for (int round = 0; round < 200; ++round) {
        const bool lts = round % 4 == 0;
        auto l = random_target(rng, 4, lts);
        gen::SampleOptions so;
        so.positives = 1 + rng.below(3);
        so.negatives = 2;
        so.max_tree_states = 6;
        auto s = gen::random_samples(rng, l, so);
        auto sp = sample_space(s);
        const std::size_t k = l.num_states();
        auto p = partition_from_simulation(s, sp, l);
        ASSERT_LE(p.num_classes, std::size_t(1) << k);
        if (lts) {
            ++lts_cases;
            ASSERT_LE(p.num_classes, k);
        }
        auto q = quotient(sp, p);
        ASSERT_TRUE(simulates(q, l).holds);
        ASSERT_TRUE(is_consistent(s, q));

        auto sto = stochastic_partition_from_simulation(s, sp, l);
        ASSERT_LE(sto.num_groups, k);
        auto sq = stochastic_quotient(sp, sto);
        ASSERT_TRUE(simulates(sq, l).holds);
        ASSERT_TRUE(is_consistent(s, sq));
    }
    EXPECT_EQ(lts_cases, 50);
}

TEST(FromSimulation, RequiresPositivesBelowTheModel)
{
    auto s = load_samples("two_classes");
    auto sp = sample_space(s);
    auto l = trivial_lpts();
    EXPECT_THROW(partition_from_simulation(s, sp, l), PreconditionError);
    EXPECT_THROW(stochastic_partition_from_simulation(s, sp, l), PreconditionError);
}

// Minimal sizes computed once by exhaustive set-partition search and frozen.
const std::map<std::string, std::pair<std::size_t, std::size_t>>& expected_sizes()
{
    static const std::map<std::string, std::pair<std::size_t, std::size_t>> m{
        {"action_mismatch", {1, 1}}, {"positives_only", {1, 1}}, {"random_13", {1, 1}},
        {"random_145", {2, 2}},      {"random_17", {2, 2}},      {"random_223", {3, 3}},
        {"random_36", {1, 1}},       {"random_41", {2, 2}},      {"random_62", {2, 2}},
        {"random_97", {2, 2}},       {"stochastic_gap", {3, 2}}, {"threshold", {2, 2}},
        {"two_classes", {2, 2}},
    };
    return m;
}

TEST(LearnPartition, FixturesMatchFrozenMinima)
{
    const auto names = testing::learning_corpus();
    ASSERT_EQ(names.size(), expected_sizes().size());
    for (auto& name : names) {
        SCOPED_TRACE(name);
        auto s = load_samples(name);
        auto r = learn_min_partition(s);
        EXPECT_EQ(r.size, expected_sizes().at(name).first);
        EXPECT_EQ(oracle::min_partition_size(s.positives(), s.negatives()), r.size);
        EXPECT_TRUE(oracle::consistent(s.positives(), s.negatives(), r.quotient));
        EXPECT_EQ(r.quotient.num_states(), r.size);
        ASSERT_EQ(r.search_trace.size(), r.size);
        EXPECT_TRUE(r.search_trace.back().sat);
    }
}

TEST(LearnPartition, TwoClassesShape)
{
    auto r = learn_min_partition(load_samples("two_classes"));
    auto& p = std::get<Partition>(r.witness);
    auto sp = sample_space(load_samples("two_classes"));
    EXPECT_EQ(serialize_partition(sp, p), "partition\nclass p0.z p0.x p0.w\nclass p0.y\n");
    EXPECT_EQ(serialize_lpts(r.quotient),
              "lpts hypothesis\nalphabet a b\nstates q0 q1\nstart q0\n"
              "trans q0 a { q0: 1/2, q1: 1/2 }\ntrans q0 b { q0: 1 }\n");
}

TEST(LearnPartition, RandomInstancesAreMinimal)
{
    Rng rng(15);
    for (int round = 0; round < 60; ++round) {
        auto inst = random_instance(rng, 3, 5);
        auto r = learn_min_partition(inst.samples);
        ASSERT_EQ(oracle::min_partition_size(inst.samples.positives(), inst.samples.negatives()), r.size);
        ASSERT_TRUE(is_consistent(inst.samples, r.quotient));
    }
}

// Resuming from the partition of fewer samples, or from arbitrary labels,
// only changes where the search starts.
TEST(LearnPartition, HintsKeepTheMinimum)
{
    Rng rng(16);
    for (int round = 0; round < 40; ++round) {
        auto inst = random_instance(rng, 3, 5);
        const auto want = *oracle::min_partition_size(inst.samples.positives(), inst.samples.negatives());
        SampleSet first({inst.samples.positives()[0]}, {});
        for (auto& n : inst.samples.negatives())
            if (!tree_simulated_by(n, renamed(inst.samples.positives()[0], "p"))) first.add_negative(n);
        LearnOptions o;
        auto prev = learn_min_partition(first);
        o.min_k = prev.size;
        o.hint = std::get<Partition>(prev.witness).class_of;
        ASSERT_EQ(learn_min_partition(inst.samples, o).size, want);
        o.min_k = want;
        o.hint.assign(sample_space(inst.samples).size(), 0);
        for (auto& x : o.hint) x = rng.below(want);
        ASSERT_EQ(learn_min_partition(inst.samples, o).size, want);
    }
}

TEST(LearnPartition, Preconditions)
{
    SampleSet none;
    auto r = learn_min_partition(none);
    EXPECT_EQ(r.size, 1u);
    EXPECT_EQ(r.quotient.num_states(), 1u);

    SampleSet dead;
    dead.add_negative(trivial_lpts("n"));
    EXPECT_THROW(learn_min_partition(dead), PreconditionError);

    auto s = load_samples("two_classes");
    SampleSet clash(s.positives(), {s.positives()[0]});
    EXPECT_THROW(learn_min_partition(clash), PreconditionError);

    LearnOptions o;
    o.max_k = 1;
    EXPECT_THROW(learn_min_partition(s, o), BoundExceeded);

    o.max_k = 8;
    o.extra_alphabet = {"zz"};
    auto withz = learn_min_partition(s, o);
    EXPECT_TRUE(withz.quotient.find_action("zz").has_value());
}

// Requires an SMT-LIB 2 solver (z3 -in unless LPTS_SOLVER_CMD says otherwise).
TEST(LearnSolver, AgreesWithEnumerationOnFixtures)
{
    LearnOptions o;
    o.backend = Backend::Solver;
    for (auto& name : testing::learning_corpus()) {
        SCOPED_TRACE(name);
        auto s = load_samples(name);
        if (sample_space(s).size() > 8) continue;
        auto r = learn_min_partition(s, o);
        EXPECT_EQ(r.size, expected_sizes().at(name).first);
        EXPECT_TRUE(is_consistent(s, r.quotient));
    }
}

TEST(LearnSolver, AgreesWithEnumerationOnRandomInstances)
{
    Rng rng(16);
    LearnOptions o;
    o.backend = Backend::Solver;
    for (int round = 0; round < 25; ++round) {
        auto inst = random_instance(rng, 3, 5);
        auto e = learn_min_partition(inst.samples);
        auto v = learn_min_partition(inst.samples, o);
        ASSERT_EQ(e.size, v.size);
        ASSERT_TRUE(is_consistent(inst.samples, v.quotient));
    }
}

TEST(LearnStochastic, FixturesMatchFrozenMinima)
{
    LearnOptions o;
    o.backend = Backend::Solver;
    for (auto& name : testing::learning_corpus()) {
        SCOPED_TRACE(name);
        auto s = load_samples(name);
        auto r = learn_min_stochastic(s, o);
        EXPECT_EQ(r.size, expected_sizes().at(name).second);
        EXPECT_TRUE(oracle::consistent(s.positives(), s.negatives(), r.quotient));
        EXPECT_LE(r.size, expected_sizes().at(name).first);
    }
}

// One group fewer than any classical partition. A single group is the
// single-class quotient, which the exhaustive search already rules out.
TEST(LearnStochastic, BeatsClassicalOnGapFixture)
{
    auto s = load_samples("stochastic_gap");
    ASSERT_EQ(oracle::min_partition_size(s.positives(), s.negatives()), 3u);
    LearnOptions o;
    o.backend = Backend::Solver;
    auto r = learn_min_stochastic(s, o);
    EXPECT_EQ(r.size, 2u);
    EXPECT_TRUE(oracle::consistent(s.positives(), s.negatives(), r.quotient));
    auto sp = sample_space(s);
    auto& p = std::get<StochasticPartition>(r.witness);
    EXPECT_NO_THROW(validate_stochastic_partition(sp, p));
    EXPECT_EQ(lifted_set(stochastic_quotient(sp, p)), lifted_set(r.quotient));
}

TEST(LearnStochastic, TrivialCases)
{
    LearnOptions o;
    o.backend = Backend::Solver;
    auto r = learn_min_stochastic(load_samples("positives_only"), o);
    EXPECT_EQ(r.size, 1u);
    auto sp = sample_space(load_samples("positives_only"));
    EXPECT_NO_THROW(validate_stochastic_partition(sp, std::get<StochasticPartition>(r.witness)));
}

} // namespace
} // namespace lpts
