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

// Runs every acceptance criterion once and prints one PASS/FAIL line each.
// Exit status is the number of failed criteria.

#include "generators.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#include "lpts/all.hpp"
#include "lpts/cli.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace lpts {
namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
    bool pass = true;
    std::string detail;

    void fail(const std::string& why)
    {
        if (pass) detail = why;
        pass = false;
    }
};

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double seconds)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2fs", seconds);
    return buf;
}

// Independent restatements of the certificate conditions.
bool coupling_ok(const Distribution& mu1, const Distribution& mu2, const Relation& r, const WeightFunction& w)
{
    std::map<StateId, Rational> rows, cols;
    for (auto& [a, b, q] : w.weights) {
        if (q <= 0 || !r.contains(a, b)) return false;
        rows[a] += q;
        cols[b] += q;
    }
    for (auto& [s, p] : mu1.entries())
        if (rows[s] != p) return false;
    for (auto& [t, p] : mu2.entries())
        if (cols[t] != p) return false;
    return rows.size() == mu1.entries().size() && cols.size() == mu2.entries().size();
}

bool witness_ok(const Distribution& mu1, const Distribution& mu2, const Relation& r, const WitnessSubset& w)
{
    Rational left, right;
    for (auto s : w.subset) {
        if (mu1(s) == 0) return false;
        left += mu1(s);
    }
    for (auto& [t, p] : mu2.entries()) {
        bool hit = false;
        for (auto s : w.subset) hit = hit || r.contains(s, t);
        if (hit) right += p;
    }
    return left > right;
}

struct DistInstance {
    Distribution mu1, mu2;
    Relation r;
};

DistInstance random_dist_instance(Rng& rng)
{
    const std::size_t n1 = 1 + rng.below(5), n2 = 1 + rng.below(5);
    std::vector<StateId> left(n1), right(n2);
    for (StateId s = 0; s < n1; ++s) left[s] = s;
    for (StateId s = 0; s < n2; ++s) right[s] = s;
    RandomDistributionOptions o;
    o.max_support = 5;
    DistInstance d{random_distribution(rng, left, o), random_distribution(rng, right, o), Relation(n1, n2)};
    for (StateId a = 0; a < n1; ++a)
        for (StateId b = 0; b < n2; ++b)
            if (rng.chance(55, 100)) d.r.insert(a, b);
    return d;
}

Verdict c1_dist_leq_oracle()
{
    Rng rng(1001);
    const auto t0 = Clock::now();
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        auto d = random_dist_instance(rng);
        if (std::holds_alternative<WeightFunction>(dist_leq(d.mu1, d.mu2, d.r)) != oracle::subsets_hold(d.mu1, d.mu2, d.r))
            return {false, "disagreement on instance " + std::to_string(i)};
    }
    const double t = since(t0);
    Verdict v{t < 10, std::to_string(n) + " instances agree in " + fmt(t)};
    if (t >= 10) v.detail += " (over 10s)";
    return v;
}

Verdict c2_certificates()
{
    Rng rng(1002);
    std::size_t couplings = 0, witnesses = 0;
    auto check = [&](const Distribution& mu1, const Distribution& mu2, const Relation& r) {
        auto res = dist_leq(mu1, mu2, r);
        if (auto* w = std::get_if<WeightFunction>(&res)) {
            ++couplings;
            return coupling_ok(mu1, mu2, r, *w);
        }
        ++witnesses;
        return witness_ok(mu1, mu2, r, std::get<WitnessSubset>(res));
    };
    for (int i = 0; i < 5000; ++i) {
        auto d = random_dist_instance(rng);
        if (!check(d.mu1, d.mu2, d.r)) return {false, "bad certificate on random instance " + std::to_string(i)};
    }
    // Denominators beyond 64-bit scaling.
    for (int i = 0; i < 200; ++i) {
        Rational p = rational(1, 1000003 + 2 * i), q = rational(1, 999983 + 2 * i), s = rational(1, 1000033 + i);
        auto mu1 = Distribution::from_entries({{0, p}, {1, 1 - p}});
        auto mu2 = Distribution::from_entries({{0, q}, {1, s}, {2, 1 - q - s}});
        Relation r(2, 3);
        for (StateId a = 0; a < 2; ++a)
            for (StateId b = 0; b < 3; ++b)
                if (rng.chance(60, 100)) r.insert(a, b);
        if (!check(mu1, mu2, r)) return {false, "bad certificate on wide instance " + std::to_string(i)};
    }
    return {couplings > 0 && witnesses > 0,
            std::to_string(couplings) + " weight functions and " + std::to_string(witnesses) + " witnesses exact"};
}

Verdict c3_preorder()
{
    std::size_t reflexive = 0;
    for (auto& [name, l] : testing::model_corpus()) {
        if (!simulates(l, l).holds) return {false, name + " not reflexive"};
        ++reflexive;
    }
    for (auto& name : testing::learning_corpus()) {
        auto s = testing::load_samples(name);
        for (auto* set : {&s.positives(), &s.negatives()})
            for (auto& t : *set) {
                if (!simulates(t, t).holds) return {false, name + " sample not reflexive"};
                ++reflexive;
            }
    }
    Rng rng(1003);
    std::size_t triples = 0;
    for (std::size_t tries = 0; triples < 500; ++tries) {
        if (tries > 200000) return {false, "only " + std::to_string(triples) + " linked triples found"};
        RandomModelOptions o;
        o.states = 1 + rng.below(3);
        o.actions = 1;
        o.deadlock_percent = 30;
        auto a = random_lpts(rng, o, "a"), b = random_lpts(rng, o, "b"), c = random_lpts(rng, o, "c");
        if (!simulates(a, b).holds || !simulates(b, c).holds) continue;
        ++triples;
        if (!simulates(a, c).holds) return {false, "transitivity fails:\n" + serialize_lpts(a) + serialize_lpts(b) + serialize_lpts(c)};
    }
    return {true, std::to_string(reflexive) + " fixtures reflexive, 500 linked triples transitive"};
}

Verdict c4_counterexamples()
{
    Rng rng(1004);
    std::size_t failing = 0;
    for (std::size_t tries = 0; failing < 600; ++tries) {
        RandomModelOptions o;
        o.states = 1 + rng.below(8);
        o.actions = 1 + rng.below(3);
        o.max_transitions = 1 + rng.below(3);
        o.dist.max_support = 3;
        auto l1 = random_lpts(rng, o, "l1");
        o.states = 1 + rng.below(8);
        o.state_prefix = "t";
        auto l2 = random_lpts(rng, o, "l2");
        auto res = simulates(l1, l2);
        if (res.holds != oracle::simulated(l1, l2)) return {false, "verdict disagrees with the oracle"};
        if (res.holds) continue;
        ++failing;
        const auto& c = *res.cex;
        if (!classify(c.tree).is_tree || !verify_execution_mapping(c.tree, c.mapping, l1) ||
            c.mapping.image[c.tree.start()] != l1.start() || !oracle::simulated(c.tree, l1) || oracle::simulated(c.tree, l2))
            return {false, "unsound counterexample:\n" + serialize_lpts(l1) + serialize_lpts(l2)};
    }
    return {true, std::to_string(failing) + " failing checks, every counterexample sound"};
}

Verdict c5_characterization()
{
    Rng rng(1005);
    for (int i = 0; i < 200; ++i) {
        RandomTreeOptions t;
        t.max_states = 1 + rng.below(10);
        t.actions = 1 + rng.below(2);
        auto tree = random_tree(rng, t);
        RandomModelOptions o;
        o.states = 1 + rng.below(6);
        o.actions = t.actions;
        auto l = random_lpts(rng, o, "l");
        auto rel = characterization_relation(tree, l);
        if (rel != coarsest_simulation(tree, l) || rel != oracle::shrink_coarsest(tree, l))
            return {false, "relations differ:\n" + serialize_lpts(tree) + serialize_lpts(l)};
    }
    return {true, "200 tree/model pairs equal"};
}

Verdict c6_split_example()
{
    // s1, s2 each 1/2; t1 1/3, t2 1/2, t3 1/6; s1 relates to t1, t2 and s2 to t2, t3.
    auto mu1 = Distribution::from_entries({{0, rational(1, 2)}, {1, rational(1, 2)}});
    auto mu2 = Distribution::from_entries({{0, rational(1, 3)}, {1, rational(1, 2)}, {2, rational(1, 6)}});
    Relation r(2, 3);
    r.insert(0, 0);
    r.insert(0, 1);
    r.insert(1, 1);
    r.insert(1, 2);
    auto res = dist_leq(mu1, mu2, r);
    auto* w = std::get_if<WeightFunction>(&res);
    if (!w) return {false, "no weight function"};
    const Rational g1 = w->at(0, 0) / mu1(0), g2 = w->at(0, 1) / mu1(0);
    if (g1 != rational(2, 3) || g2 != rational(1, 3)) return {false, "groupings " + to_string(g1) + ", " + to_string(g2)};
    Relation r2(2, 2);
    r2.insert(0, 0);
    r2.insert(0, 1);
    auto half = Distribution::from_entries({{0, rational(1, 2)}, {1, rational(1, 2)}});
    auto res2 = dist_leq(half, half, r2);
    auto* ws = std::get_if<WitnessSubset>(&res2);
    if (!ws || ws->subset != std::vector<StateId>{1}) return {false, "witness is not {s2}"};
    return {true, "s1 split 2/3 and 1/3; witness {s2}"};
}

Verdict c7_quotients()
{
    Rng rng(1007);
    auto positives = [&] {
        SampleSet s;
        const auto n = 1 + rng.below(2);
        for (std::size_t i = 0; i < n; ++i) {
            RandomTreeOptions o;
            o.max_states = 1 + rng.below(7);
            o.dist.max_support = 3;
            s.add_positive(random_tree(rng, o, "p" + std::to_string(i)));
        }
        return s;
    };
    auto sums_to_one = [](const Lpts& q) {
        for (auto& t : q.transitions()) {
            Rational total;
            for (auto& [u, x] : t.target.entries()) total += x;
            if (total != 1) return false;
        }
        return true;
    };
    for (int i = 0; i < 500; ++i) {
        auto s = positives();
        auto sp = sample_space(s);
        auto q = quotient(sp, gen::random_partition(rng, sp, 1 + rng.below(4)));
        if (!sums_to_one(q)) return {false, "classical quotient mass is not 1"};
        for (auto& p : s.positives())
            if (!oracle::simulated(p, q)) return {false, "positive not below classical quotient"};
    }
    for (int i = 0; i < 500; ++i) {
        auto s = positives();
        auto sp = sample_space(s);
        auto p = gen::random_stochastic_partition(rng, sp, 1 + rng.below(4));
        validate_stochastic_partition(sp, p);
        auto q = stochastic_quotient(sp, p);
        if (!sums_to_one(q)) return {false, "stochastic quotient mass is not 1"};
        for (auto& pos : s.positives())
            if (!oracle::simulated(pos, q)) return {false, "positive not below stochastic quotient"};
    }
    return {true, "500 classical and 500 stochastic partitions"};
}

Verdict c8_size_bounds()
{
    Rng rng(1008);
    std::size_t lts = 0;
    for (int i = 0; i < 200; ++i) {
        const bool lts_only = i % 4 == 0;
        RandomModelOptions o;
        o.states = 1 + rng.below(4);
        o.actions = 2;
        o.deadlock_percent = 20;
        o.dist.max_support = lts_only ? 1 : 2;
        auto l = random_lpts(rng, o, "target");
        gen::SampleOptions so;
        so.positives = 1 + rng.below(3);
        so.negatives = 2;
        so.max_tree_states = 6;
        auto s = gen::random_samples(rng, l, so);
        auto sp = sample_space(s);
        const std::size_t k = l.num_states();
        auto p = partition_from_simulation(s, sp, l);
        if (p.num_classes > (std::size_t(1) << k)) return {false, "classical bound exceeded"};
        if (lts_only && p.num_classes > k) return {false, "classical bound on plain transition systems exceeded"};
        lts += lts_only;
        auto sto = stochastic_partition_from_simulation(s, sp, l);
        if (sto.num_groups > k) return {false, "stochastic bound exceeded"};
        if (!oracle::consistent(s.positives(), s.negatives(), quotient(sp, p)) ||
            !oracle::consistent(s.positives(), s.negatives(), stochastic_quotient(sp, sto)))
            return {false, "quotient from a consistent model is inconsistent"};
    }
    return {true, "200 instances (" + std::to_string(lts) + " without probabilistic branching)"};
}

Verdict c9_backends_agree()
{
    const auto cfg = smt::SolverConfig::resolve();
    const auto t0 = Clock::now();
    std::size_t n = 0;
    for (auto& name : testing::learning_corpus()) {
        auto s = testing::load_samples(name);
        LearnOptions e, v;
        v.backend = Backend::Solver;
        v.solver = cfg;
        std::size_t a, b;
        try {
            a = learn_min_partition(s, e).size;
            b = learn_min_partition(s, v).size;
        } catch (const SolverError& err) {
            return {false, "solver '" + cfg.command + "' unusable: " + err.what()};
        }
        if (a != b) return {false, name + ": enumeration " + std::to_string(a) + ", solver " + std::to_string(b)};
        ++n;
    }
    const double t = since(t0);
    return {t < 300, std::to_string(n) + " fixtures agree in " + fmt(t)};
}

Verdict c10_stochastic_gap()
{
    auto s = testing::load_samples("stochastic_gap");
    const auto classical = oracle::min_partition_size(s.positives(), s.negatives());
    LearnOptions o;
    o.backend = Backend::Solver;
    auto sto = learn_min_stochastic(s, o);
    if (!classical) return {false, "no classical partition"};
    if (!oracle::consistent(s.positives(), s.negatives(), sto.quotient)) return {false, "stochastic quotient inconsistent"};
    if (learn_min_partition(s).size != *classical) return {false, "enumeration disagrees with brute force"};
    return {sto.size < *classical,
            "classical minimum " + std::to_string(*classical) + ", stochastic minimum " + std::to_string(sto.size)};
}

Verdict c11_active_learning()
{
    Rng rng(21);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        RandomModelOptions o;
        o.states = 1 + rng.below(4);
        o.actions = 1 + rng.below(2);
        o.max_transitions = 2;
        o.dist.max_support = 2;
        auto target = random_lpts(rng, o, "target");
        const auto t0 = Clock::now();
        auto tr = learn([&](const Lpts& h) { return friendly_teacher(target, h); }, LearnMode::Partition, {});
        const double t = since(t0);
        worst = std::max(worst, t);
        if (!tr.final) return {false, "target " + std::to_string(i) + " did not converge"};
        if (!oracle::simulated(*tr.final, target) || !oracle::simulated(target, *tr.final))
            return {false, "target " + std::to_string(i) + " converged to a non-equivalent hypothesis"};
        for (auto& r : tr.rounds)
            if (r.hypothesis.num_states() > target.num_states()) return {false, "hypothesis larger than target"};
        if (t >= 60) return {false, "target " + std::to_string(i) + " took " + fmt(t)};
    }
    return {true, "100/100 converged, slowest " + fmt(worst)};
}

Verdict c12_adversarial()
{
    auto out = adversarial_demo(rational(1, 2), 20);
    if (out.transcript.final || out.rounds.size() != 20) return {false, "declared equivalence or stopped early"};
    Rational lambda = rational(1, 2);
    std::size_t bumps = 0;
    for (auto& r : out.rounds) {
        if (r.response == "equivalent") return {false, "equivalence declared"};
        if (r.lambda.before != lambda) return {false, "lambda history is not contiguous"};
        if (r.lambda.bumped) {
            ++bumps;
            const Rational want = (lambda_plus(r.lambda.before, out.transcript.samples.negatives()) + r.lambda.before) / 2;
            if (!(r.lambda.after > r.lambda.before) || r.lambda.after != want) return {false, "bump is not the midpoint"};
        } else if (r.lambda.after != r.lambda.before) {
            return {false, "lambda moved without a bump"};
        }
        if (!r.target_consistent) return {false, "target inconsistent with the counterexamples"};
        lambda = r.lambda.after;
    }
    return {bumps > 0, "20 rounds, " + std::to_string(bumps) + " bumps, final lambda " + to_string(lambda)};
}

Verdict c13_agr()
{
    Rng rng(32);
    int held = 0, violated = 0;
    auto sound = [](const AgrOutcome& o, const AgrTask& t) {
        const auto system = compose(t.l1, t.l2).system;
        if (o.holds != oracle::simulated(system, t.spec) || !o.monolithic_holds || *o.monolithic_holds != o.holds) return false;
        if (o.holds)
            return simulates(t.l2, *o.assumption).holds && simulates(compose(t.l1, *o.assumption).system, t.spec).holds;
        const auto& c = *o.real_cex;
        return verify_execution_mapping(c.tree, c.mapping, *o.cex_system) && oracle::simulated(c.tree, system) &&
               !oracle::simulated(c.tree, t.spec);
    };
    for (int round = 0; held < 50 || violated < 50; ++round) {
        if (round > 1000) return {false, "not enough cases generated"};
        auto l1 = gen::random_component(rng, {"a", "b"}, "l1", "x");
        auto l2 = gen::random_component(rng, {"b", "c"}, "l2", "y", 2);
        auto sys = compose(l1, l2).system;
        if (held < 50) {
            AgrTask t{l1, l2, sys};
            t.confirm = true;
            auto o = check_asym(t);
            if (!o.holds || !sound(o, t)) return {false, "composed spec case " + std::to_string(round)};
            ++held;
        }
        if (violated < 50 && !sys.transitions().empty()) {
            auto spec = gen::without_transition(sys, rng.below(sys.transitions().size()));
            if (simulates(sys, spec).holds) continue;
            AgrTask t{l1, l2, spec};
            t.confirm = true;
            auto o = check_asym(t);
            if (o.holds || !sound(o, t)) return {false, "perturbed spec case " + std::to_string(round)};
            ++violated;
        }
    }
    return {true, "50 held and 50 violated, all matching the monolithic check"};
}

Verdict c14_determinism()
{
    auto twice = [](const std::function<std::string()>& f) { return f() == f(); };
    auto cli = [](std::vector<std::string> args) {
        return [args] {
            std::vector<const char*> argv{"lpts"};
            for (auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
            return std::to_string(code) + out.str();
        };
    };
    const auto fx = [](const std::string& rel) { return testing::fixture_path(rel).string(); };
    std::vector<std::pair<std::string, std::function<std::string()>>> jobs{
        {"random models", [] {
             Rng rng(77);
             std::string s;
             for (int i = 0; i < 20; ++i) s += serialize_lpts(random_lpts(rng, {}, "r"));
             return s;
         }},
        {"transcripts", [] {
             Rng rng(78);
             RandomModelOptions o;
             o.states = 3;
             auto target = random_lpts(rng, o, "target");
             return transcript_to_json(learn([&](const Lpts& h) { return friendly_teacher(target, h); }, LearnMode::Partition, {}))
                 .dump();
         }},
        {"scripts", [] {
             std::string s;
             for (auto& name : testing::learning_corpus()) {
                 auto samples = testing::load_samples(name);
                 s += smt::encode_partition(samples, 2).text + smt::encode_stochastic(samples, 2).text;
             }
             return s;
         }},
        {"adversarial report", [] { return adversarial_to_json(adversarial_demo(rational(1, 2), 8)).dump(); }},
        {"agr report", [] {
             auto l1 = testing::load("models/sender.lpts"), l2 = testing::load("models/receiver.lpts");
             return agr_to_json(check_asym(AgrTask{l1, l2, compose(l1, l2).system})).dump();
         }},
        {"cli random", cli({"--seed", "5", "random", "--states", "5"})},
        {"cli learn", cli({"--json", "learn-consistent", "--pos", fx("learning/random_223/pos"), "--neg",
                           fx("learning/random_223/neg")})},
        {"cli active-learn", cli({"--json", "active-learn", "--target", fx("models/coin.lpts")})},
    };
    for (auto& [name, f] : jobs)
        if (!twice(f)) return {false, name + " differ between runs"};
    return {true, std::to_string(jobs.size()) + " artefact kinds byte-identical"};
}

} // namespace
} // namespace lpts

int main()
{
    using namespace lpts;
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"dist_leq matches subset enumeration", c1_dist_leq_oracle},
        {"weight functions and witnesses are exact", c2_certificates},
        {"simulation is a preorder", c3_preorder},
        {"counterexamples are sound", c4_counterexamples},
        {"tree characterization equals coarsest simulation", c5_characterization},
        {"split example groupings", c6_split_example},
        {"quotients are distributions above the positives", c7_quotients},
        {"partition size bounds from a consistent model", c8_size_bounds},
        {"enumeration and solver minima agree", c9_backends_agree},
        {"stochastic partitions beat classical on the gap fixture", c10_stochastic_gap},
        {"active learning converges on random targets", c11_active_learning},
        {"adversarial teacher never lets the learner finish", c12_adversarial},
        {"assume-guarantee verdicts are sound and complete", c13_agr},
        {"fixed seeds give byte-identical outputs", c14_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        const auto t0 = Clock::now();
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("%s %2zu %s: %s [%s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str(),
                    fmt(since(t0)).c_str());
        std::fflush(stdout);
    }
    return failed;
}
