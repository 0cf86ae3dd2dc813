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

#include "lpts/all.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace lpts::cli {

/// Stable exit codes.
enum Exit : int {
    ok = 0,
    fails = 1,
    usage = 2,
    solver = 3,
    bound = 4,
    internal = 5,
};

/// Bad flags or unreadable input files.
class UsageError : public Error {
public:
    using Error::Error;
};

struct Config {
    std::string solver_cmd;
    int timeout_s = 60;
    std::size_t max_k = 8;
    std::size_t max_rounds = 200;
    std::uint64_t seed = 1;
    bool json = false;
    bool timing = false;
};

namespace detail {

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw UsageError("cannot write '" + path + "'");
}

inline Lpts load_model(const std::string& path)
{
    try {
        return parse_lpts(read_file(path));
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.column(), path + ": " + e.what());
    }
}

/// Directories contribute their `.lpts` files in name order.
inline std::vector<Lpts> load_models(const std::vector<std::string>& args)
{
    std::vector<Lpts> out;
    for (auto& a : args) {
        if (std::filesystem::is_directory(a)) {
            std::vector<std::filesystem::path> files;
            for (auto& e : std::filesystem::directory_iterator(a))
                if (e.path().extension() == ".lpts") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (auto& f : files) out.push_back(load_model(f.string()));
        } else {
            out.push_back(load_model(a));
        }
    }
    return out;
}

inline SampleSet load_samples(const std::vector<std::string>& pos, const std::vector<std::string>& neg)
{
    SampleSet s;
    for (auto& p : load_models(pos)) s.add_positive(std::move(p));
    for (auto& n : load_models(neg)) s.add_negative(std::move(n));
    return s;
}

inline LearnMode parse_mode(const std::string& m) { return m == "stochastic" ? LearnMode::Stochastic : LearnMode::Partition; }
inline Backend parse_backend(const std::string& b) { return b == "solver" ? Backend::Solver : Backend::Enumerate; }

inline LearnOptions learn_options(const Config& c, const std::string& mode, const std::string& backend)
{
    LearnOptions o;
    o.max_k = c.max_k;
    o.backend = parse_backend(backend);
    o.solver = smt::SolverConfig::resolve(c.solver_cmd, std::chrono::seconds(c.timeout_s));
    if (parse_mode(mode) == LearnMode::Stochastic && o.backend == Backend::Enumerate)
        throw UsageError("stochastic mode needs the solver backend");
    return o;
}

inline void print(std::ostream& out, const nlohmann::ordered_json& j) { out << j.dump(2) << "\n"; }

inline std::string witness_text(const SampleSet& s, const LearnResult& r)
{
    if (s.positives().empty()) return "";
    const auto sp = sample_space(s);
    if (auto* p = std::get_if<Partition>(&r.witness)) return serialize_partition(sp, *p);
    return serialize_stochastic_partition(sp, std::get<StochasticPartition>(r.witness));
}

} // namespace detail

/// Runs one command line. Results go to `out`, diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    using nlohmann::ordered_json;
    CLI::App app{"Simulation checking, learning and assume-guarantee reasoning for labelled probabilistic "
                 "transition systems",
                 "lpts"};
    app.require_subcommand(1);
    app.fallthrough();
    Config c;
    app.add_flag("--json", c.json, "Print a JSON report instead of text");
    app.add_option("--solver-cmd", c.solver_cmd, "Solver command reading SMT-LIB 2 on stdin (default $LPTS_SOLVER_CMD, then 'z3 -in')");
    app.add_option("--timeout", c.timeout_s, "Solver timeout in seconds")->check(CLI::PositiveNumber);
    app.add_option("--max-k", c.max_k, "Largest partition size tried")->check(CLI::PositiveNumber);
    app.add_option("--max-rounds", c.max_rounds, "Learning round bound")->check(CLI::PositiveNumber);
    app.add_option("--seed", c.seed, "Seed for generated instances");
    app.add_flag("--timing", c.timing, "Include wall-clock times in JSON reports");

    std::string f1, f2, output, cex_path, lambda_text = "1/2", mode = "partition", backend = "enumerate", kind = "partition",
                                         smt_dir, assumption_path;
    std::vector<std::string> pos, neg;
    std::size_t k = 1, rounds = 20;
    const std::vector<std::string> modes{"partition", "stochastic"}, backends{"enumerate", "solver"};

    auto* validate = app.add_subcommand("validate", "Parse and check a model file");
    validate->add_option("file", f1)->required();
    auto* classify_cmd = app.add_subcommand("classify", "Report whether a model is a tree and whether it is reactive");
    classify_cmd->add_option("file", f1)->required();
    auto* compose_cmd = app.add_subcommand("compose", "Parallel composition of two models");
    compose_cmd->add_option("left", f1)->required();
    compose_cmd->add_option("right", f2)->required();
    compose_cmd->add_option("-o,--output", output, "Output file (default stdout)");
    auto* check_sim = app.add_subcommand("check-sim", "Decide whether the first model is simulated by the second");
    check_sim->add_option("left", f1)->required();
    check_sim->add_option("right", f2)->required();
    check_sim->add_option("--cex", cex_path, "Write the counterexample here on failure");
    auto* check_equiv = app.add_subcommand("check-equiv", "Decide simulation equivalence");
    check_equiv->add_option("left", f1)->required();
    check_equiv->add_option("right", f2)->required();
    auto* learn_cmd = app.add_subcommand("learn-consistent", "Least-size model consistent with tree samples");
    learn_cmd->add_option("--pos", pos, "Positive sample files or directories")->required();
    learn_cmd->add_option("--neg", neg, "Negative sample files or directories");
    auto* learn_mode = learn_cmd->add_option("--mode", mode)->check(CLI::IsMember(modes));
    auto* learn_backend = learn_cmd->add_option("--backend", backend)->check(CLI::IsMember(backends));
    learn_cmd->add_option("-o,--output", output, "Write the learned model here");
    learn_cmd->add_option("--emit-smt", smt_dir, "Write every solver script into this directory");
    auto* active = app.add_subcommand("active-learn", "Learn a target with a teacher that knows it");
    active->add_option("--target", f1)->required();
    auto* active_mode = active->add_option("--mode", mode)->check(CLI::IsMember(modes));
    auto* active_backend = active->add_option("--backend", backend)->check(CLI::IsMember(backends));
    active->add_option("-o,--output", output, "Write the final hypothesis here");
    auto* adversarial = app.add_subcommand("adversarial-demo", "Run the learner against the adversarial teacher");
    adversarial->add_option("--lambda", lambda_text, "Initial lambda as n/d in (0,1)");
    adversarial->add_option("--rounds", rounds)->check(CLI::PositiveNumber);
    auto* agr = app.add_subcommand("agr", "Check L1 || L2 <= spec with a learned assumption");
    agr->add_option("--l1", f1)->required();
    agr->add_option("--l2", f2)->required();
    std::string spec_path;
    agr->add_option("--spec", spec_path)->required();
    auto* agr_mode = agr->add_option("--mode", mode)->check(CLI::IsMember(modes));
    auto* agr_backend = agr->add_option("--backend", backend)->check(CLI::IsMember(backends));
    bool confirm = false;
    agr->add_flag("--confirm", confirm, "Also run the monolithic check");
    agr->add_option("--assumption", assumption_path, "Write the assumption here when the property holds");
    agr->add_option("--cex", cex_path, "Write the counterexample here when it is violated");
    auto* emit = app.add_subcommand("emit-smt", "Write the constraint script for one size without solving");
    emit->add_option("--pos", pos)->required();
    emit->add_option("--neg", neg);
    emit->add_option("--k", k)->required()->check(CLI::PositiveNumber);
    emit->add_option("--kind", kind)->check(CLI::IsMember(modes));
    emit->add_option("-o,--output", output, "Output file (default stdout)");
    auto* random_cmd = app.add_subcommand("random", "Generate a random model from --seed");
    RandomModelOptions ro;
    bool tree = false, reactive = false;
    random_cmd->add_option("--states", ro.states)->check(CLI::PositiveNumber);
    random_cmd->add_option("--actions", ro.actions)->check(CLI::PositiveNumber);
    random_cmd->add_option("--max-transitions", ro.max_transitions)->check(CLI::PositiveNumber);
    random_cmd->add_option("--max-support", ro.dist.max_support)->check(CLI::PositiveNumber);
    random_cmd->add_flag("--reactive", reactive);
    random_cmd->add_flag("--tree", tree, "Generate a tree with at most --states states");
    random_cmd->add_option("-o,--output", output, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage;
    }

    // Stochastic learning has only the solver backend, so it is the default there.
    auto pick_backend = [&](CLI::Option* m, CLI::Option* b) {
        if (m->count() && mode == "stochastic" && !b->count()) backend = "solver";
    };

    try {
        if (app.got_subcommand(validate)) {
            auto l = detail::load_model(f1);
            if (c.json)
                detail::print(out, {{"valid", true},
                                    {"name", l.name()},
                                    {"states", l.num_states()},
                                    {"actions", l.alphabet().size()},
                                    {"transitions", l.transitions().size()}});
            else
                out << "valid: " << l.name() << ", " << l.num_states() << " states, " << l.alphabet().size()
                    << " actions, " << l.transitions().size() << " transitions\n";
            return ok;
        }
        if (app.got_subcommand(classify_cmd)) {
            auto cls = classify(detail::load_model(f1));
            if (c.json)
                detail::print(out, {{"tree", cls.is_tree}, {"reactive", cls.is_reactive}});
            else
                out << "tree: " << (cls.is_tree ? "yes" : "no") << "\nreactive: " << (cls.is_reactive ? "yes" : "no")
                    << "\n";
            return ok;
        }
        if (app.got_subcommand(compose_cmd)) {
            const auto text = serialize_lpts(compose(detail::load_model(f1), detail::load_model(f2)).system);
            if (!output.empty())
                detail::write_file(output, text);
            else if (c.json)
                detail::print(out, {{"model", text}});
            else
                out << text;
            return ok;
        }
        if (app.got_subcommand(check_sim)) {
            const auto l1 = detail::load_model(f1), l2 = detail::load_model(f2);
            auto r = simulates(l1, l2);
            if (!r.holds && !cex_path.empty()) detail::write_file(cex_path, serialize_cex(*r.cex, l1));
            if (c.json) {
                ordered_json j{{"holds", r.holds}};
                if (r.cex) j["counterexample"] = cex_to_json(*r.cex, l1);
                detail::print(out, j);
            } else if (r.holds) {
                out << "holds: " << l1.name() << " is simulated by " << l2.name() << "\n";
            } else {
                out << "fails: " << l1.name() << " is not simulated by " << l2.name() << "\n"
                    << "counterexample (" << r.cex->tree.num_states() << " states):\n"
                    << serialize_cex(*r.cex, l1);
            }
            return r.holds ? ok : fails;
        }
        if (app.got_subcommand(check_equiv)) {
            const auto l1 = detail::load_model(f1), l2 = detail::load_model(f2);
            auto r = equivalent(l1, l2);
            if (c.json) {
                ordered_json j{{"equivalent", r.equal}, {"left_simulated", !r.left_cex}, {"right_simulated", !r.right_cex}};
                if (r.left_cex) j["left_counterexample"] = cex_to_json(*r.left_cex, l1);
                if (r.right_cex) j["right_counterexample"] = cex_to_json(*r.right_cex, l2);
                detail::print(out, j);
            } else {
                out << (r.equal ? "equivalent" : "not equivalent") << "\n";
                if (r.left_cex) out << l1.name() << " is not simulated by " << l2.name() << ":\n" << serialize_cex(*r.left_cex, l1);
                if (r.right_cex) out << l2.name() << " is not simulated by " << l1.name() << ":\n" << serialize_cex(*r.right_cex, l2);
            }
            return r.equal ? ok : fails;
        }
        if (app.got_subcommand(learn_cmd)) {
            pick_backend(learn_mode, learn_backend);
            auto opts = detail::learn_options(c, mode, backend);
            if (!smt_dir.empty()) {
                std::filesystem::create_directories(smt_dir);
                opts.on_script = [&](std::size_t size, const smt::ConstraintScript& s) {
                    detail::write_file((std::filesystem::path(smt_dir) / (mode + "_k" + std::to_string(size) + ".smt2")).string(), s.text);
                };
            }
            const auto samples = detail::load_samples(pos, neg);
            auto r = learn_least(samples, detail::parse_mode(mode), opts);
            const auto model = serialize_lpts(r.quotient);
            if (!output.empty()) detail::write_file(output, model);
            if (c.json) {
                ordered_json j{{"mode", mode}, {"backend", backend}, {"size", r.size}};
                auto& tr = j["search"] = ordered_json::array();
                for (auto& s : r.search_trace) {
                    ordered_json e{{"k", s.k}, {"sat", s.sat}};
                    if (c.timing) e["seconds"] = s.seconds;
                    tr.push_back(e);
                }
                j["witness"] = detail::witness_text(samples, r);
                j["model"] = model;
                detail::print(out, j);
            } else {
                out << "size: " << r.size << "\nsearch:";
                for (auto& s : r.search_trace) out << " k=" << s.k << (s.sat ? " sat" : " unsat") << ";";
                out << "\nwitness:\n" << detail::witness_text(samples, r) << "model:\n" << model;
            }
            return ok;
        }
        if (app.got_subcommand(active)) {
            pick_backend(active_mode, active_backend);
            LearningBounds b;
            b.max_rounds = c.max_rounds;
            b.learn = detail::learn_options(c, mode, backend);
            const auto target = detail::load_model(f1);
            b.learn.extra_alphabet = target.alphabet();
            auto tr = learn([&](const Lpts& h) { return friendly_teacher(target, h); }, detail::parse_mode(mode), b);
            if (tr.final && !output.empty()) detail::write_file(output, serialize_lpts(*tr.final));
            if (c.json) {
                detail::print(out, transcript_to_json(tr, c.timing));
            } else {
                std::size_t i = 0;
                for (auto& r : tr.rounds) {
                    out << "round " << ++i << ": hypothesis with " << r.hypothesis.num_states() << " states, "
                        << response_name(r.response.kind);
                    if (r.response.cex) out << " counterexample with " << r.response.cex->tree.num_states() << " states";
                    if (r.duplicate) out << " (already known)";
                    out << "\n";
                }
                if (tr.final) out << "converged after " << tr.rounds.size() << " rounds:\n" << serialize_lpts(*tr.final);
            }
            if (tr.bound_exceeded) {
                err << "bound exceeded: " << tr.bound_message << "\n";
                return bound;
            }
            return ok;
        }
        if (app.got_subcommand(adversarial)) {
            auto lambda = parse_rational(lambda_text);
            if (!lambda || *lambda <= 0 || *lambda >= 1) throw UsageError("--lambda must be a rational n/d strictly between 0 and 1");
            LearningBounds b;
            b.learn = detail::learn_options(c, "partition", "enumerate");
            auto o = adversarial_demo(*lambda, rounds, b);
            if (c.json) {
                detail::print(out, adversarial_to_json(o, c.timing));
            } else {
                std::size_t i = 0;
                for (auto& r : o.rounds)
                    out << "round " << ++i << ": " << r.response << ", hypothesis " << r.hypothesis_states
                        << " states, lambda " << to_string(r.lambda.before) << " -> " << to_string(r.lambda.after)
                        << (r.lambda.bumped ? " (bumped)" : "") << (r.target_consistent ? "" : ", target inconsistent")
                        << "\n";
                out << (o.transcript.final ? "converged" : "no equivalence declared") << "; final lambda "
                    << to_string(o.final_lambda) << "\n";
            }
            return ok;
        }
        if (app.got_subcommand(agr)) {
            pick_backend(agr_mode, agr_backend);
            AgrTask t{detail::load_model(f1), detail::load_model(f2), detail::load_model(spec_path)};
            t.mode = detail::parse_mode(mode);
            t.bounds.max_rounds = c.max_rounds;
            t.bounds.learn = detail::learn_options(c, mode, backend);
            t.confirm = confirm;
            auto o = check_asym(t);
            for (auto& w : o.warnings) err << "warning: " << w << "\n";
            if (o.holds && !assumption_path.empty()) detail::write_file(assumption_path, serialize_lpts(*o.assumption));
            if (!o.holds && !cex_path.empty()) detail::write_file(cex_path, serialize_cex(*o.real_cex, *o.cex_system));
            if (c.json) {
                detail::print(out, agr_to_json(o));
            } else {
                out << (o.holds ? "holds" : "violated") << " after " << o.stats.rounds << " rounds ("
                    << o.stats.spurious << " spurious counterexamples)\n";
                if (o.monolithic_holds) out << "monolithic check: " << (*o.monolithic_holds ? "holds" : "violated") << "\n";
                if (o.holds)
                    out << "assumption:\n" << serialize_lpts(*o.assumption);
                else
                    out << "counterexample:\n" << serialize_cex(*o.real_cex, *o.cex_system);
            }
            return o.holds ? ok : fails;
        }
        if (app.got_subcommand(emit)) {
            const auto samples = detail::load_samples(pos, neg);
            const auto script = kind == "stochastic" ? smt::encode_stochastic(samples, k) : smt::encode_partition(samples, k);
            if (!output.empty())
                detail::write_file(output, script.text);
            else
                out << script.text;
            return ok;
        }
        if (app.got_subcommand(random_cmd)) {
            Rng rng(c.seed);
            ro.reactive = reactive;
            std::string text;
            if (tree) {
                RandomTreeOptions to;
                to.max_states = ro.states;
                to.actions = ro.actions;
                to.max_transitions = ro.max_transitions;
                to.dist = ro.dist;
                text = serialize_lpts(random_tree(rng, to, "random"));
            } else {
                text = serialize_lpts(random_lpts(rng, ro, "random"));
            }
            if (!output.empty())
                detail::write_file(output, text);
            else if (c.json)
                detail::print(out, {{"seed", c.seed}, {"model", text}});
            else
                out << text;
            return ok;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << "\n";
        return usage;
    } catch (const InvalidModel& e) {
        err << "invalid model: " << e.what() << "\n";
        return usage;
    } catch (const PreconditionError& e) {
        err << "error: " << e.what() << "\n";
        return usage;
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << "\n";
        return solver;
    } catch (const BoundExceeded& e) {
        err << "bound exceeded: " << e.what() << "\n";
        return bound;
    } catch (const Error& e) {
        err << "internal error: " << e.what() << "\n";
        return internal;
    }
    return usage;
}

} // namespace lpts::cli
