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

#include <map>
#include <string>
#include <vector>

namespace lpts::smt {

enum class Sort { Bool, Real };

/// One declared unknown: its script identifier, the family it belongs to
/// (`v`, `R`, `d`, `w`, `x`, `y`, `l`, `g`, `m`) with its indices, and a
/// human-readable meaning.
struct Symbol {
    std::string id;
    std::string role;
    std::vector<std::size_t> index;
    Sort sort = Sort::Bool;
    std::string meaning;
};

/// A self-contained SMT-LIB 2 script over QF_LRA plus its symbol table.
struct ConstraintScript {
    std::string text;
    std::vector<Symbol> symbols;

    const Symbol* find(const std::string& role, const std::vector<std::size_t>& index) const
    {
        auto it = lookup.find(key(role, index));
        return it == lookup.end() ? nullptr : &symbols[it->second];
    }

    static std::string key(const std::string& role, const std::vector<std::size_t>& index)
    {
        std::string k = role;
        for (auto i : index) k += "_" + std::to_string(i);
        return k;
    }

    std::map<std::string, std::size_t> lookup;
};

/// Real literal in SMT-LIB decimal notation, e.g. `1.0`, `(/ 1.0 3.0)`.
inline std::string real_literal(const Rational& q)
{
    auto mag = [](const Rational& a) {
        const std::string num = a.get_num().get_str() + ".0";
        if (a.get_den() == 1) return num;
        return "(/ " + num + " " + a.get_den().get_str() + ".0)";
    };
    if (q < 0) return "(- " + mag(-q) + ")";
    return mag(q);
}

inline std::string nary(const std::string& op, const std::vector<std::string>& args, const std::string& unit)
{
    if (args.empty()) return unit;
    if (args.size() == 1) return args[0];
    std::string out = "(" + op;
    for (auto& a : args) out += " " + a;
    return out + ")";
}

inline std::string and_(const std::vector<std::string>& a) { return nary("and", a, "true"); }
inline std::string or_(const std::vector<std::string>& a) { return nary("or", a, "false"); }
inline std::string sum(const std::vector<std::string>& a) { return nary("+", a, "0.0"); }
inline std::string not_(const std::string& a) { return "(not " + a + ")"; }
inline std::string implies(const std::string& a, const std::string& b) { return "(=> " + a + " " + b + ")"; }
inline std::string eq(const std::string& a, const std::string& b) { return "(= " + a + " " + b + ")"; }
inline std::string ite(const std::string& c, const std::string& a, const std::string& b)
{
    return "(ite " + c + " " + a + " " + b + ")";
}
inline std::string op2(const std::string& op, const std::string& a, const std::string& b)
{
    return "(" + op + " " + a + " " + b + ")";
}

class ScriptBuilder {
public:
    explicit ScriptBuilder(std::string title) : title_(std::move(title)) {}

    std::string declare(const std::string& role, const std::vector<std::size_t>& index, Sort sort,
                        std::string meaning)
    {
        const auto id = ConstraintScript::key(role, index);
        if (script_.lookup.count(id)) throw Error("internal: symbol declared twice: " + id);
        script_.lookup.emplace(id, script_.symbols.size());
        script_.symbols.push_back(Symbol{id, role, index, sort, meaning});
        decls_ += "(declare-fun " + id + " () " + (sort == Sort::Bool ? "Bool" : "Real") + ") ; " + meaning + "\n";
        return id;
    }

    void comment(const std::string& c) { body_ += "; " + c + "\n"; }
    void assert_(const std::string& term) { body_ += "(assert " + term + ")\n"; }

    ConstraintScript finish() &&
    {
        std::string t = "; " + title_ + "\n(set-option :produce-models true)\n(set-logic QF_LRA)\n";
        t += decls_ + body_ + "(check-sat)\n";
        constexpr std::size_t batch = 64;
        for (std::size_t i = 0; i < script_.symbols.size(); i += batch) {
            t += "(get-value (";
            for (std::size_t j = i; j < std::min(i + batch, script_.symbols.size()); ++j)
                t += (j == i ? "" : " ") + script_.symbols[j].id;
            t += "))\n";
        }
        t += "(exit)\n";
        script_.text = std::move(t);
        return std::move(script_);
    }

private:
    std::string title_;
    std::string decls_;
    std::string body_;
    ConstraintScript script_;
};

} // namespace lpts::smt
