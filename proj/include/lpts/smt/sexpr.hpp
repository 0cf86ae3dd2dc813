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

#include <string>
#include <string_view>
#include <vector>

namespace lpts::smt {

struct SExpr {
    bool is_atom = true;
    std::string atom;
    std::vector<SExpr> items;

    bool is(std::string_view a) const { return is_atom && atom == a; }
};

/// Reads every top-level s-expression in `text`. Understands `;` comments,
/// string literals and `|quoted|` symbols.
inline std::vector<SExpr> parse_sexprs(std::string_view text)
{
    std::vector<SExpr> top;
    std::vector<SExpr> stack;
    auto emit = [&](SExpr e) {
        if (stack.empty())
            top.push_back(std::move(e));
        else
            stack.back().items.push_back(std::move(e));
    };
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == ';') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '(') {
            SExpr e;
            e.is_atom = false;
            stack.push_back(std::move(e));
            ++i;
        } else if (c == ')') {
            if (stack.empty()) throw SolverError("unbalanced ')' in solver output");
            SExpr e = std::move(stack.back());
            stack.pop_back();
            emit(std::move(e));
            ++i;
        } else if (c == '"' || c == '|') {
            const char close = c;
            std::string s(1, c);
            ++i;
            while (i < text.size()) {
                if (text[i] == close) {
                    // SMT-LIB escapes a quote inside a string by doubling it.
                    if (close == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                        s += "\"\"";
                        i += 2;
                        continue;
                    }
                    break;
                }
                s.push_back(text[i++]);
            }
            if (i >= text.size()) throw SolverError("unterminated literal in solver output");
            s.push_back(close);
            ++i;
            emit(SExpr{true, std::move(s), {}});
        } else {
            std::string s;
            while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(' &&
                   text[i] != ')' && text[i] != ';')
                s.push_back(text[i++]);
            emit(SExpr{true, std::move(s), {}});
        }
    }
    if (!stack.empty()) throw SolverError("unbalanced '(' in solver output");
    return top;
}

/// Exact value of a real term as printed by a solver: numerals, decimals,
/// `(/ a b)` and `(- a)`.
inline Rational value_to_rational(const SExpr& e)
{
    if (e.is_atom) {
        auto q = parse_rational(e.atom);
        if (!q || e.atom.find('/') != std::string::npos) throw SolverError("not a real value: " + e.atom);
        return *q;
    }
    if (e.items.size() == 2 && e.items[0].is("-")) return -value_to_rational(e.items[1]);
    if (e.items.size() == 3 && e.items[0].is("/")) {
        Rational d = value_to_rational(e.items[2]);
        if (d == 0) throw SolverError("division by zero in solver value");
        return value_to_rational(e.items[1]) / d;
    }
    throw SolverError("unsupported real value in solver output");
}

inline bool value_to_bool(const SExpr& e)
{
    if (e.is("true")) return true;
    if (e.is("false")) return false;
    throw SolverError("not a boolean value");
}

} // namespace lpts::smt
