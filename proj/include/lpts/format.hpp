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

// Line-oriented `.lpts` text format:
//
//   lpts <name>
//   alphabet <a1> <a2> ...
//   states <s1> <s2> ...
//   start <s>
//   trans <s> <a> { <s1>: <p1>, <s2>: <p2>, ... }
//
// `#` starts a comment. Identifiers are runs of characters other than
// whitespace and `{ } : , #`; commas are allowed inside balanced
// parentheses so that composed states such as `(s1,s2)` are identifiers.

#include "lpts/error.hpp"
#include "lpts/model.hpp"
#include "lpts/rational.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace lpts {

namespace detail {

struct Token {
    enum class Kind { Ident, LBrace, RBrace, Colon, Comma };
    Kind kind;
    std::string text;
    std::size_t column;
};

inline bool is_ident_char(char c)
{
    return !(c == ' ' || c == '\t' || c == '\r' || c == '{' || c == '}' || c == ':' || c == ',' ||
             c == '#');
}

inline std::vector<Token> tokenize_line(std::string_view line, std::size_t line_no)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#') break;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        const std::size_t col = i + 1;
        switch (c) {
        case '{': out.push_back({Token::Kind::LBrace, "{", col}); ++i; continue;
        case '}': out.push_back({Token::Kind::RBrace, "}", col}); ++i; continue;
        case ':': out.push_back({Token::Kind::Colon, ":", col}); ++i; continue;
        case ',': out.push_back({Token::Kind::Comma, ",", col}); ++i; continue;
        default: break;
        }
        std::string ident;
        int depth = 0;
        while (i < line.size()) {
            char d = line[i];
            if (d == '(') ++depth;
            if (d == ')') {
                if (depth == 0) throw ParseError(line_no, i + 1, "unbalanced ')'");
                --depth;
            }
            if (depth > 0 && d == ',') {
                ident.push_back(d);
                ++i;
                continue;
            }
            if (!is_ident_char(d)) break;
            ident.push_back(d);
            ++i;
        }
        if (depth != 0) throw ParseError(line_no, col, "unbalanced '(' in identifier");
        out.push_back({Token::Kind::Ident, std::move(ident), col});
    }
    return out;
}

struct PendingTransition {
    std::size_t line;
    Token source;
    Token action;
    std::vector<std::pair<Token, Token>> entries;
};

struct ParsedDocument {
    Lpts model;
    /// `map <tree-state> <model-state>` lines, when allowed.
    std::vector<std::pair<std::string, std::string>> map_lines;
};

inline ParsedDocument parse_document(std::string_view text, bool allow_map)
{
    std::optional<std::string> name;
    std::vector<Token> alphabet;
    std::vector<Token> states;
    std::optional<Token> start;
    std::size_t start_line = 0;
    bool seen_alphabet = false;
    std::size_t alphabet_line = 0;
    std::vector<std::size_t> state_lines;
    std::vector<PendingTransition> transitions;
    std::vector<std::pair<std::string, std::string>> map_lines;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto tokens = tokenize_line(line, line_no);
        if (tokens.empty()) continue;
        const Token& kw = tokens[0];
        if (kw.kind != Token::Kind::Ident) throw ParseError(line_no, kw.column, "expected keyword");
        if (!name) {
            if (kw.text != "lpts") throw ParseError(line_no, kw.column, "expected 'lpts <name>' header");
            if (tokens.size() != 2 || tokens[1].kind != Token::Kind::Ident)
                throw ParseError(line_no, kw.column, "header must be 'lpts <name>'");
            name = tokens[1].text;
            continue;
        }
        auto expect_idents = [&](std::size_t from) {
            for (std::size_t i = from; i < tokens.size(); ++i)
                if (tokens[i].kind != Token::Kind::Ident)
                    throw ParseError(line_no, tokens[i].column, "unexpected '" + tokens[i].text + "'");
        };
        if (kw.text == "alphabet") {
            if (seen_alphabet) throw ParseError(line_no, kw.column, "duplicate 'alphabet' line");
            seen_alphabet = true;
            alphabet_line = line_no;
            expect_idents(1);
            alphabet.insert(alphabet.end(), tokens.begin() + 1, tokens.end());
        } else if (kw.text == "states") {
            expect_idents(1);
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                states.push_back(tokens[i]);
                state_lines.push_back(line_no);
            }
        } else if (kw.text == "start") {
            if (start) throw ParseError(line_no, kw.column, "duplicate 'start' line");
            if (tokens.size() != 2 || tokens[1].kind != Token::Kind::Ident)
                throw ParseError(line_no, kw.column, "expected 'start <state>'");
            start = tokens[1];
            start_line = line_no;
        } else if (kw.text == "trans") {
            if (tokens.size() < 5 || tokens[1].kind != Token::Kind::Ident ||
                tokens[2].kind != Token::Kind::Ident || tokens[3].kind != Token::Kind::LBrace)
                throw ParseError(line_no, kw.column, "expected 'trans <state> <action> { ... }'");
            PendingTransition pt{line_no, tokens[1], tokens[2], {}};
            std::size_t i = 4;
            bool closed = false;
            while (i < tokens.size()) {
                if (tokens[i].kind == Token::Kind::RBrace && pt.entries.empty()) {
                    closed = true;
                    ++i;
                    break;
                }
                if (i + 2 >= tokens.size() || tokens[i].kind != Token::Kind::Ident ||
                    tokens[i + 1].kind != Token::Kind::Colon || tokens[i + 2].kind != Token::Kind::Ident)
                    throw ParseError(line_no, tokens[i].column, "expected '<state>: <probability>'");
                pt.entries.emplace_back(tokens[i], tokens[i + 2]);
                i += 3;
                if (i < tokens.size() && tokens[i].kind == Token::Kind::Comma) {
                    ++i;
                    continue;
                }
                if (i < tokens.size() && tokens[i].kind == Token::Kind::RBrace) {
                    closed = true;
                    ++i;
                    break;
                }
                throw ParseError(line_no, i < tokens.size() ? tokens[i].column : line.size() + 1,
                                 "expected ',' or '}'");
            }
            if (!closed) throw ParseError(line_no, line.size() + 1, "missing '}'");
            if (i != tokens.size()) throw ParseError(line_no, tokens[i].column, "trailing input after '}'");
            if (pt.entries.empty()) throw ParseError(line_no, tokens[3].column, "empty distribution");
            transitions.push_back(std::move(pt));
        } else if (kw.text == "map" && allow_map) {
            if (tokens.size() != 3) throw ParseError(line_no, kw.column, "expected 'map <tree-state> <model-state>'");
            expect_idents(1);
            map_lines.emplace_back(tokens[1].text, tokens[2].text);
        } else if (kw.text == "lpts") {
            throw ParseError(line_no, kw.column, "duplicate 'lpts' header");
        } else {
            throw ParseError(line_no, kw.column, "unknown keyword '" + kw.text + "'");
        }
    }
    if (!name) throw ParseError(line_no, 1, "missing 'lpts <name>' header");
    if (states.empty()) throw ParseError(line_no, 1, "missing 'states' line");
    if (!start) throw ParseError(line_no, 1, "missing 'start' line");

    LptsBuilder b(*name);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (b.find_state(states[i].text))
            throw ParseError(state_lines[i], states[i].column, "duplicate state '" + states[i].text + "'");
        b.add_state(states[i].text);
    }
    for (auto& a : alphabet) {
        if (b.find_action(a.text)) throw ParseError(alphabet_line, a.column, "duplicate action '" + a.text + "'");
        b.action(a.text);
    }
    auto s0 = b.find_state(start->text);
    if (!s0) throw ParseError(start_line, start->column, "unknown state '" + start->text + "'");
    b.set_start(*s0);
    for (auto& pt : transitions) {
        auto src = b.find_state(pt.source.text);
        if (!src) throw ParseError(pt.line, pt.source.column, "unknown state '" + pt.source.text + "'");
        auto act = b.find_action(pt.action.text);
        if (!act) throw ParseError(pt.line, pt.action.column, "unknown action '" + pt.action.text + "'");
        std::vector<Distribution::Entry> entries;
        Rational sum;
        std::set<StateId> seen;
        for (auto& [st, pr] : pt.entries) {
            auto s = b.find_state(st.text);
            if (!s) throw ParseError(pt.line, st.column, "unknown state '" + st.text + "'");
            if (!seen.insert(*s).second)
                throw ParseError(pt.line, st.column, "state '" + st.text + "' listed twice");
            auto p = parse_rational(pr.text);
            if (!p || pr.text.find('.') != std::string::npos || pr.text[0] == '-' || pr.text[0] == '+')
                throw ParseError(pt.line, pr.column, "malformed probability '" + pr.text + "'");
            if (!is_probability(*p))
                throw ParseError(pt.line, pr.column, "probability " + pr.text + " outside (0,1]");
            sum += *p;
            entries.emplace_back(*s, *p);
        }
        if (sum != 1)
            throw ParseError(pt.line, pt.source.column,
                             "distribution sums to " + to_string(sum) + ", not 1");
        b.add_transition(*src, *act, Distribution::from_entries(std::move(entries)));
    }
    return {std::move(b).build(), std::move(map_lines)};
}

} // namespace detail

/// Parses and validates a `.lpts` document. Throws ParseError.
inline Lpts parse_lpts(std::string_view text)
{
    return detail::parse_document(text, false).model;
}

inline std::string serialize_distribution(const Lpts& l, const Distribution& d)
{
    std::string out = "{ ";
    bool first = true;
    for (auto& [s, p] : d.entries()) {
        if (!first) out += ", ";
        first = false;
        out += l.state_name(s);
        out += ": ";
        out += to_string(p);
    }
    out += " }";
    return out;
}

/// Canonical text: header, alphabet, states and start in declaration order,
/// then transitions sorted by (source, action, distribution) text.
inline std::string serialize_lpts(const Lpts& l)
{
    std::string out = "lpts " + l.name() + "\nalphabet";
    for (auto& a : l.alphabet()) out += " " + a;
    out += "\nstates";
    for (auto& s : l.state_names()) out += " " + s;
    out += "\nstart " + l.state_name(l.start()) + "\n";
    std::vector<std::tuple<std::string, std::string, std::string>> lines;
    lines.reserve(l.transitions().size());
    for (auto& t : l.transitions())
        lines.emplace_back(l.state_name(t.source), l.action_name(t.action),
                           serialize_distribution(l, t.target));
    std::sort(lines.begin(), lines.end());
    for (auto& [s, a, d] : lines) out += "trans " + s + " " + a + " " + d + "\n";
    return out;
}

} // namespace lpts
