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

#include <gmpxx.h>

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace lpts {

/// Exact arbitrary-precision rational, always canonical (lowest terms,
/// positive denominator).
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rational(long num, long den = 1)
{
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Parses `n`, `-n`, `n/d` or a plain decimal such as `0.25`.
inline std::optional<Rational> parse_rational(std::string_view text)
{
    if (text.empty()) return std::nullopt;
    std::string s(text);
    bool negative = false;
    std::size_t pos = 0;
    if (s[0] == '-' || s[0] == '+') {
        negative = s[0] == '-';
        pos = 1;
    }
    auto all_digits = [](std::string_view v) {
        if (v.empty()) return false;
        for (char c : v)
            if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        return true;
    };
    std::string_view body(s.data() + pos, s.size() - pos);
    Rational q;
    if (auto slash = body.find('/'); slash != std::string_view::npos) {
        auto num = body.substr(0, slash);
        auto den = body.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den)) return std::nullopt;
        Integer d(std::string(den), 10);
        if (d == 0) return std::nullopt;
        q = Rational(Integer(std::string(num), 10), d);
    } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
        auto whole = body.substr(0, dot);
        auto frac = body.substr(dot + 1);
        if (!all_digits(whole) || (!frac.empty() && !all_digits(frac))) return std::nullopt;
        Integer scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        Integer num(std::string(whole), 10);
        if (!frac.empty()) num = num * scale + Integer(std::string(frac), 10);
        q = Rational(num, scale);
    } else {
        if (!all_digits(body)) return std::nullopt;
        q = Rational(Integer(std::string(body), 10));
    }
    q.canonicalize();
    if (negative) q = -q;
    return q;
}

/// `n` for integers, `n/d` otherwise.
inline std::string to_string(const Rational& q)
{
    return q.get_str();
}

inline bool is_probability(const Rational& q)
{
    return q > 0 && q <= 1;
}

} // namespace lpts
