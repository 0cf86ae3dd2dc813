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

#include "lpts/format.hpp"
#include "lpts/model.hpp"
#include "lpts/samples.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef LPTS_FIXTURE_DIR
#error "LPTS_FIXTURE_DIR must be defined"
#endif

namespace lpts::testing {

inline std::filesystem::path fixture_path(const std::string& rel)
{
    return std::filesystem::path(LPTS_FIXTURE_DIR) / rel;
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline Lpts load(const std::string& rel)
{
    return parse_lpts(read_file(fixture_path(rel)));
}

/// Every valid model under fixtures/models, sorted by file name.
inline std::vector<std::pair<std::string, Lpts>> model_corpus()
{
    std::vector<std::filesystem::path> files;
    for (auto& e : std::filesystem::directory_iterator(fixture_path("models")))
        if (e.path().extension() == ".lpts") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::pair<std::string, Lpts>> out;
    for (auto& f : files) out.emplace_back(f.filename().string(), parse_lpts(read_file(f)));
    return out;
}

/// Samples under fixtures/learning/<name>/{pos,neg}, files in name order.
inline SampleSet load_samples(const std::string& name)
{
    auto dir = fixture_path("learning/" + name);
    auto read_all = [](const std::filesystem::path& d) {
        std::vector<std::filesystem::path> files;
        if (std::filesystem::is_directory(d))
            for (auto& e : std::filesystem::directory_iterator(d))
                if (e.path().extension() == ".lpts") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        std::vector<Lpts> out;
        for (auto& f : files) out.push_back(parse_lpts(read_file(f)));
        return out;
    };
    return SampleSet(read_all(dir / "pos"), read_all(dir / "neg"));
}

inline std::vector<std::string> learning_corpus()
{
    std::vector<std::string> names;
    for (auto& e : std::filesystem::directory_iterator(fixture_path("learning")))
        if (e.is_directory()) names.push_back(e.path().filename().string());
    std::sort(names.begin(), names.end());
    return names;
}

/// The U_lambda family: u0 -a-> {u1: lambda, u2: 1 - lambda}, u1 -b-> u1.
inline Lpts u_lambda(const Rational& lambda, const std::string& name = "u")
{
    LptsBuilder b(name);
    auto u0 = b.add_state("u0"), u1 = b.add_state("u1"), u2 = b.add_state("u2");
    auto a = b.action("a"), bb = b.action("b");
    b.set_start(u0);
    b.add_transition(u0, a, Distribution::from_entries({{u1, lambda}, {u2, 1 - lambda}}));
    b.add_transition(u1, bb, Distribution::dirac(u1));
    return std::move(b).build();
}

} // namespace lpts::testing
