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

// `.cex` files: a `.lpts` tree followed by one `map <tree-state> <model-state>`
// line per tree state, in tree state order.

#include "lpts/format.hpp"
#include "lpts/simulation.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace lpts {

inline std::string serialize_cex(const Counterexample& c, const Lpts& target)
{
    std::string out = serialize_lpts(c.tree);
    for (StateId s = 0; s < c.tree.num_states(); ++s)
        out += "map " + c.tree.state_name(s) + " " + target.state_name(c.mapping.image.at(s)) + "\n";
    return out;
}

/// Parses a `.cex` document and resolves its mapping against `target`.
inline Counterexample parse_cex(std::string_view text, const Lpts& target)
{
    auto doc = detail::parse_document(text, true);
    Counterexample c{std::move(doc.model), {}};
    if (!classify(c.tree).is_tree) throw InvalidModel("counterexample is not a tree");
    std::vector<std::optional<StateId>> image(c.tree.num_states());
    for (auto& [ts, ms] : doc.map_lines) {
        auto t = c.tree.find_state(ts);
        if (!t) throw InvalidModel("map line names unknown tree state '" + ts + "'");
        auto m = target.find_state(ms);
        if (!m) throw InvalidModel("map line names unknown model state '" + ms + "'");
        if (image[*t]) throw InvalidModel("tree state '" + ts + "' mapped twice");
        image[*t] = *m;
    }
    for (StateId s = 0; s < image.size(); ++s) {
        if (!image[s]) throw InvalidModel("tree state '" + c.tree.state_name(s) + "' is not mapped");
        c.mapping.image.push_back(*image[s]);
    }
    return c;
}

inline nlohmann::ordered_json cex_to_json(const Counterexample& c, const Lpts& target)
{
    nlohmann::ordered_json j;
    j["tree"] = serialize_lpts(c.tree);
    auto& m = j["mapping"] = nlohmann::ordered_json::array();
    for (StateId s = 0; s < c.tree.num_states(); ++s)
        m.push_back({{"tree_state", c.tree.state_name(s)},
                     {"model_state", target.state_name(c.mapping.image.at(s))}});
    return j;
}

} // namespace lpts
