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

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

namespace lpts {

/// Edmonds-Karp maximum flow over an exact capacity type (integers or
/// GMP integers). Arcs are explored in insertion order, so the returned flow
/// is a deterministic function of the construction sequence.
template <typename Cap>
class MaxFlow {
public:
    explicit MaxFlow(std::size_t nodes) : adj_(nodes) {}

    /// Returns the index of the forward arc.
    std::size_t add_edge(std::size_t from, std::size_t to, Cap capacity)
    {
        const std::size_t id = arcs_.size();
        arcs_.push_back({to, capacity, Cap(0)});
        adj_[from].push_back(id);
        arcs_.push_back({from, Cap(0), Cap(0)});
        adj_[to].push_back(id + 1);
        return id;
    }

    Cap run(std::size_t source, std::size_t sink)
    {
        Cap total(0);
        std::vector<std::size_t> via(adj_.size());
        for (;;) {
            std::vector<char> seen(adj_.size(), 0);
            std::vector<std::size_t> queue{source};
            seen[source] = 1;
            for (std::size_t head = 0; head < queue.size() && !seen[sink]; ++head) {
                const std::size_t u = queue[head];
                for (std::size_t a : adj_[u]) {
                    const std::size_t v = arcs_[a].to;
                    if (!seen[v] && residual(a) > 0) {
                        seen[v] = 1;
                        via[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if (!seen[sink]) break;
            Cap push = residual(via[sink]);
            for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to)
                push = std::min(push, residual(via[v]));
            for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
                arcs_[via[v]].flow += push;
                arcs_[via[v] ^ 1].flow -= push;
            }
            total += push;
        }
        return total;
    }

    Cap flow(std::size_t arc) const { return arcs_[arc].flow; }

    /// Nodes reachable from `source` in the residual network.
    std::vector<char> residual_reachable(std::size_t source) const
    {
        std::vector<char> seen(adj_.size(), 0);
        std::vector<std::size_t> stack{source};
        seen[source] = 1;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t a : adj_[u]) {
                const std::size_t v = arcs_[a].to;
                if (!seen[v] && residual(a) > 0) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        return seen;
    }

private:
    struct Arc {
        std::size_t to;
        Cap capacity;
        Cap flow;
    };

    Cap residual(std::size_t a) const { return arcs_[a].capacity - arcs_[a].flow; }

    std::vector<std::vector<std::size_t>> adj_;
    std::vector<Arc> arcs_;
};

} // namespace lpts
