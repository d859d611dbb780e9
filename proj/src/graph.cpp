#include "graph.hpp"

#include <algorithm>
#include <limits>

namespace mehc::detail {

Components strongly_connected(const Graph& graph) {
    constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
    const std::size_t n = graph.size();

    Components result{std::vector<std::size_t>(n, kUnvisited), 0};
    std::vector<std::size_t> index(n, kUnvisited), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t next_index = 0;

    struct Frame {
        std::size_t node;
        std::size_t edge;
    };
    std::vector<Frame> call;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        call.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!call.empty()) {
            Frame& frame = call.back();
            const std::size_t v = frame.node;
            if (frame.edge < graph[v].size()) {
                const std::size_t w = graph[v][frame.edge++];
                if (index[w] == kUnvisited) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
                continue;
            }
            if (lowlink[v] == index[v]) {
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    result.component_of[w] = result.count;
                } while (w != v);
                ++result.count;
            }
            call.pop_back();
            if (!call.empty()) {
                const std::size_t parent = call.back().node;
                lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
            }
        }
    }
    return result;
}

std::vector<bool> closed_components(const Graph& graph, const Components& components) {
    std::vector<bool> closed(components.count, true);
    for (std::size_t v = 0; v < graph.size(); ++v)
        for (std::size_t w : graph[v])
            if (components.component_of[v] != components.component_of[w])
                closed[components.component_of[v]] = false;
    return closed;
}

std::vector<bool> reachable_from(const Graph& graph, std::size_t source) {
    std::vector<bool> seen(graph.size(), false);
    std::vector<std::size_t> todo{source};
    seen[source] = true;
    while (!todo.empty()) {
        std::size_t v = todo.back();
        todo.pop_back();
        for (std::size_t w : graph[v])
            if (!seen[w]) {
                seen[w] = true;
                todo.push_back(w);
            }
    }
    return seen;
}

} // namespace mehc::detail
